#include "schemacalc/impl.hpp"

#include <cmath>
#include <cstdio>

#include "schemacalc/error.hpp"

namespace schemacalc::impl {

namespace {

constexpr double kRowTolerance = 1e-9;

std::string shape_text(const std::vector<std::size_t>& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

void check_layout(const std::string& what, const ParamLayout& layout, const ParamTensor& params) {
  if (params.shape != layout.dims) {
    fail(ErrorCode::ShapeMismatch, what + ": parameter shape " + shape_text(params.shape) +
                                       " but the language requires " + shape_text(layout.dims));
  }
  for (double v : params.values) {
    if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, what + ": parameters must be finite");
  }
  if (!layout.stochastic) return;
  const std::size_t rows = params.size() / layout.row_width;
  for (std::size_t r = 0; r < rows; ++r) {
    double sum = 0;
    for (std::size_t k = 0; k < layout.row_width; ++k) {
      double p = params[r * layout.row_width + k];
      if (!(p >= 0)) {
        fail(ErrorCode::NonStochasticRow, what + ": negative probability in row " + std::to_string(r));
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowTolerance) {
      fail(ErrorCode::NonStochasticRow,
           what + ": row " + std::to_string(r) + " sums to " + std::to_string(sum));
    }
  }
}

std::string digest(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "s%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

std::size_t element_count(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

ParamTensor::ParamTensor(std::vector<std::size_t> s, std::vector<double> v)
    : shape(std::move(s)), values(std::move(v)) {
  if (values.size() != element_count(shape)) {
    fail(ErrorCode::ShapeMismatch, "tensor of shape " + shape_text(shape) + " given " +
                                       std::to_string(values.size()) + " values");
  }
}

ImplLanguage::ImplLanguage(std::string name, ShapeFn shape_of)
    : name_(std::move(name)), shape_of_(std::move(shape_of)) {}

ImplLanguage tabular_language() {
  return ImplLanguage("tabular", [](const SchemaType& type) {
    ParamLayout layout;
    for (const auto& s : type.dom) layout.dims.push_back(s.size());
    bool real_valued = type.cod.size() == 1 && type.cod[0].role() == SpaceRole::Real;
    if (real_valued) return layout;
    layout.stochastic = true;
    for (const auto& s : type.cod) {
      layout.dims.push_back(s.size());
      layout.row_width *= s.size();
    }
    return layout;
  });
}

const LanguageRegistry& LanguageRegistry::builtin() {
  static const LanguageRegistry registry = [] {
    LanguageRegistry r;
    r.add(tabular_language());
    return r;
  }();
  return registry;
}

void LanguageRegistry::add(ImplLanguage lang) {
  auto name = lang.name();
  langs_.insert_or_assign(name, std::move(lang));
}

const ImplLanguage& LanguageRegistry::find(const std::string& name) const {
  auto it = langs_.find(name);
  if (it == langs_.end()) fail(ErrorCode::UnsupportedLanguage, "no language named '" + name + "'");
  return it->second;
}

ImplementedSchema implement(const SchemaTerm& term, const ImplLanguage& lang, ParamTensor params,
                            std::string id) {
  auto layout = lang.layout_of(term.type());
  if (id.empty()) id = term.is(syntax::TermOp::Atomic) ? term.id() : digest(term.key());
  check_layout("implement " + id, layout, params);
  return ImplementedSchema{std::move(id), term, lang, std::move(params), std::move(layout)};
}

ImplementedSchema update(const ImplementedSchema& s, const ParamMap& u) {
  auto next = u(s.params);
  check_layout("update " + s.id, s.layout, next);
  ImplementedSchema out = s;
  out.params = std::move(next);
  return out;
}

ImplementedSchema transform(const ImplementedSchema& s, const ImplLanguage& target,
                            const ParamMap& translate) {
  auto layout = target.layout_of(s.term.type());
  auto next = translate(s.params);
  check_layout("transform " + s.id + " to " + target.name(), layout, next);
  return ImplementedSchema{s.id, s.term, target, std::move(next), std::move(layout)};
}

std::string PointMap::apply(const std::string& point) const {
  auto it = mapping.find(point);
  return it == mapping.end() ? point : it->second;
}

PointMap PointMap::compose(const PointMap& after, const PointMap& before) {
  PointMap out;
  for (const auto& [k, v] : before.mapping) out.mapping[k] = after.apply(v);
  for (const auto& [k, v] : after.mapping) {
    if (!before.mapping.count(k)) out.mapping[k] = v;
  }
  return out;
}

ObjectRef object_ref(const ImplementedSchema& s) {
  return ObjectRef{s.term.key(), s.lang.name(), s.params.shape};
}

ImplMorphism identity_morphism(const ImplementedSchema& s) {
  auto ref = object_ref(s);
  return ImplMorphism{ref, ref, "id", s.lang.name(), s.lang.name(),
                      [](const ParamTensor& t) { return t; }, {}, {}};
}

ImplMorphism update_morphism(const ImplementedSchema& s, ParamMap u) {
  auto m = identity_morphism(s);
  m.param_map = std::move(u);
  return m;
}

ImplMorphism compose_morphisms(const ImplMorphism& g, const ImplMorphism& f) {
  if (!(f.dst == g.src) || f.lang_to != g.lang_from) {
    fail(ErrorCode::DomainMismatch,
         "cannot compose: codomain " + f.dst.term_key + " differs from domain " + g.src.term_key);
  }
  ImplMorphism out;
  out.src = f.src;
  out.dst = g.dst;
  if (f.vertical() && g.vertical()) {
    out.syn = "id";
  } else if (f.vertical()) {
    out.syn = g.syn;
  } else if (g.vertical()) {
    out.syn = f.syn;
  } else {
    out.syn = g.syn + "." + f.syn;
  }
  out.lang_from = f.lang_from;
  out.lang_to = g.lang_to;
  out.param_map = [gm = g.param_map, fm = f.param_map](const ParamTensor& t) { return gm(fm(t)); };
  // Instances are pulled back: first along g, then along f.
  out.pull_dom = PointMap::compose(f.pull_dom, g.pull_dom);
  out.pull_cod = PointMap::compose(f.pull_cod, g.pull_cod);
  return out;
}

nlohmann::json to_json(const ImplementedSchema& s) {
  return {{"id", s.id},
          {"term", syntax::to_json(s.term)},
          {"lang", s.lang.name()},
          {"shape", s.params.shape},
          {"values", s.params.values}};
}

ImplementedSchema implemented_from_json(const nlohmann::json& j, const LanguageRegistry& langs) {
  try {
    auto term = syntax::term_from_json(j.at("term"));
    const auto& lang = langs.find(j.at("lang").get<std::string>());
    ParamTensor params(j.at("shape").get<std::vector<std::size_t>>(),
                       j.at("values").get<std::vector<double>>());
    return implement(term, lang, std::move(params), j.at("id").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("implemented schema: ") + e.what());
  }
}

}  // namespace schemacalc::impl
