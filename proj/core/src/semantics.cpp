#include "schemacalc/semantics.hpp"

#include <algorithm>
#include <cmath>

#include "schemacalc/error.hpp"

namespace schemacalc::sem {

namespace {

using syntax::TermOp;

void check_row(const std::vector<double>& row, const std::string& where) {
  double sum = 0;
  for (double p : row) {
    if (!(p >= 0)) fail(ErrorCode::NonStochasticRow, where + ": negative probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kProbTolerance) {
    fail(ErrorCode::NonStochasticRow, where + ": mass " + format_real(sum));
  }
}

std::string product_text(const ProductSpace& p) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += "*";
    out += p[i].label();
  }
  return out.empty() ? "1" : out;
}

bool real_order(double a, double b) {
  return a < b || (a == b && std::signbit(a) && !std::signbit(b));
}

/// One flattened space holding every point of `cod` plus the inactive point.
SpaceSpec adjoin_inactive(const ProductSpace& cod) {
  std::vector<std::string> points;
  const std::size_t n = cardinality(cod);
  for (std::size_t i = 0; i < n; ++i) {
    auto label = point_label(cod, i);
    std::replace(label.begin(), label.end(), ',', ';');
    points.push_back(std::move(label));
  }
  points.emplace_back(kInactivePoint);
  return SpaceSpec(product_text(cod) + "+" + kInactivePoint, SpaceRole::Other, std::move(points));
}

FiniteKernel gate(const FiniteKernel& base, const std::vector<FiniteKernel>& context,
                  const ContextPredicate& holds) {
  const std::size_t width = base.cod_size();
  std::vector<std::vector<double>> rows;
  rows.reserve(base.dom_size());
  std::vector<FiniteDist> outputs;
  for (std::size_t x = 0; x < base.dom_size(); ++x) {
    outputs.clear();
    for (const auto& c : context) outputs.push_back(FiniteDist{c.cod(), c.row(x)});
    std::vector<double> row(width + 1, 0.0);
    if (holds(outputs)) {
      std::copy(base.row(x).begin(), base.row(x).end(), row.begin());
    } else {
      row[width] = 1.0;
    }
    rows.push_back(std::move(row));
  }
  return FiniteKernel(base.dom(), {adjoin_inactive(base.cod())}, std::move(rows));
}

FiniteKernel interpret_nf(const SchemaTerm& t, const std::map<std::string, ImplementedSchema>& bind,
                          const InterpretOptions& options) {
  switch (t.op()) {
    case TermOp::Atomic:
    case TermOp::Encap: {
      const auto& name = t.is(TermOp::Atomic) ? t.id() : t.key();
      auto it = bind.find(name);
      if (it == bind.end()) fail(ErrorCode::UnboundAtomic, "no implementation bound to " + name);
      if (!(it->second.term.type() == t.type())) {
        fail(ErrorCode::TypeMismatch, "binding for " + name + " has type " +
                                          syntax::type_signature(it->second.term.type()));
      }
      return model(it->second);
    }
    case TermOp::Null:
      return identity_kernel(t.type().dom);
    case TermOp::Par:
    case TermOp::Seq: {
      auto k = interpret_nf(t.children().front(), bind, options);
      for (std::size_t i = 1; i < t.children().size(); ++i) {
        k = kernel_product(k, interpret_nf(t.children()[i], bind, options));
      }
      if (t.is(TermOp::Seq)) {
        std::vector<std::string> order;
        for (const auto& c : t.children()) order.push_back(c.key());
        k.set_sequence(std::move(order));
      }
      return k;
    }
    case TermOp::Ctx: {
      auto base = interpret_nf(t.ctx_base(), bind, options);
      std::vector<FiniteKernel> context;
      for (const auto& c : t.ctx_context()) {
        auto k = interpret_nf(c, bind, options);
        if (k.dom() != base.dom()) {
          fail(ErrorCode::TypeMismatch, "context schema " + c.key() + " does not share the base domain");
        }
        context.push_back(std::move(k));
      }
      auto it = options.predicates.find(options.context_predicate);
      if (it == options.predicates.end()) {
        fail(ErrorCode::UnresolvedTarget, "no context predicate named " + options.context_predicate);
      }
      return gate(base, context, it->second);
    }
  }
  fail(ErrorCode::InvalidArgument, "unreachable term op");
}

}  // namespace

FiniteDist make_dist(ProductSpace space, std::vector<double> probs) {
  if (probs.size() != cardinality(space)) {
    fail(ErrorCode::ShapeMismatch, "distribution size does not match its space");
  }
  check_row(probs, "distribution");
  return FiniteDist{std::move(space), std::move(probs)};
}

FiniteDist dirac(const ProductSpace& space, const std::string& point) {
  auto idx = point_index(space, point);
  if (!idx) fail(ErrorCode::UnknownPoint, "'" + point + "' is not a point of " + product_text(space));
  std::vector<double> probs(cardinality(space), 0.0);
  probs[*idx] = 1.0;
  return FiniteDist{space, std::move(probs)};
}

FiniteDist dirac(const SpaceSpec& space, const std::string& point) {
  return dirac(ProductSpace{space}, point);
}

FiniteKernel::FiniteKernel(ProductSpace dom, ProductSpace cod, std::vector<std::vector<double>> rows)
    : dom_(std::move(dom)), cod_(std::move(cod)), rows_(std::move(rows)) {
  if (rows_.size() != cardinality(dom_)) {
    fail(ErrorCode::ShapeMismatch, "kernel needs one row per domain point");
  }
  const std::size_t width = cardinality(cod_);
  for (std::size_t x = 0; x < rows_.size(); ++x) {
    if (rows_[x].size() != width) fail(ErrorCode::ShapeMismatch, "kernel row of the wrong width");
    check_row(rows_[x], "kernel row " + std::to_string(x));
  }
}

FiniteDist FiniteKernel::at(const std::string& point) const {
  auto idx = point_index(dom_, point);
  if (!idx) fail(ErrorCode::UnknownPoint, "'" + point + "' is not a point of " + product_text(dom_));
  return FiniteDist{cod_, rows_[*idx]};
}

FiniteKernel identity_kernel(const ProductSpace& space) {
  const std::size_t n = cardinality(space);
  std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) rows[i][i] = 1.0;
  return FiniteKernel(space, space, std::move(rows));
}

FiniteKernel kernel_compose(const FiniteKernel& f, const FiniteKernel& g) {
  if (f.cod() != g.dom()) {
    fail(ErrorCode::DomainMismatch,
         "codomain " + product_text(f.cod()) + " does not match domain " + product_text(g.dom()));
  }
  const std::size_t nz = g.cod_size();
  std::vector<std::vector<double>> rows(f.dom_size(), std::vector<double>(nz, 0.0));
  for (std::size_t x = 0; x < f.dom_size(); ++x) {
    const auto& fx = f.row(x);
    for (std::size_t y = 0; y < fx.size(); ++y) {
      if (fx[y] == 0) continue;
      const auto& gy = g.row(y);
      for (std::size_t z = 0; z < nz; ++z) rows[x][z] += fx[y] * gy[z];
    }
  }
  return FiniteKernel(f.dom(), g.cod(), std::move(rows));
}

FiniteKernel kernel_product(const FiniteKernel& f, const FiniteKernel& g) {
  ProductSpace dom = f.dom();
  dom.insert(dom.end(), g.dom().begin(), g.dom().end());
  ProductSpace cod = f.cod();
  cod.insert(cod.end(), g.cod().begin(), g.cod().end());
  const std::size_t w1 = f.cod_size();
  const std::size_t w2 = g.cod_size();
  std::vector<std::vector<double>> rows;
  rows.reserve(f.dom_size() * g.dom_size());
  for (std::size_t x1 = 0; x1 < f.dom_size(); ++x1) {
    for (std::size_t x2 = 0; x2 < g.dom_size(); ++x2) {
      std::vector<double> row(w1 * w2);
      for (std::size_t y1 = 0; y1 < w1; ++y1) {
        for (std::size_t y2 = 0; y2 < w2; ++y2) row[y1 * w2 + y2] = f.row(x1)[y1] * g.row(x2)[y2];
      }
      rows.push_back(std::move(row));
    }
  }
  return FiniteKernel(std::move(dom), std::move(cod), std::move(rows));
}

FiniteKernel model(const ImplementedSchema& s) {
  if (s.lang.name() != "tabular") {
    fail(ErrorCode::UnsupportedLanguage, "no model for language " + s.lang.name());
  }
  const auto& type = s.term.type();
  if (s.deterministic()) {
    std::vector<double> grid = s.params.values;
    std::sort(grid.begin(), grid.end(), real_order);
    std::vector<std::string> points;
    for (double v : grid) {
      auto label = format_real(v);
      if (points.empty() || points.back() != label) points.push_back(std::move(label));
    }
    const auto& cod_label = type.cod.empty() ? std::string("R") : type.cod[0].label();
    SpaceSpec cod(cod_label, SpaceRole::Real, points);
    std::vector<std::vector<double>> rows;
    for (double v : s.params.values) {
      std::vector<double> row(points.size(), 0.0);
      row[*cod.index_of(format_real(v))] = 1.0;
      rows.push_back(std::move(row));
    }
    return FiniteKernel(type.dom, {std::move(cod)}, std::move(rows));
  }
  const std::size_t width = s.layout.row_width;
  std::vector<std::vector<double>> rows;
  for (std::size_t r = 0; r * width < s.params.size(); ++r) {
    rows.emplace_back(s.params.values.begin() + r * width, s.params.values.begin() + (r + 1) * width);
  }
  return FiniteKernel(type.dom, type.cod, std::move(rows));
}

bool all_contexts_hold(std::span<const FiniteDist> outputs) {
  for (const auto& d : outputs) {
    double mass = 0;
    for (std::size_t i = 0; i < d.probs.size(); ++i) {
      auto label = point_label(d.space, i);
      if (label == "true" || label == "1") mass += d.probs[i];
    }
    if (mass < 0.5) return false;
  }
  return true;
}

FiniteKernel interpret(const SchemaTerm& term, const std::map<std::string, ImplementedSchema>& bind,
                       const InterpretOptions& options) {
  return interpret_nf(syntax::normalize(term), bind, options);
}

std::vector<EvaluatedInstance> inst_enumerate(const ImplementedSchema& s) {
  auto k = model(s);
  std::vector<EvaluatedInstance> out;
  for (std::size_t x = 0; x < k.dom_size(); ++x) {
    for (std::size_t y = 0; y < k.cod_size(); ++y) {
      double w = k.row(x)[y];
      if (w > 0) out.push_back({point_label(k.dom(), x), point_label(k.cod(), y), w});
    }
  }
  return out;
}

std::vector<EvaluatedInstance> inst_reindex(const ImplMorphism& m,
                                            std::span<const EvaluatedInstance> instances) {
  std::vector<EvaluatedInstance> out;
  out.reserve(instances.size());
  for (const auto& inst : instances) {
    out.push_back({m.pull_dom.apply(inst.input), m.pull_cod.apply(inst.output), inst.weight});
  }
  return out;
}

FiniteDist eval(const ImplementedSchema& s, const std::string& input) { return model(s).at(input); }

std::string sample(const ImplementedSchema& s, const std::string& input, std::uint64_t seed) {
  auto dist = eval(s, input);
  Rng rng(mix_seed(seed, input));
  return point_label(dist.space, sample_index(dist.probs, rng.uniform01()));
}

nlohmann::json to_json(const FiniteKernel& k) {
  return {{"dom", to_json(std::span(k.dom()))}, {"cod", to_json(std::span(k.cod()))}, {"rows", k.rows()}};
}

FiniteKernel kernel_from_json(const nlohmann::json& j) {
  try {
    return FiniteKernel(product_from_json(j.at("dom")), product_from_json(j.at("cod")),
                        j.at("rows").get<std::vector<std::vector<double>>>());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("kernel: ") + e.what());
  }
}

nlohmann::json to_json(const EvaluatedInstance& inst) {
  return {{"input", inst.input}, {"output", inst.output}, {"weight", inst.weight}};
}

EvaluatedInstance instance_from_json(const nlohmann::json& j) {
  try {
    return {j.at("input").get<std::string>(), j.at("output").get<std::string>(),
            j.at("weight").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("instance: ") + e.what());
  }
}

}  // namespace schemacalc::sem
