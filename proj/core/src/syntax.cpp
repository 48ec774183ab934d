#include "schemacalc/syntax.hpp"

#include <algorithm>

#include "schemacalc/error.hpp"

namespace schemacalc::syntax {

namespace {

constexpr const char* kKindNames[] = {"perceptual", "motor", "goal", "predictive", "abstract"};
constexpr const char* kOpNames[] = {"atomic", "null", "par", "seq", "encap", "ctx"};
constexpr std::string_view kReservedIdChars = "[]{}();|:<>*,";

bool all_roles(const ProductSpace& p, std::initializer_list<SpaceRole> allowed) {
  if (p.empty()) return false;
  return std::all_of(p.begin(), p.end(), [&](const SpaceSpec& s) {
    return std::find(allowed.begin(), allowed.end(), s.role()) != allowed.end();
  });
}

std::string labels(const ProductSpace& p) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += '*';
    out += p[i].label();
  }
  return out.empty() ? "1" : out;
}

ProductSpace concat(const std::vector<SchemaTerm>& children, bool domain) {
  ProductSpace out;
  for (const auto& c : children) {
    const auto& side = domain ? c.type().dom : c.type().cod;
    out.insert(out.end(), side.begin(), side.end());
  }
  return out;
}

ProductSpace union_by_label(const std::vector<SchemaTerm>& children, bool domain) {
  ProductSpace out;
  for (const auto& c : children) {
    for (const auto& s : domain ? c.type().dom : c.type().cod) {
      bool seen = std::any_of(out.begin(), out.end(),
                              [&](const SpaceSpec& o) { return o.label() == s.label(); });
      if (!seen) out.push_back(s);
    }
  }
  return out;
}

SchemaType composite_type(TermOp op, const std::vector<SchemaTerm>& children) {
  if (op == TermOp::Ctx) return children.front().type();
  SchemaType t;
  if (op == TermOp::Encap) {
    t.kind = SchemaKind::Abstract;
    t.dom = union_by_label(children, true);
    t.cod = union_by_label(children, false);
    return t;
  }
  t.kind = children.front().type().kind;
  for (const auto& c : children) {
    if (c.type().kind != t.kind) t.kind = SchemaKind::Abstract;
  }
  t.dom = concat(children, true);
  t.cod = concat(children, false);
  return t;
}

std::string join_keys(std::span<const SchemaTerm> terms) {
  std::string out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) out += ';';
    out += terms[i].key();
  }
  return out;
}

bool is_collection(TermOp op) {
  return op == TermOp::Par || op == TermOp::Seq || op == TermOp::Encap;
}

void sort_unique(std::vector<SchemaTerm>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::vector<SchemaTerm> sorted_context(const SchemaTerm& t) {
  auto c = t.ctx_context();
  return {c.begin(), c.end()};
}

bool proper_subcollection(TermOp op, const std::vector<SchemaTerm>& inner,
                          const std::vector<SchemaTerm>& outer) {
  if (inner.size() < 2 || inner.size() >= outer.size()) return false;
  if (op == TermOp::Seq) {
    return std::search(outer.begin(), outer.end(), inner.begin(), inner.end()) != outer.end();
  }
  // Par children form a sorted multiset, Encap children a sorted set.
  return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

bool specializes_nf(const SchemaTerm& a, const SchemaTerm& b) {
  if (a == b) return true;
  if (b.is(TermOp::Ctx)) {
    if (!a.is(TermOp::Ctx) || a.ctx_base() != b.ctx_base()) return false;
    auto ac = sorted_context(a);
    auto bc = sorted_context(b);
    return std::includes(ac.begin(), ac.end(), bc.begin(), bc.end());
  }
  if (a.is(TermOp::Ctx) && specializes_nf(a.ctx_base(), b)) return true;
  if (is_collection(b.op())) {
    for (const auto& c : b.children()) {
      if (specializes_nf(a, c)) return true;
    }
    if (a.op() == b.op() && proper_subcollection(b.op(), a.children(), b.children())) return true;
  }
  return false;
}

}  // namespace

struct SchemaTerm::Node {
  TermOp op;
  std::string id;
  SchemaType type;
  std::vector<SchemaTerm> children;
  std::string key;
};

std::string to_string(SchemaKind kind) { return kKindNames[static_cast<int>(kind)]; }

SchemaKind schema_kind_from_string(const std::string& text) {
  for (int i = 0; i < 5; ++i) {
    if (text == kKindNames[i]) return static_cast<SchemaKind>(i);
  }
  fail(ErrorCode::ParseError, "unknown schema kind '" + text + "'");
}

std::string to_string(TermOp op) { return kOpNames[static_cast<int>(op)]; }

void validate_type(const SchemaType& t) {
  using R = SpaceRole;
  auto reject = [&](const std::string& why) {
    fail(ErrorCode::MalformedType, to_string(t.kind) + " schema " + why);
  };
  switch (t.kind) {
    case SchemaKind::Perceptual:
      if (!all_roles(t.dom, {R::Sensor})) reject("needs a sensor-space domain");
      if (!all_roles(t.cod, {R::Observation})) reject("needs an observation codomain");
      break;
    case SchemaKind::Motor:
      if (!all_roles(t.dom, {R::Decision})) reject("needs a decision-space domain");
      if (!all_roles(t.cod, {R::Effector})) reject("needs an effector codomain");
      break;
    case SchemaKind::Goal:
      if (!all_roles(t.dom, {R::Observation, R::Decision})) {
        reject("needs an observation/decision domain");
      }
      if (t.cod.size() != 1 || t.cod[0].role() != R::Real) reject("needs a single real-grid codomain");
      for (const auto& p : t.cod[0].points()) {
        if (!parse_real(p)) reject("real grid point '" + p + "' is not numeric");
      }
      break;
    case SchemaKind::Predictive:
      if (!all_roles(t.dom, {R::Observation, R::Decision, R::Hidden, R::Goal}) ||
          !all_roles(t.cod, {R::Observation, R::Decision, R::Hidden, R::Goal})) {
        reject("must map between observation/decision/hidden/goal spaces");
      }
      break;
    case SchemaKind::Abstract:
      break;
  }
}

std::string type_signature(const SchemaType& t) {
  static constexpr char kLetter[] = {'P', 'M', 'G', 'R', 'A'};
  return std::string(1, kLetter[static_cast<int>(t.kind)]) + "(" + labels(t.dom) + "->" +
         labels(t.cod) + ")";
}

TermOp SchemaTerm::op() const { return node_->op; }
const std::string& SchemaTerm::id() const { return node_->id; }
const SchemaType& SchemaTerm::type() const { return node_->type; }
const std::vector<SchemaTerm>& SchemaTerm::children() const { return node_->children; }
const std::string& SchemaTerm::key() const { return node_->key; }

const SchemaTerm& SchemaTerm::ctx_base() const {
  if (op() != TermOp::Ctx) fail(ErrorCode::InvalidArgument, "ctx_base on a non-context term");
  return node_->children.front();
}

std::span<const SchemaTerm> SchemaTerm::ctx_context() const {
  if (op() != TermOp::Ctx) fail(ErrorCode::InvalidArgument, "ctx_context on a non-context term");
  return std::span<const SchemaTerm>(node_->children).subspan(1);
}

SchemaTerm SchemaTerm::raw(TermOp op, std::string id, SchemaType type,
                           std::vector<SchemaTerm> children) {
  auto node = std::make_shared<Node>();
  node->op = op;
  switch (op) {
    case TermOp::Atomic:
      if (id.empty() || id.find_first_of(kReservedIdChars) != std::string::npos) {
        fail(ErrorCode::InvalidArgument, "invalid atomic schema id '" + id + "'");
      }
      if (!children.empty()) fail(ErrorCode::InvalidArgument, "atomic schema with children");
      node->key = id + ":" + type_signature(type);
      node->id = std::move(id);
      node->type = std::move(type);
      break;
    case TermOp::Null:
      if (!children.empty()) fail(ErrorCode::InvalidArgument, "null schema with children");
      type.kind = SchemaKind::Abstract;
      type.cod = type.dom;
      node->key = "0(" + labels(type.dom) + ")";
      node->type = std::move(type);
      break;
    case TermOp::Par:
    case TermOp::Seq:
    case TermOp::Encap:
      if (children.empty()) fail(ErrorCode::InvalidArgument, to_string(op) + " without components");
      node->type = composite_type(op, children);
      node->key = (op == TermOp::Par   ? "par[" + join_keys(children) + "]"
                   : op == TermOp::Seq ? "seq[" + join_keys(children) + "]"
                                       : "enc{" + join_keys(children) + "}");
      node->children = std::move(children);
      break;
    case TermOp::Ctx:
      if (children.empty()) fail(ErrorCode::InvalidArgument, "ctx without a base schema");
      node->type = composite_type(op, children);
      node->key = "ctx(" + children.front().key() + "|{" +
                  join_keys(std::span<const SchemaTerm>(children).subspan(1)) + "})";
      node->children = std::move(children);
      break;
  }
  return SchemaTerm(std::move(node));
}

SchemaTerm make_atomic(const std::string& id, const SchemaType& type) {
  validate_type(type);
  return SchemaTerm::raw(TermOp::Atomic, id, type, {});
}

SchemaTerm make_null(const ProductSpace& space) {
  return SchemaTerm::raw(TermOp::Null, "", SchemaType{SchemaKind::Abstract, space, space}, {});
}

SchemaTerm normalize(const SchemaTerm& t) {
  switch (t.op()) {
    case TermOp::Atomic:
    case TermOp::Null:
      return t;
    case TermOp::Par:
    case TermOp::Seq: {
      std::vector<SchemaTerm> flat;
      std::vector<SchemaTerm> nulls;
      for (const auto& c : t.children()) {
        auto n = normalize(c);
        if (n.is(TermOp::Null)) {
          nulls.push_back(n);
        } else if (n.op() == t.op()) {
          flat.insert(flat.end(), n.children().begin(), n.children().end());
        } else {
          flat.push_back(n);
        }
      }
      // Only units left: keep the least one so the result does not depend on
      // operand order.
      if (flat.empty()) return *std::min_element(nulls.begin(), nulls.end());
      if (flat.size() == 1) return flat.front();
      if (t.is(TermOp::Par)) std::sort(flat.begin(), flat.end());
      return SchemaTerm::raw(t.op(), "", {}, std::move(flat));
    }
    case TermOp::Encap: {
      std::vector<SchemaTerm> flat;
      for (const auto& c : t.children()) {
        auto n = normalize(c);
        if (n.is(TermOp::Encap)) {
          flat.insert(flat.end(), n.children().begin(), n.children().end());
        } else {
          flat.push_back(n);
        }
      }
      sort_unique(flat);
      if (flat.size() == 1) return flat.front();
      return SchemaTerm::raw(TermOp::Encap, "", {}, std::move(flat));
    }
    case TermOp::Ctx: {
      auto base = normalize(t.ctx_base());
      std::vector<SchemaTerm> context;
      for (const auto& c : t.ctx_context()) context.push_back(normalize(c));
      if (base.is(TermOp::Ctx)) {
        context.insert(context.end(), base.ctx_context().begin(), base.ctx_context().end());
        base = base.ctx_base();
      }
      sort_unique(context);
      if (context.empty()) return base;
      std::vector<SchemaTerm> children{base};
      children.insert(children.end(), context.begin(), context.end());
      return SchemaTerm::raw(TermOp::Ctx, "", {}, std::move(children));
    }
  }
  return t;
}

bool term_equal(const SchemaTerm& a, const SchemaTerm& b) { return normalize(a) == normalize(b); }

SchemaTerm comb_par(const SchemaTerm& a, const SchemaTerm& b) {
  return normalize(SchemaTerm::raw(TermOp::Par, "", {}, {a, b}));
}

SchemaTerm comb_seq(const SchemaTerm& a, const SchemaTerm& b) {
  return normalize(SchemaTerm::raw(TermOp::Seq, "", {}, {a, b}));
}

SchemaTerm encap(const SchemaTerm& a, const SchemaTerm& b) {
  return normalize(SchemaTerm::raw(TermOp::Encap, "", {}, {a, b}));
}

SchemaTerm ctx(const SchemaTerm& base, std::span<const SchemaTerm> context) {
  std::vector<SchemaTerm> children{base};
  children.insert(children.end(), context.begin(), context.end());
  return normalize(SchemaTerm::raw(TermOp::Ctx, "", {}, std::move(children)));
}

SchemaTerm ctx(const SchemaTerm& base, std::initializer_list<SchemaTerm> context) {
  return ctx(base, std::span<const SchemaTerm>(context.begin(), context.size()));
}

std::pair<SchemaTerm, SchemaTerm> ref(const SchemaTerm& composite) {
  auto n = normalize(composite);
  if (!is_collection(n.op())) {
    fail(ErrorCode::NotDecomposable, "cannot refactor " + to_string(n.op()) + " schema " + n.key());
  }
  const auto& cs = n.children();
  std::vector<SchemaTerm> rest(cs.begin() + 1, cs.end());
  auto tail = rest.size() == 1 ? rest.front()
                               : normalize(SchemaTerm::raw(n.op(), "", {}, std::move(rest)));
  return {cs.front(), tail};
}

bool specializes(const SchemaTerm& a, const SchemaTerm& b) {
  return specializes_nf(normalize(a), normalize(b));
}

bool is_dual(const SchemaTerm& p, const SchemaTerm& q) {
  if (p.type().kind != SchemaKind::Predictive || q.type().kind != SchemaKind::Predictive) {
    fail(ErrorCode::NotPredictive, "duality is defined between predictive schemas only");
  }
  return p.type().dom == q.type().cod && p.type().cod == q.type().dom;
}

SchemaSet::SchemaSet(std::initializer_list<SchemaTerm> terms) {
  for (const auto& t : terms) *this = add(*this, t);
}

bool SchemaSet::contains(const SchemaTerm& term) const { return elems_.count(normalize(term)) > 0; }

SchemaSet add(const SchemaSet& set, const SchemaTerm& term) {
  auto n = normalize(term);
  if (n.is(TermOp::Null)) return set;
  SchemaSet out = set;
  out.elems_.insert(std::move(n));
  return out;
}

SchemaSet add(const SchemaSet& set, const SchemaSet& batch) {
  SchemaSet out = set;
  for (const auto& t : batch.elements()) out = add(out, t);
  return out;
}

SchemaSet del(const SchemaSet& set, const SchemaTerm& term) {
  SchemaSet out = set;
  out.elems_.erase(normalize(term));
  return out;
}

SchemaSet del(const SchemaSet& set, const SchemaSet& batch) {
  SchemaSet out = set;
  for (const auto& t : batch.elements()) out = del(out, t);
  return out;
}

nlohmann::json to_json(const SchemaType& type) {
  return {{"kind", to_string(type.kind)}, {"dom", to_json(std::span(type.dom))},
          {"cod", to_json(std::span(type.cod))}};
}

SchemaType type_from_json(const nlohmann::json& j) {
  try {
    return SchemaType{schema_kind_from_string(j.at("kind").get<std::string>()),
                      product_from_json(j.at("dom")), product_from_json(j.at("cod"))};
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("schema type: ") + e.what());
  }
}

nlohmann::json to_json(const SchemaTerm& term) {
  nlohmann::json j;
  j["op"] = to_string(term.op());
  switch (term.op()) {
    case TermOp::Atomic:
      j["id"] = term.id();
      j["type"] = to_json(term.type());
      break;
    case TermOp::Null:
      j["type"] = to_json(term.type());
      break;
    default: {
      auto arr = nlohmann::json::array();
      for (const auto& c : term.children()) arr.push_back(to_json(c));
      j["children"] = std::move(arr);
    }
  }
  return j;
}

SchemaTerm term_from_json(const nlohmann::json& j) {
  try {
    auto op_name = j.at("op").get<std::string>();
    for (int i = 0; i < 6; ++i) {
      if (op_name != kOpNames[i]) continue;
      auto op = static_cast<TermOp>(i);
      if (op == TermOp::Atomic) {
        return make_atomic(j.at("id").get<std::string>(), type_from_json(j.at("type")));
      }
      if (op == TermOp::Null) return make_null(type_from_json(j.at("type")).dom);
      std::vector<SchemaTerm> children;
      for (const auto& c : j.at("children")) children.push_back(term_from_json(c));
      return SchemaTerm::raw(op, "", {}, std::move(children));
    }
    fail(ErrorCode::ParseError, "unknown term op '" + op_name + "'");
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("schema term: ") + e.what());
  }
}

}  // namespace schemacalc::syntax
