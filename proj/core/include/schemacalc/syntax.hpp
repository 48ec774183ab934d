#pragma once

#include <memory>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "schemacalc/space.hpp"

/// Syntactic schemas: typed terms built from atomic schemas and the
/// fundamental operators, compared through a canonical normal form.
namespace schemacalc::syntax {

enum class SchemaKind { Perceptual, Motor, Goal, Predictive, Abstract };

std::string to_string(SchemaKind kind);
SchemaKind schema_kind_from_string(const std::string& text);

struct SchemaType {
  SchemaKind kind = SchemaKind::Abstract;
  ProductSpace dom;
  ProductSpace cod;

  friend bool operator==(const SchemaType&, const SchemaType&) = default;
};

/// Throws MalformedType when the domain/codomain roles do not fit the kind:
/// perceptual is sensor -> observation, motor is decision -> effector, goal is
/// (observation|decision)^n -> one real grid, predictive draws both sides
/// from {observation, decision, hidden, goal}. Abstract accepts anything.
void validate_type(const SchemaType& type);

/// Compact signature text, e.g. "P(S->O)".
std::string type_signature(const SchemaType& type);

enum class TermOp { Atomic, Null, Par, Seq, Encap, Ctx };

std::string to_string(TermOp op);

/// Immutable schema term. Copies share structure. Equality and ordering are
/// structural, via `key()`; use `term_equal` for equality modulo the laws.
class SchemaTerm {
 public:
  TermOp op() const;
  /// Atomic identifier; empty for every other node.
  const std::string& id() const;
  const SchemaType& type() const;
  /// Components for Par/Seq/Encap. For Ctx: the base followed by the context.
  const std::vector<SchemaTerm>& children() const;
  const SchemaTerm& ctx_base() const;
  std::span<const SchemaTerm> ctx_context() const;
  /// Structural key of this exact tree (not normalized).
  const std::string& key() const;

  bool is(TermOp op) const { return this->op() == op; }

  /// Builds a node without applying any law. Used by the JSON reader and by
  /// tests that need un-normalized input.
  static SchemaTerm raw(TermOp op, std::string id, SchemaType type,
                        std::vector<SchemaTerm> children);

  friend bool operator==(const SchemaTerm& a, const SchemaTerm& b) { return a.key() == b.key(); }
  friend std::strong_ordering operator<=>(const SchemaTerm& a, const SchemaTerm& b) {
    return a.key() <=> b.key();
  }

 private:
  struct Node;
  explicit SchemaTerm(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

SchemaTerm make_atomic(const std::string& id, const SchemaType& type);
/// The null schema over `space`: identity X -> X.
SchemaTerm make_null(const ProductSpace& space);

SchemaTerm comb_par(const SchemaTerm& a, const SchemaTerm& b);
SchemaTerm comb_seq(const SchemaTerm& a, const SchemaTerm& b);
SchemaTerm encap(const SchemaTerm& a, const SchemaTerm& b);
SchemaTerm ctx(const SchemaTerm& base, std::span<const SchemaTerm> context);
SchemaTerm ctx(const SchemaTerm& base, std::initializer_list<SchemaTerm> context);

/// Splits a Par/Seq/Encap node into its first component and the rest.
/// Throws NotDecomposable on atomic, null and context nodes.
std::pair<SchemaTerm, SchemaTerm> ref(const SchemaTerm& composite);

/// Canonical form: Par flattened, Null-free and sorted; Seq flattened in
/// order and Null-free; Encap flattened, deduplicated and sorted; nested
/// contexts merged into one sorted set, empty context dropped. A Par or
/// Seq of units only becomes its least unit.
SchemaTerm normalize(const SchemaTerm& term);
bool term_equal(const SchemaTerm& a, const SchemaTerm& b);

/// Specialization order `a ⪯ b` over normal forms: the reflexive-transitive
/// closure of component-of-composite edges (Encap, Par, Seq, including
/// sub-collections reachable by nesting) and of context restriction
/// (`ctx(ψ, Φ2) ⪯ ctx(ψ, Φ1)` when `Φ1 ⊆ Φ2`).
bool specializes(const SchemaTerm& a, const SchemaTerm& b);

/// Predictive duality: dom(p) = cod(q) and cod(p) = dom(q).
bool is_dual(const SchemaTerm& p, const SchemaTerm& q);

/// Finite set of normalized schema terms.
class SchemaSet {
 public:
  SchemaSet() = default;
  SchemaSet(std::initializer_list<SchemaTerm> terms);

  bool contains(const SchemaTerm& term) const;
  std::size_t size() const { return elems_.size(); }
  bool empty() const { return elems_.empty(); }
  const std::set<SchemaTerm>& elements() const { return elems_; }

  friend bool operator==(const SchemaSet&, const SchemaSet&) = default;

 private:
  friend SchemaSet add(const SchemaSet&, const SchemaTerm&);
  friend SchemaSet del(const SchemaSet&, const SchemaTerm&);
  std::set<SchemaTerm> elems_;
};

SchemaSet add(const SchemaSet& set, const SchemaTerm& term);
SchemaSet add(const SchemaSet& set, const SchemaSet& batch);
SchemaSet del(const SchemaSet& set, const SchemaTerm& term);
SchemaSet del(const SchemaSet& set, const SchemaSet& batch);

nlohmann::json to_json(const SchemaType& type);
SchemaType type_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SchemaTerm& term);
/// Reads a term exactly as written; no normalization is applied.
SchemaTerm term_from_json(const nlohmann::json& j);

}  // namespace schemacalc::syntax
