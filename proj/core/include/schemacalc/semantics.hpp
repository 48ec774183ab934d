#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "schemacalc/impl.hpp"

/// Finite Markov kernels: the finite-distribution restriction of the
/// Kleisli category of the probability monad, and the interpretation of
/// schemas in it.
namespace schemacalc::sem {

using impl::ImplementedSchema;
using impl::ImplMorphism;
using syntax::SchemaTerm;

inline constexpr double kProbTolerance = 1e-9;

/// Label of the point adjoined to a context-gated codomain.
inline constexpr const char* kInactivePoint = "⊥";

struct FiniteDist {
  ProductSpace space;
  std::vector<double> probs;

  double operator[](std::size_t i) const { return probs[i]; }
};

/// Validates non-negativity and unit mass within kProbTolerance.
FiniteDist make_dist(ProductSpace space, std::vector<double> probs);
FiniteDist dirac(const ProductSpace& space, const std::string& point);
FiniteDist dirac(const SpaceSpec& space, const std::string& point);

/// Row-stochastic table from the points of `dom` to distributions over `cod`.
class FiniteKernel {
 public:
  FiniteKernel(ProductSpace dom, ProductSpace cod, std::vector<std::vector<double>> rows);

  const ProductSpace& dom() const { return dom_; }
  const ProductSpace& cod() const { return cod_; }
  std::size_t dom_size() const { return rows_.size(); }
  std::size_t cod_size() const { return cardinality(cod_); }
  const std::vector<double>& row(std::size_t x) const { return rows_[x]; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  /// Distribution at the dom point with this label. Throws UnknownPoint.
  FiniteDist at(const std::string& point) const;

  /// Ordering metadata for serial combinations (component keys in order).
  const std::vector<std::string>& sequence() const { return sequence_; }
  void set_sequence(std::vector<std::string> keys) { sequence_ = std::move(keys); }

 private:
  ProductSpace dom_;
  ProductSpace cod_;
  std::vector<std::vector<double>> rows_;
  std::vector<std::string> sequence_;
};

FiniteKernel identity_kernel(const ProductSpace& space);

/// Kleisli composite g ∘ f: (g∘f)(x)(z) = Σ_y g(y)(z) f(x)(y).
/// Throws DomainMismatch unless f.cod == g.dom.
FiniteKernel kernel_compose(const FiniteKernel& f, const FiniteKernel& g);

/// (f ⊗ g)((x1,x2))((y1,y2)) = f(x1)(y1) g(x2)(y2).
FiniteKernel kernel_product(const FiniteKernel& f, const FiniteKernel& g);

/// Deterministic tables embed as Dirac kernels onto the grid of values that
/// occur in the table; stochastic tables are read row by row.
FiniteKernel model(const ImplementedSchema& s);

/// Activation test for a context: receives the evaluation of every context
/// schema at the current input.
using ContextPredicate = std::function<bool(std::span<const FiniteDist>)>;

/// Every context schema puts at least half its mass on a point labelled
/// "true" or "1".
bool all_contexts_hold(std::span<const FiniteDist> context_outputs);

struct InterpretOptions {
  std::map<std::string, ContextPredicate> predicates{{"holds", all_contexts_hold}};
  std::string context_predicate = "holds";
};

/// Interprets a term whose atomic leaves (or Encap nodes, by key) are bound
/// to implemented schemas. Par and Seq map to product kernels; Seq keeps its
/// component order as metadata. A context gates its base: when the predicate
/// fails the output is a point mass on the adjoined inactive point.
FiniteKernel interpret(const SchemaTerm& term, const std::map<std::string, ImplementedSchema>& bind,
                       const InterpretOptions& options = {});

struct EvaluatedInstance {
  std::string input;
  std::string output;
  double weight = 0;

  friend bool operator==(const EvaluatedInstance&, const EvaluatedInstance&) = default;
};

/// All (x, y, w) with w = model(s)(x)(y) > 0, in canonical order.
std::vector<EvaluatedInstance> inst_enumerate(const ImplementedSchema& s);
/// Pulls instances back along m's point maps.
std::vector<EvaluatedInstance> inst_reindex(const ImplMorphism& m,
                                            std::span<const EvaluatedInstance> instances);

FiniteDist eval(const ImplementedSchema& s, const std::string& input);
/// Inverse-CDF draw; depends only on (s, input, seed).
std::string sample(const ImplementedSchema& s, const std::string& input, std::uint64_t seed);

nlohmann::json to_json(const FiniteKernel& k);
FiniteKernel kernel_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EvaluatedInstance& inst);
EvaluatedInstance instance_from_json(const nlohmann::json& j);

}  // namespace schemacalc::sem
