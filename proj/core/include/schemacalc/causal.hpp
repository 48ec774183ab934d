#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "schemacalc/semantics.hpp"
#include "schemacalc/syntax.hpp"

/// Causal predictive schemas: discrete Bayesian networks over named
/// variables, arc operators, BIC scoring and the greedy structure search.
namespace schemacalc::causal {

inline constexpr double kDefaultEpsilon = 1e-6;
inline constexpr double kDefaultAlpha = 1.0;

struct Variable {
  std::string name;
  std::vector<std::string> domain;

  std::size_t size() const { return domain.size(); }
  friend bool operator==(const Variable&, const Variable&) = default;
};

using Edge = std::pair<std::size_t, std::size_t>;

/// Directed graph over nodes 0..n-1, stored as parent sets.
class Dag {
 public:
  explicit Dag(std::size_t n = 0);

  std::size_t size() const { return parents_.size(); }
  const std::set<std::size_t>& parents(std::size_t v) const { return parents_.at(v); }
  std::set<std::size_t> children(std::size_t v) const;
  bool has_edge(std::size_t u, std::size_t v) const { return parents_.at(v).count(u) > 0; }
  bool adjacent(std::size_t u, std::size_t v) const { return has_edge(u, v) || has_edge(v, u); }
  /// Sorted (u, v) pairs.
  std::vector<Edge> edges() const;
  std::size_t edge_count() const;
  /// True if a directed path leads from `from` to `to`.
  bool reaches(std::size_t from, std::size_t to) const;
  /// Topological order, lowest index first among ready nodes. Throws
  /// CycleCreated on a cyclic graph.
  std::vector<std::size_t> topological_order() const;

  /// Unchecked edits.
  void insert(std::size_t u, std::size_t v) { parents_.at(v).insert(u); }
  void erase(std::size_t u, std::size_t v) { parents_.at(v).erase(u); }

  friend bool operator==(const Dag&, const Dag&) = default;

 private:
  std::vector<std::set<std::size_t>> parents_;
};

/// Conditional table of one variable. Parents are sorted by variable index;
/// rows follow the row-major order of parent configurations (last parent
/// fastest), one probability per value of the variable.
struct Cpt {
  std::vector<std::size_t> parents;
  std::vector<std::vector<double>> rows;

  friend bool operator==(const Cpt&, const Cpt&) = default;
};

struct CausalSchema {
  std::vector<Variable> variables;
  Dag dag;
  std::vector<Cpt> cpts;

  /// Throws UnknownVariable.
  std::size_t index_of(const std::string& name) const;
};

/// Factorization invariant: acyclic DAG, one CPT per variable with parent
/// list equal to the DAG parents and stochastic rows of the right shape.
/// Throws CycleCreated, ShapeMismatch or NonStochasticRow.
void check_factorization(const CausalSchema& c);

/// Uniform CPTs for the given DAG.
CausalSchema make_uniform(std::vector<Variable> variables, Dag dag);

/// Variables named X0..X(n-1) with values "0".."k-1".
std::vector<Variable> numbered_variables(std::size_t n, std::size_t values);

struct Dataset {
  std::vector<Variable> variables;
  /// Value indices, one per variable.
  std::vector<std::vector<std::size_t>> rows;

  std::size_t index_of(const std::string& name) const;
};

/// Header row of variable names, then one row of value labels per sample.
/// Without `domains`, each domain is the sorted set of labels seen (numeric
/// order when every label is a real). Throws ParseError or UnknownValue.
Dataset dataset_from_csv(std::string_view text, const std::vector<Variable>* domains = nullptr);
std::string to_csv(const Dataset& data);

/// Joint distribution over the product of the variable spaces.
sem::FiniteDist joint(const CausalSchema& c);

/// Surgery: removes the edges into `var` and pins it to `value`. Throws
/// UnknownVariable or UnknownValue.
CausalSchema do_intervene(const CausalSchema& c, const std::string& var, const std::string& value);

/// Maximum-likelihood tables with add-alpha smoothing. Throws EmptyDataset.
Cpt fit_cpt(std::size_t v, const std::set<std::size_t>& parents, const Dataset& data, double alpha);
std::vector<Cpt> fit_mle(const Dag& dag, const Dataset& data, double alpha = kDefaultAlpha);

/// Arc operators. Tables of variables whose parents change are refit from
/// `data` when given, otherwise reset to uniform. Throw EdgePresent,
/// EdgeAbsent or CycleCreated.
CausalSchema arc_add(const CausalSchema& c, const std::string& u, const std::string& v,
                     const Dataset* data = nullptr, double alpha = kDefaultAlpha);
CausalSchema arc_delete(const CausalSchema& c, const std::string& u, const std::string& v,
                        const Dataset* data = nullptr, double alpha = kDefaultAlpha);
CausalSchema arc_reverse(const CausalSchema& c, const std::string& u, const std::string& v,
                         const Dataset* data = nullptr, double alpha = kDefaultAlpha);

/// Pa(v) = Pa(u) ∪ {u}. Throws EdgeAbsent unless u→v is present.
bool covered(const Dag& dag, std::size_t u, std::size_t v);

/// Decomposable BIC with a cache of local scores keyed by (v, parents).
class BicScorer {
 public:
  /// Throws EmptyDataset.
  explicit BicScorer(const Dataset& data);

  double local(std::size_t v, const std::set<std::size_t>& parents);
  double total(const Dag& dag);
  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

  /// Uncached computation.
  static double local_score(const Dataset& data, std::size_t v, const std::set<std::size_t>& parents);

 private:
  const Dataset* data_;
  std::map<std::pair<std::size_t, std::vector<std::size_t>>, double> cache_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

double score_bic(const Dag& dag, const Dataset& data);

enum class MoveKind { Add, Delete, Reverse };
std::string to_string(MoveKind kind);

struct Move {
  MoveKind kind;
  std::size_t source;
  std::size_t target;
  double delta_score = 0;
};

struct GesResult {
  CausalSchema model;
  std::vector<Move> trace;
  double score = 0;
  std::size_t forward_moves = 0;
  std::size_t backward_moves = 0;
};

/// Forward phase of single-arc additions, then a backward phase of deletions
/// and covered reversals, each step taking the best move while its score
/// gain exceeds epsilon. Gains within 1e-9 are ordered by (Add, Delete,
/// Reverse), then source name, then target name.
GesResult ges_run(const Dataset& data, double epsilon = kDefaultEpsilon,
                  double alpha = kDefaultAlpha);

struct Cpdag {
  std::size_t size = 0;
  std::set<Edge> directed;
  /// Stored with the smaller index first.
  std::set<Edge> undirected;

  friend bool operator==(const Cpdag&, const Cpdag&) = default;
};

/// v-structure arrows closed under Meek rules R1-R3.
Cpdag cpdag(const Dag& dag);
/// Same skeleton and same unshielded colliders.
bool markov_equivalent(const Dag& a, const Dag& b);
/// Triples (a, c, b) with a < b, a→c←b and a, b non-adjacent.
std::set<std::tuple<std::size_t, std::size_t, std::size_t>> v_structures(const Dag& dag);

/// Ancestral sampling in topological order.
Dataset sample_data(const CausalSchema& c, std::size_t n, std::uint64_t seed);

/// The DAG of `c` with nodes renumbered to follow `names`. Throws
/// UnknownVariable.
Dag dag_over(const CausalSchema& c, const std::vector<std::string>& names);

/// Encap of one predictive factor per variable (parents -> variable).
syntax::SchemaTerm structure_term(const CausalSchema& c);

nlohmann::json to_json(const CausalSchema& c);
CausalSchema causal_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Cpdag& g, const std::vector<Variable>& variables);
/// "step,move,edge,delta_score" rows.
std::string trace_csv(const std::vector<Move>& trace, const std::vector<Variable>& variables);

}  // namespace schemacalc::causal
