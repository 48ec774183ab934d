#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "schemacalc/action.hpp"
#include "schemacalc/impl.hpp"
#include "schemacalc/mind.hpp"

/// Tabular value iteration as a cognitive module: transition, reward and
/// value schemas, the Bellman update as a vertical Update, and its loop.
namespace schemacalc::vi {

using impl::ParamTensor;

inline constexpr double kDefaultDelta = 1e-8;
inline constexpr std::size_t kDefaultMaxIter = 10000;
inline constexpr double kLiftingTolerance = 1e-12;

struct TabularMdp {
  SpaceSpec states;
  SpaceSpec actions;
  /// T(o,d,o'), shape [|O|,|D|,|O|], stochastic over o'.
  ParamTensor transition;
  /// R(o,d,o'), shape [|O|,|D|,|O|].
  ParamTensor reward;
  double gamma = 0.9;
  double delta = kDefaultDelta;

  std::size_t n_states() const { return states.size(); }
  std::size_t n_actions() const { return actions.size(); }
  double T(std::size_t o, std::size_t d, std::size_t o2) const {
    return transition[(o * n_actions() + d) * n_states() + o2];
  }
  double R(std::size_t o, std::size_t d, std::size_t o2) const {
    return reward[(o * n_actions() + d) * n_states() + o2];
  }
};

/// Throws ShapeMismatch, NonStochasticRow or InvalidArgument.
void validate(const TabularMdp& mdp);

/// θ(o) ← max_d Σ_o' T(o,d,o')·(R(o,d,o') + γ θ(o')); ties go to the lowest
/// action index.
ParamTensor bellman_update(const ParamTensor& theta, const TabularMdp& mdp);

/// B̂W(o) = max_d ( r(o,d) + γ E_{T(o,d)}[W] ) with r(o,d) = Σ_o' T·R, on
/// plain vectors.
std::vector<double> bellman_operator(const std::vector<double>& w, const TabularMdp& mdp);

using UpdateRule = std::function<ParamTensor(const ParamTensor&, const TabularMdp&)>;

/// Model(Update(V)) == B̂(Model(V)) within kLiftingTolerance. `rule`
/// replaces the update, so a corrupted rule can be checked to fail.
bool lifting_check(const ParamTensor& theta, const TabularMdp& mdp,
                   const UpdateRule& rule = bellman_update);

/// The per-state values of a Dirac kernel produced by model().
std::vector<double> dirac_values(const sem::FiniteKernel& k);

struct ViResult {
  ParamTensor values;
  /// Sup-norm change of each iteration.
  std::vector<double> trace;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Runs the module's Loop workflow through the workflow engine.
ViResult run_vi(const TabularMdp& mdp, const ParamTensor& theta0,
                std::size_t max_iter = kDefaultMaxIter);
/// The same iteration written as a plain loop.
ViResult run_vi_direct(const TabularMdp& mdp, const ParamTensor& theta0,
                       std::size_t max_iter = kDefaultMaxIter);

/// argmax_d Σ_o' T(R + γV); lowest index on ties.
std::vector<std::size_t> greedy_policy(const ParamTensor& values, const TabularMdp& mdp);

syntax::SchemaType transition_type(const TabularMdp& mdp);
syntax::SchemaType reward_type(const TabularMdp& mdp);
syntax::SchemaType value_type(const TabularMdp& mdp, const ParamTensor& theta0);

/// Mind holding schemas "T", "R", "V" and the module "value_iteration".
mind::MindState make_vi_mind(const TabularMdp& mdp, const ParamTensor& theta0,
                             std::size_t max_iter = kDefaultMaxIter);
/// Loop(sup_change_below(V) < δ, update.bellman(V; T, R)).
wf::Workflow make_vi_workflow(const TabularMdp& mdp, std::size_t max_iter = kDefaultMaxIter);

/// Adds update.bellman {gamma} (target V, reads T and R) and
/// vi.residual_below {gamma} (args V, T, R).
void register_ops(exec::OperatorRegistry& ops, exec::PredicateRegistry& preds);
exec::OperatorRegistry standard_operators();
exec::PredicateRegistry standard_predicates();

TabularMdp mdp_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TabularMdp& mdp);
/// {"states": [...], "values": [...]}
nlohmann::json value_table_json(const SpaceSpec& states, const ParamTensor& values);
/// "iteration,sup_norm_delta" rows.
std::string trace_csv(const std::vector<double>& trace);

}  // namespace schemacalc::vi
