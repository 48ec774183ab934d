#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "schemacalc/mind.hpp"
#include "schemacalc/workflow.hpp"

/// The action of workflows on mind states.
namespace schemacalc::exec {

using mind::MindState;

struct ExecContext;

/// Applies one Prim to the (already restricted) mind state.
using Operator = std::function<MindState(const MindState&, const wf::Prim&, ExecContext&)>;
/// Evaluates a condition on the states before and after a step.
using Predicate = std::function<bool(const MindState& before, const MindState& after,
                                     const wf::PredicateRef&, ExecContext&)>;

template <typename Fn>
class Registry {
 public:
  void add(const std::string& name, Fn fn) { entries_.insert_or_assign(name, std::move(fn)); }
  bool contains(const std::string& name) const { return entries_.count(name) > 0; }
  /// Throws UnresolvedTarget for unknown names.
  const Fn& find(const std::string& name) const;
  std::set<std::string> names() const;

 private:
  std::map<std::string, Fn> entries_;
};

using OperatorRegistry = Registry<Operator>;
using PredicateRegistry = Registry<Predicate>;

/// update.scale {factor}, update.shift {by}, update.mix {weight} (reads one
/// source schema of the same shape), del, comb_par (reads two stochastic
/// schemas, writes their product), mem.sample {n} (reads a schema, writes a
/// memory), mem.forget.
OperatorRegistry builtin_operators();
/// always_true, always_false, sup_change_below, mem_count_at_least,
/// table_max_below.
PredicateRegistry builtin_predicates();

struct ExecContext {
  OperatorRegistry operators = builtin_operators();
  PredicateRegistry predicates = builtin_predicates();
  std::uint64_t seed = 0;
  /// When set, every Prim must name an operator in it.
  std::optional<std::set<std::string>> signature;
  /// One line per Prim application and per loop iteration.
  std::vector<std::string> log;
  /// Numeric traces recorded by predicates, e.g. "sup_delta:V".
  std::map<std::string, std::vector<double>> series;
  bool max_iter_exceeded = false;
  /// Body applications performed by the most recent loop.
  std::size_t last_loop_iterations = 0;
};

/// w ⋆ M. Prim looks up its operator; Seq runs first then second; Par runs
/// each branch on the part of M it touches and merges the written parts
/// with ⊗; units are the identity; Loop is a bounded do-while. Throws
/// UnresolvedTarget, OverlappingParTargets or SignatureViolation.
MindState execute(const wf::Workflow& w, const MindState& m, ExecContext& ctx);

struct ModuleRun {
  MindState state;
  bool success = false;
  bool max_iter_exceeded = false;
  std::vector<std::string> log;
  std::map<std::string, std::vector<double>> series;
};

/// Executes one workflow of a module under its signature and evaluates the
/// module's success predicate on (M, result).
ModuleRun run_module(const MindState& m, const std::string& module, std::size_t workflow_index,
                     std::uint64_t seed, const OperatorRegistry& operators = builtin_operators(),
                     const PredicateRegistry& predicates = builtin_predicates());

/// Requires every id in `ids` to name a schema or memory of `m`.
void require_ids(const MindState& m, const std::vector<std::string>& ids, const std::string& who);

}  // namespace schemacalc::exec
