#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

/// Workflow terms over named schema operators: sequential and parallel
/// products with their units, and a bounded do-while loop.
namespace schemacalc::wf {

/// A named condition resolved against the operator/predicate registries at
/// execution time.
struct PredicateRef {
  std::string name;
  /// Schema ids, memory names or other selectors the predicate reads.
  std::vector<std::string> args;
  double threshold = 0;
  std::map<std::string, double> params;

  friend bool operator==(const PredicateRef&, const PredicateRef&) = default;
};

/// One operator application. `targets` are the ids it may write (schemas or
/// memories); `reads` are the ids it only inspects.
struct Prim {
  std::string name;
  std::vector<std::string> targets;
  std::vector<std::string> reads;
  std::map<std::string, double> args;

  friend bool operator==(const Prim&, const Prim&) = default;
};

enum class WfOp { Prim, Seq, Par, UnitSeq, UnitPar, Loop };

std::string to_string(WfOp op);
WfOp wf_op_from_string(const std::string& text);

class Workflow {
 public:
  static Workflow unit_seq();
  static Workflow unit_par();
  /// Builds a node as written, without unit absorption.
  static Workflow raw_seq(Workflow first, Workflow second);
  static Workflow raw_par(Workflow left, Workflow right);

  WfOp op() const;
  /// Valid for Prim nodes only.
  const Prim& prim() const;
  /// Seq: {first, second}; Par: {left, right}; Loop: {body}.
  const std::vector<Workflow>& children() const;
  /// Valid for Loop nodes only.
  const PredicateRef& cond() const;
  std::size_t max_iter() const;

  bool is(WfOp op) const { return this->op() == op; }

 private:
  struct Node;
  explicit Workflow(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  friend Workflow wf_prim(Prim prim);
  friend Workflow wf_loop(PredicateRef cond, Workflow body, std::size_t max_iter);
  std::shared_ptr<const Node> node_;
};

Workflow wf_prim(Prim prim);
/// Runs `first`, then `second`. A UnitSeq operand is absorbed.
Workflow wf_seq(Workflow first, Workflow second);
/// A UnitPar operand is absorbed. Disjointness is checked at execution.
Workflow wf_par(Workflow left, Workflow right);
/// Throws InvalidArgument when max_iter is zero.
Workflow wf_loop(PredicateRef cond, Workflow body, std::size_t max_iter);

/// Ids a workflow may write, and ids it only reads (loop conditions
/// included).
struct Footprint {
  std::set<std::string> writes;
  std::set<std::string> reads;

  std::set<std::string> touched() const;
};

Footprint footprint(const Workflow& w);

/// True when one side writes something the other side touches.
bool conflicts(const Footprint& a, const Footprint& b);

/// Structural equality.
bool operator==(const Workflow& a, const Workflow& b);

struct RewriteResult {
  Workflow workflow;
  bool applied = false;
};

/// ζ at the root: Seq(Par(a,b), Par(c,d)) becomes Par(Seq(a,c), Seq(b,d))
/// when a∪c and b∪d do not conflict. Otherwise the input comes back with
/// `applied == false`.
RewriteResult interchange_rewrite(const Workflow& w);

/// Every operator name used by a Prim node.
std::set<std::string> operator_names(const Workflow& w);

nlohmann::json to_json(const PredicateRef& p);
PredicateRef predicate_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Workflow& w);
Workflow workflow_from_json(const nlohmann::json& j);

}  // namespace schemacalc::wf
