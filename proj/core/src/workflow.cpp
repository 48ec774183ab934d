#include "schemacalc/workflow.hpp"

#include <algorithm>

#include "schemacalc/error.hpp"

namespace schemacalc::wf {

struct Workflow::Node {
  WfOp op;
  Prim prim;
  std::vector<Workflow> children;
  PredicateRef cond;
  std::size_t max_iter = 0;
};

namespace {

constexpr const char* kOpNames[] = {"prim", "seq", "par", "unit_seq", "unit_par", "loop"};

bool intersects(const std::set<std::string>& a, const std::set<std::string>& b) {
  return std::any_of(a.begin(), a.end(), [&](const std::string& x) { return b.count(x) > 0; });
}

}  // namespace

std::string to_string(WfOp op) { return kOpNames[static_cast<int>(op)]; }

WfOp wf_op_from_string(const std::string& text) {
  for (int i = 0; i < 6; ++i) {
    if (text == kOpNames[i]) return static_cast<WfOp>(i);
  }
  fail(ErrorCode::ParseError, "unknown workflow op '" + text + "'");
}

Workflow Workflow::unit_seq() {
  static const Workflow unit(std::make_shared<const Node>(Node{WfOp::UnitSeq, {}, {}, {}, 0}));
  return unit;
}

Workflow Workflow::unit_par() {
  static const Workflow unit(std::make_shared<const Node>(Node{WfOp::UnitPar, {}, {}, {}, 0}));
  return unit;
}

Workflow Workflow::raw_seq(Workflow first, Workflow second) {
  return Workflow(std::make_shared<const Node>(
      Node{WfOp::Seq, {}, {std::move(first), std::move(second)}, {}, 0}));
}

Workflow Workflow::raw_par(Workflow left, Workflow right) {
  return Workflow(std::make_shared<const Node>(
      Node{WfOp::Par, {}, {std::move(left), std::move(right)}, {}, 0}));
}

WfOp Workflow::op() const { return node_->op; }
const Prim& Workflow::prim() const { return node_->prim; }
const std::vector<Workflow>& Workflow::children() const { return node_->children; }
const PredicateRef& Workflow::cond() const { return node_->cond; }
std::size_t Workflow::max_iter() const { return node_->max_iter; }

Workflow wf_prim(Prim prim) {
  if (prim.name.empty()) fail(ErrorCode::InvalidArgument, "operator name must be non-empty");
  return Workflow(std::make_shared<const Workflow::Node>(
      Workflow::Node{WfOp::Prim, std::move(prim), {}, {}, 0}));
}

Workflow wf_seq(Workflow first, Workflow second) {
  if (first.is(WfOp::UnitSeq)) return second;
  if (second.is(WfOp::UnitSeq)) return first;
  return Workflow::raw_seq(std::move(first), std::move(second));
}

Workflow wf_par(Workflow left, Workflow right) {
  if (left.is(WfOp::UnitPar)) return right;
  if (right.is(WfOp::UnitPar)) return left;
  return Workflow::raw_par(std::move(left), std::move(right));
}

Workflow wf_loop(PredicateRef cond, Workflow body, std::size_t max_iter) {
  if (max_iter == 0) fail(ErrorCode::InvalidArgument, "loop max_iter must be at least 1");
  return Workflow(std::make_shared<const Workflow::Node>(
      Workflow::Node{WfOp::Loop, {}, {std::move(body)}, std::move(cond), max_iter}));
}

std::set<std::string> Footprint::touched() const {
  auto out = writes;
  out.insert(reads.begin(), reads.end());
  return out;
}

Footprint footprint(const Workflow& w) {
  Footprint fp;
  switch (w.op()) {
    case WfOp::Prim:
      fp.writes.insert(w.prim().targets.begin(), w.prim().targets.end());
      fp.reads.insert(w.prim().reads.begin(), w.prim().reads.end());
      break;
    case WfOp::Loop:
      fp.reads.insert(w.cond().args.begin(), w.cond().args.end());
      [[fallthrough]];
    case WfOp::Seq:
    case WfOp::Par:
      for (const auto& c : w.children()) {
        auto sub = footprint(c);
        fp.writes.insert(sub.writes.begin(), sub.writes.end());
        fp.reads.insert(sub.reads.begin(), sub.reads.end());
      }
      break;
    case WfOp::UnitSeq:
    case WfOp::UnitPar:
      break;
  }
  for (const auto& id : fp.writes) fp.reads.erase(id);
  return fp;
}

bool conflicts(const Footprint& a, const Footprint& b) {
  return intersects(a.writes, b.touched()) || intersects(b.writes, a.touched());
}

bool operator==(const Workflow& a, const Workflow& b) {
  if (a.op() != b.op()) return false;
  switch (a.op()) {
    case WfOp::Prim:
      return a.prim() == b.prim();
    case WfOp::Loop:
      if (!(a.cond() == b.cond()) || a.max_iter() != b.max_iter()) return false;
      break;
    default:
      break;
  }
  return a.children() == b.children();
}

RewriteResult interchange_rewrite(const Workflow& w) {
  if (!w.is(WfOp::Seq)) return {w, false};
  const auto& first = w.children()[0];
  const auto& second = w.children()[1];
  if (!first.is(WfOp::Par) || !second.is(WfOp::Par)) return {w, false};
  const auto& a = first.children()[0];
  const auto& b = first.children()[1];
  const auto& c = second.children()[0];
  const auto& d = second.children()[1];
  auto left = Workflow::raw_seq(a, c);
  auto right = Workflow::raw_seq(b, d);
  if (conflicts(footprint(left), footprint(right))) return {w, false};
  return {Workflow::raw_par(std::move(left), std::move(right)), true};
}

std::set<std::string> operator_names(const Workflow& w) {
  std::set<std::string> out;
  if (w.is(WfOp::Prim)) out.insert(w.prim().name);
  for (const auto& c : w.children()) {
    auto sub = operator_names(c);
    out.insert(sub.begin(), sub.end());
  }
  return out;
}

nlohmann::json to_json(const PredicateRef& p) {
  nlohmann::json j{{"name", p.name}, {"args", p.args}, {"threshold", p.threshold}};
  if (!p.params.empty()) j["params"] = p.params;
  return j;
}

PredicateRef predicate_from_json(const nlohmann::json& j) {
  try {
    PredicateRef p;
    p.name = j.at("name").get<std::string>();
    p.args = j.value("args", std::vector<std::string>{});
    p.threshold = j.value("threshold", 0.0);
    p.params = j.value("params", std::map<std::string, double>{});
    return p;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("predicate: ") + e.what());
  }
}

nlohmann::json to_json(const Workflow& w) {
  nlohmann::json j{{"op", to_string(w.op())}};
  switch (w.op()) {
    case WfOp::Prim:
      j["name"] = w.prim().name;
      j["targets"] = w.prim().targets;
      j["reads"] = w.prim().reads;
      j["args"] = w.prim().args;
      return j;
    case WfOp::Loop:
      j["cond"] = to_json(w.cond());
      j["max_iter"] = w.max_iter();
      break;
    default:
      break;
  }
  if (!w.children().empty()) {
    auto& children = j["children"] = nlohmann::json::array();
    for (const auto& c : w.children()) children.push_back(to_json(c));
  }
  return j;
}

Workflow workflow_from_json(const nlohmann::json& j) {
  try {
    auto op = wf_op_from_string(j.at("op").get<std::string>());
    auto child = [&](std::size_t i) { return workflow_from_json(j.at("children").at(i)); };
    switch (op) {
      case WfOp::Prim:
        return wf_prim(Prim{j.at("name").get<std::string>(),
                            j.value("targets", std::vector<std::string>{}),
                            j.value("reads", std::vector<std::string>{}),
                            j.value("args", std::map<std::string, double>{})});
      case WfOp::Seq:
        return Workflow::raw_seq(child(0), child(1));
      case WfOp::Par:
        return Workflow::raw_par(child(0), child(1));
      case WfOp::UnitSeq:
        return Workflow::unit_seq();
      case WfOp::UnitPar:
        return Workflow::unit_par();
      case WfOp::Loop:
        return wf_loop(predicate_from_json(j.at("cond")), child(0),
                       j.at("max_iter").get<std::size_t>());
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("workflow: ") + e.what());
  }
  fail(ErrorCode::ParseError, "workflow: unreachable");
}

}  // namespace schemacalc::wf
