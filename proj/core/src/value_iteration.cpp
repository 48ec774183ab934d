#include "schemacalc/value_iteration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "schemacalc/error.hpp"

namespace schemacalc::vi {

namespace {

using syntax::SchemaKind;
using syntax::SchemaType;

SpaceSpec real_grid(const std::string& label, const std::vector<double>& values) {
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end(), [](double a, double b) {
    return a < b || (a == b && std::signbit(a) && !std::signbit(b));
  });
  std::vector<std::string> points;
  for (double v : sorted) {
    auto text = format_real(v);
    if (points.empty() || points.back() != text) points.push_back(std::move(text));
  }
  if (points.empty()) points.emplace_back("0");
  return SpaceSpec(label, SpaceRole::Real, std::move(points));
}

SpaceSpec with_role(const SpaceSpec& s, SpaceRole role) { return SpaceSpec(s.label(), role, s.points()); }

TabularMdp mdp_from_mind(const mind::MindState& m, const std::string& t_id, const std::string& r_id,
                         double gamma) {
  const auto& t = m.schema(t_id);
  const auto& r = m.schema(r_id);
  const auto& dom = t.term.type().dom;
  if (dom.size() != 2) fail(ErrorCode::TypeMismatch, t_id + " must map states x actions to states");
  TabularMdp mdp{dom[0], dom[1], t.params, r.params, gamma, kDefaultDelta};
  validate(mdp);
  return mdp;
}

exec::Operator bellman_operator_prim() {
  return [](const mind::MindState& m, const wf::Prim& p, exec::ExecContext&) {
    if (p.targets.size() != 1 || p.reads.size() != 2) {
      fail(ErrorCode::InvalidArgument, "update.bellman takes target [V] and reads [T, R]");
    }
    auto g = p.args.find("gamma");
    if (g == p.args.end()) fail(ErrorCode::InvalidArgument, "update.bellman needs a gamma argument");
    auto mdp = mdp_from_mind(m, p.reads[0], p.reads[1], g->second);
    const auto& v = m.schema(p.targets[0]);
    mind::MindState out = m;
    out.schemas.insert_or_assign(
        p.targets[0], impl::update(v, [&](const ParamTensor& t) { return bellman_update(t, mdp); }));
    return out;
  };
}

bool residual_below(const mind::MindState&, const mind::MindState& after, const wf::PredicateRef& p,
                    exec::ExecContext& ctx) {
  if (p.args.size() != 3) fail(ErrorCode::InvalidArgument, p.name + " takes [V, T, R]");
  auto g = p.params.find("gamma");
  if (g == p.params.end()) fail(ErrorCode::InvalidArgument, p.name + " needs a gamma parameter");
  auto mdp = mdp_from_mind(after, p.args[1], p.args[2], g->second);
  const auto& v = after.schema(p.args[0]).params;
  auto next = bellman_update(v, mdp);
  double residual = 0;
  for (std::size_t i = 0; i < v.size(); ++i) residual = std::max(residual, std::abs(next[i] - v[i]));
  ctx.series["residual:" + p.args[0]].push_back(residual);
  return residual < p.threshold;
}

double sup_change(const ParamTensor& a, const ParamTensor& b) {
  double delta = 0;
  for (std::size_t i = 0; i < a.size(); ++i) delta = std::max(delta, std::abs(b[i] - a[i]));
  return delta;
}

}  // namespace

void validate(const TabularMdp& mdp) {
  const std::vector<std::size_t> shape{mdp.n_states(), mdp.n_actions(), mdp.n_states()};
  if (mdp.transition.shape != shape) fail(ErrorCode::ShapeMismatch, "transition must be |O|x|D|x|O|");
  if (mdp.reward.shape != shape) fail(ErrorCode::ShapeMismatch, "reward must be |O|x|D|x|O|");
  if (!(mdp.gamma >= 0 && mdp.gamma < 1)) fail(ErrorCode::InvalidArgument, "gamma must lie in [0, 1)");
  if (!(mdp.delta > 0)) fail(ErrorCode::InvalidArgument, "delta must be positive");
  for (double r : mdp.reward.values) {
    if (!std::isfinite(r)) fail(ErrorCode::InvalidArgument, "rewards must be finite");
  }
  const std::size_t n = mdp.n_states();
  for (std::size_t row = 0; row * n < mdp.transition.size(); ++row) {
    double sum = 0;
    for (std::size_t k = 0; k < n; ++k) {
      double p = mdp.transition[row * n + k];
      if (!(p >= 0)) fail(ErrorCode::NonStochasticRow, "negative transition probability");
      sum += p;
    }
    if (std::abs(sum - 1) > sem::kProbTolerance) {
      fail(ErrorCode::NonStochasticRow, "transition row " + std::to_string(row) + " sums to " +
                                            format_real(sum));
    }
  }
}

ParamTensor bellman_update(const ParamTensor& theta, const TabularMdp& mdp) {
  const std::size_t no = mdp.n_states();
  const std::size_t nd = mdp.n_actions();
  if (theta.shape != std::vector<std::size_t>{no}) {
    fail(ErrorCode::ShapeMismatch, "value table must have one entry per state");
  }
  ParamTensor out = theta;
  for (std::size_t o = 0; o < no; ++o) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t d = 0; d < nd; ++d) {
      double q = 0;
      for (std::size_t o2 = 0; o2 < no; ++o2) q += mdp.T(o, d, o2) * (mdp.R(o, d, o2) + mdp.gamma * theta[o2]);
      if (q > best) best = q;
    }
    out[o] = best;
  }
  return out;
}

std::vector<double> bellman_operator(const std::vector<double>& w, const TabularMdp& mdp) {
  const std::size_t no = mdp.n_states();
  const std::size_t nd = mdp.n_actions();
  if (w.size() != no) fail(ErrorCode::ShapeMismatch, "vector must have one entry per state");
  std::vector<double> out(no);
  for (std::size_t o = 0; o < no; ++o) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t d = 0; d < nd; ++d) {
      double r = 0;
      double expect = 0;
      for (std::size_t o2 = 0; o2 < no; ++o2) {
        r += mdp.T(o, d, o2) * mdp.R(o, d, o2);
        expect += mdp.T(o, d, o2) * w[o2];
      }
      best = std::max(best, r + mdp.gamma * expect);
    }
    out[o] = best;
  }
  return out;
}

std::vector<double> dirac_values(const sem::FiniteKernel& k) {
  std::vector<double> out;
  out.reserve(k.dom_size());
  for (std::size_t x = 0; x < k.dom_size(); ++x) {
    const auto& row = k.row(x);
    auto at = std::find(row.begin(), row.end(), 1.0);
    if (at == row.end()) fail(ErrorCode::InvalidArgument, "kernel row is not a point mass");
    auto v = parse_real(point_label(k.cod(), static_cast<std::size_t>(at - row.begin())));
    if (!v) fail(ErrorCode::NonNumericAggregate, "codomain point is not a real");
    out.push_back(*v);
  }
  return out;
}

bool lifting_check(const ParamTensor& theta, const TabularMdp& mdp, const UpdateRule& rule) {
  auto v = syntax::make_atomic("V", value_type(mdp, theta));
  auto implemented = impl::implement(v, impl::tabular_language(), theta);
  auto updated = impl::update(implemented, [&](const ParamTensor& t) { return rule(t, mdp); });
  auto lhs = dirac_values(sem::model(updated));
  auto rhs = bellman_operator(dirac_values(sem::model(implemented)), mdp);
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    if (!(std::abs(lhs[i] - rhs[i]) <= kLiftingTolerance)) return false;
  }
  return true;
}

ViResult run_vi(const TabularMdp& mdp, const ParamTensor& theta0, std::size_t max_iter) {
  auto m = make_vi_mind(mdp, theta0, max_iter);
  exec::ExecContext ctx;
  ctx.operators = standard_operators();
  ctx.predicates = standard_predicates();
  ctx.signature = m.module("value_iteration").signature;
  auto result = exec::execute(make_vi_workflow(mdp, max_iter), m, ctx);
  return ViResult{result.schema("V").params, ctx.series["sup_delta:V"], ctx.last_loop_iterations,
                  !ctx.max_iter_exceeded};
}

ViResult run_vi_direct(const TabularMdp& mdp, const ParamTensor& theta0, std::size_t max_iter) {
  validate(mdp);
  if (max_iter == 0) fail(ErrorCode::InvalidArgument, "max_iter must be at least 1");
  ViResult out{theta0, {}, 0, false};
  while (out.iterations < max_iter) {
    auto next = bellman_update(out.values, mdp);
    double delta = sup_change(out.values, next);
    out.values = std::move(next);
    out.trace.push_back(delta);
    ++out.iterations;
    if (delta < mdp.delta) {
      out.converged = true;
      break;
    }
  }
  return out;
}

std::vector<std::size_t> greedy_policy(const ParamTensor& values, const TabularMdp& mdp) {
  std::vector<std::size_t> policy(mdp.n_states(), 0);
  for (std::size_t o = 0; o < mdp.n_states(); ++o) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t d = 0; d < mdp.n_actions(); ++d) {
      double q = 0;
      for (std::size_t o2 = 0; o2 < mdp.n_states(); ++o2) {
        q += mdp.T(o, d, o2) * (mdp.R(o, d, o2) + mdp.gamma * values[o2]);
      }
      if (q > best) {
        best = q;
        policy[o] = d;
      }
    }
  }
  return policy;
}

SchemaType transition_type(const TabularMdp& mdp) {
  auto o = with_role(mdp.states, SpaceRole::Observation);
  auto d = with_role(mdp.actions, SpaceRole::Decision);
  return SchemaType{SchemaKind::Predictive, {o, d}, {o}};
}

SchemaType reward_type(const TabularMdp& mdp) {
  auto o = with_role(mdp.states, SpaceRole::Observation);
  auto d = with_role(mdp.actions, SpaceRole::Decision);
  return SchemaType{SchemaKind::Goal, {o, d, o}, {real_grid("r", mdp.reward.values)}};
}

SchemaType value_type(const TabularMdp& mdp, const ParamTensor& theta0) {
  auto o = with_role(mdp.states, SpaceRole::Observation);
  return SchemaType{SchemaKind::Goal, {o}, {real_grid("v", theta0.values)}};
}

mind::MindState make_vi_mind(const TabularMdp& mdp, const ParamTensor& theta0, std::size_t max_iter) {
  validate(mdp);
  const auto& tab = impl::tabular_language();
  auto t = impl::implement(syntax::make_atomic("T", transition_type(mdp)), tab, mdp.transition);
  auto r = impl::implement(syntax::make_atomic("R", reward_type(mdp)), tab, mdp.reward);
  auto v = impl::implement(syntax::make_atomic("V", value_type(mdp, theta0)), tab, theta0);
  mind::MindState m;
  m.spaces.observations = with_role(mdp.states, SpaceRole::Observation);
  m.spaces.decisions = with_role(mdp.actions, SpaceRole::Decision);
  auto types = std::vector<SchemaType>{t.term.type(), r.term.type(), v.term.type()};
  auto cod = std::vector<SchemaType>{v.term.type()};
  m = mind::add_schema(m, std::move(t));
  m = mind::add_schema(m, std::move(r));
  m = mind::add_schema(m, std::move(v));
  wf::PredicateRef success{"vi.residual_below", {"V", "T", "R"}, mdp.delta, {{"gamma", mdp.gamma}}};
  return mind::add_module(m, mind::make_module("value_iteration", std::move(types), std::move(cod),
                                               {make_vi_workflow(mdp, max_iter)}, std::move(success),
                                               {"update.bellman"}));
}

wf::Workflow make_vi_workflow(const TabularMdp& mdp, std::size_t max_iter) {
  auto body = wf::wf_prim(wf::Prim{"update.bellman", {"V"}, {"T", "R"}, {{"gamma", mdp.gamma}}});
  return wf::wf_loop(wf::PredicateRef{"sup_change_below", {"V"}, mdp.delta, {}}, std::move(body),
                     max_iter);
}

void register_ops(exec::OperatorRegistry& ops, exec::PredicateRegistry& preds) {
  ops.add("update.bellman", bellman_operator_prim());
  preds.add("vi.residual_below", residual_below);
}

exec::OperatorRegistry standard_operators() {
  auto ops = exec::builtin_operators();
  exec::PredicateRegistry unused;
  register_ops(ops, unused);
  return ops;
}

exec::PredicateRegistry standard_predicates() {
  exec::OperatorRegistry unused;
  auto preds = exec::builtin_predicates();
  register_ops(unused, preds);
  return preds;
}

TabularMdp mdp_from_json(const nlohmann::json& j) {
  try {
    auto states = j.at("states").get<std::vector<std::string>>();
    auto actions = j.at("actions").get<std::vector<std::string>>();
    auto flatten = [&](const nlohmann::json& cube, const char* what) {
      std::vector<double> out;
      if (cube.size() != states.size()) fail(ErrorCode::ShapeMismatch, std::string(what) + ": wrong state count");
      for (const auto& plane : cube) {
        if (plane.size() != actions.size()) fail(ErrorCode::ShapeMismatch, std::string(what) + ": wrong action count");
        for (const auto& row : plane) {
          auto values = row.get<std::vector<double>>();
          if (values.size() != states.size()) fail(ErrorCode::ShapeMismatch, std::string(what) + ": wrong row width");
          out.insert(out.end(), values.begin(), values.end());
        }
      }
      return out;
    };
    std::vector<std::size_t> shape{states.size(), actions.size(), states.size()};
    TabularMdp mdp{SpaceSpec("O", SpaceRole::Observation, states),
                   SpaceSpec("D", SpaceRole::Decision, actions),
                   ParamTensor(shape, flatten(j.at("transition"), "transition")),
                   ParamTensor(shape, flatten(j.at("reward"), "reward")),
                   j.value("gamma", 0.9),
                   j.value("delta", kDefaultDelta)};
    validate(mdp);
    return mdp;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("mdp: ") + e.what());
  }
}

nlohmann::json to_json(const TabularMdp& mdp) {
  auto cube = [&](const ParamTensor& t) {
    auto out = nlohmann::json::array();
    for (std::size_t o = 0; o < mdp.n_states(); ++o) {
      auto plane = nlohmann::json::array();
      for (std::size_t d = 0; d < mdp.n_actions(); ++d) {
        auto begin = t.values.begin() + static_cast<std::ptrdiff_t>((o * mdp.n_actions() + d) * mdp.n_states());
        plane.push_back(std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(mdp.n_states())));
      }
      out.push_back(std::move(plane));
    }
    return out;
  };
  return {{"states", mdp.states.points()},
          {"actions", mdp.actions.points()},
          {"transition", cube(mdp.transition)},
          {"reward", cube(mdp.reward)},
          {"gamma", mdp.gamma},
          {"delta", mdp.delta}};
}

nlohmann::json value_table_json(const SpaceSpec& states, const ParamTensor& values) {
  return {{"states", states.points()}, {"values", values.values}};
}

std::string trace_csv(const std::vector<double>& trace) {
  std::string out = "iteration,sup_norm_delta\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out += std::to_string(i + 1) + "," + format_real(trace[i]) + "\n";
  }
  return out;
}

}  // namespace schemacalc::vi
