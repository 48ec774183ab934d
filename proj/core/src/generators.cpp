#include "schemacalc/generators.hpp"

#include <algorithm>
#include <numeric>

namespace schemacalc::gen {

namespace {

using syntax::SchemaKind;
using syntax::SchemaTerm;
using syntax::SchemaType;

SpaceSpec space(const std::string& label, SpaceRole role, std::size_t n) {
  std::vector<std::string> points;
  for (std::size_t i = 0; i < n; ++i) points.push_back(label + std::to_string(i));
  return SpaceSpec(label, role, std::move(points));
}

const SpaceSpec& sensors() {
  static const SpaceSpec s = space("s", SpaceRole::Sensor, 2);
  return s;
}
const SpaceSpec& observations() {
  static const SpaceSpec s = space("o", SpaceRole::Observation, 3);
  return s;
}
const SpaceSpec& decisions() {
  static const SpaceSpec s = space("d", SpaceRole::Decision, 2);
  return s;
}
const SpaceSpec& effectors() {
  static const SpaceSpec s = space("e", SpaceRole::Effector, 2);
  return s;
}
const SpaceSpec& hidden() {
  static const SpaceSpec s = space("h", SpaceRole::Hidden, 2);
  return s;
}
const SpaceSpec& reals() {
  static const SpaceSpec s("r", SpaceRole::Real, {"0", "0.5", "1"});
  return s;
}

}  // namespace

const std::vector<SchemaTerm>& atom_pool() {
  static const std::vector<SchemaTerm> pool = [] {
    const auto& S = sensors();
    const auto& O = observations();
    const auto& D = decisions();
    const auto& E = effectors();
    const auto& H = hidden();
    const auto& R = reals();
    return std::vector<SchemaTerm>{
        syntax::make_atomic("vision", {SchemaKind::Perceptual, {S}, {O}}),
        syntax::make_atomic("touch", {SchemaKind::Perceptual, {S, S}, {O}}),
        syntax::make_atomic("grip", {SchemaKind::Motor, {D}, {E}}),
        syntax::make_atomic("reach", {SchemaKind::Motor, {D, D}, {E}}),
        syntax::make_atomic("reward", {SchemaKind::Goal, {O, D}, {R}}),
        syntax::make_atomic("value", {SchemaKind::Goal, {O}, {R}}),
        syntax::make_atomic("forward", {SchemaKind::Predictive, {O, D}, {O}}),
        syntax::make_atomic("inverse", {SchemaKind::Predictive, {O}, {D}}),
        syntax::make_atomic("belief", {SchemaKind::Predictive, {H}, {O}}),
        syntax::make_atomic("concept", {SchemaKind::Abstract, {H}, {H}}),
    };
  }();
  return pool;
}

SchemaTerm random_atomic(Rng& rng) {
  const auto& pool = atom_pool();
  return pool[rng.below(pool.size())];
}

SchemaTerm random_null(Rng& rng) {
  static const std::vector<SpaceSpec> spaces{sensors(), observations(), decisions(), hidden()};
  return syntax::make_null({spaces[rng.below(spaces.size())]});
}

SchemaTerm random_term(Rng& rng, int max_depth) {
  const double leaf = max_depth <= 0 ? 1.0 : 0.35;
  if (rng.coin(leaf)) return rng.coin(0.1) ? random_null(rng) : random_atomic(rng);
  auto sub = [&] { return random_term(rng, max_depth - 1); };
  switch (rng.below(4)) {
    case 0:
      return SchemaTerm::raw(syntax::TermOp::Par, "", {}, {sub(), sub()});
    case 1:
      return SchemaTerm::raw(syntax::TermOp::Seq, "", {}, {sub(), sub()});
    case 2:
      return SchemaTerm::raw(syntax::TermOp::Encap, "", {}, {sub(), sub()});
    default: {
      std::vector<SchemaTerm> children{sub()};
      const auto n = rng.below(3);
      for (std::size_t i = 0; i < n; ++i) children.push_back(random_term(rng, std::min(max_depth - 1, 2)));
      return SchemaTerm::raw(syntax::TermOp::Ctx, "", {}, std::move(children));
    }
  }
}

SchemaTerm random_seq_free_term(Rng& rng, int max_depth) {
  while (true) {
    auto t = random_term(rng, max_depth);
    auto n = syntax::normalize(t);
    if (!n.is(syntax::TermOp::Seq) && !n.is(syntax::TermOp::Null)) return t;
  }
}

std::vector<SchemaTerm> random_context(Rng& rng, int max_depth, std::size_t max_size) {
  std::vector<SchemaTerm> out;
  const auto n = rng.below(max_size + 1);
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_term(rng, max_depth));
  return out;
}

syntax::SchemaSet random_set(Rng& rng, int max_depth, std::size_t max_size) {
  syntax::SchemaSet out;
  for (const auto& t : random_context(rng, max_depth, max_size)) out = syntax::add(out, t);
  return out;
}

SpaceSpec random_space(Rng& rng, const std::string& label, std::size_t min_points, std::size_t max_points,
                       SpaceRole role) {
  return space(label, role, min_points + rng.below(max_points - min_points + 1));
}

std::vector<double> random_row(Rng& rng, std::size_t width) {
  std::vector<double> row(width);
  double sum = 0;
  for (auto& p : row) {
    p = rng.coin(0.15) ? 0.0 : rng.uniform(0.01, 1.0);
    sum += p;
  }
  if (sum == 0) {
    row[rng.below(width)] = 1.0;
    return row;
  }
  for (auto& p : row) p /= sum;
  return row;
}

sem::FiniteKernel random_kernel(Rng& rng, const ProductSpace& dom, const ProductSpace& cod) {
  std::vector<std::vector<double>> rows;
  const auto width = cardinality(cod);
  for (std::size_t x = 0; x < cardinality(dom); ++x) rows.push_back(random_row(rng, width));
  return sem::FiniteKernel(dom, cod, std::move(rows));
}

impl::ParamTensor random_tensor(Rng& rng, const std::vector<std::size_t>& shape, double lo, double hi) {
  std::vector<double> values(impl::element_count(shape));
  for (auto& v : values) v = rng.uniform(lo, hi);
  return impl::ParamTensor(shape, std::move(values));
}

impl::PointMap random_permutation(Rng& rng, const SpaceSpec& s) {
  std::vector<std::size_t> perm(s.size());
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
  impl::PointMap m;
  for (std::size_t i = 0; i < perm.size(); ++i) m.mapping[s.points()[i]] = s.points()[perm[i]];
  return m;
}

impl::PointMap random_point_map(Rng& rng, const SpaceSpec& s) {
  impl::PointMap m;
  for (const auto& p : s.points()) {
    if (rng.coin(0.7)) m.mapping[p] = s.points()[rng.below(s.size())];
  }
  return m;
}

vi::TabularMdp random_mdp(Rng& rng, std::size_t max_states, std::size_t max_actions, double gamma) {
  const auto no = 1 + rng.below(max_states);
  const auto nd = 1 + rng.below(max_actions);
  auto states = space("o", SpaceRole::Observation, no);
  auto actions = space("d", SpaceRole::Decision, nd);
  std::vector<double> t;
  for (std::size_t i = 0; i < no * nd; ++i) {
    auto row = random_row(rng, no);
    t.insert(t.end(), row.begin(), row.end());
  }
  std::vector<std::size_t> shape{no, nd, no};
  return vi::TabularMdp{states, actions, impl::ParamTensor(shape, std::move(t)),
                        random_tensor(rng, shape, -1.0, 1.0), gamma, vi::kDefaultDelta};
}

causal::Dag random_dag(Rng& rng, std::size_t n, double edge_prob) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  causal::Dag dag(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rng.coin(edge_prob)) dag.insert(order[i], order[j]);
    }
  }
  return dag;
}

mind::MindState random_table_mind(Rng& rng, std::size_t n) {
  mind::MindState m;
  const auto& O = observations();
  m.spaces.observations = O;
  const auto& tab = impl::tabular_language();
  for (std::size_t i = 0; i < n; ++i) {
    auto id = "s" + std::to_string(i);
    auto term = syntax::make_atomic(id, {SchemaKind::Goal, {O}, {reals()}});
    m = mind::add_schema(m, impl::implement(term, tab, random_tensor(rng, {O.size()}, -2.0, 2.0)));
  }
  return m;
}

wf::Workflow random_workflow(Rng& rng, const std::vector<std::string>& ids, int max_depth) {
  auto pick = [&](const std::vector<std::string>& from) { return from[rng.below(from.size())]; };
  auto prim = [&] {
    const auto target = pick(ids);
    switch (rng.below(3)) {
      case 0:
        return wf::wf_prim({"update.scale", {target}, {}, {{"factor", rng.uniform(0.5, 1.5)}}});
      case 1:
        return wf::wf_prim({"update.shift", {target}, {}, {{"by", rng.uniform(-1.0, 1.0)}}});
      default: {
        std::vector<std::string> others;
        for (const auto& id : ids) {
          if (id != target) others.push_back(id);
        }
        if (others.empty()) return wf::wf_prim({"update.scale", {target}, {}, {{"factor", 0.9}}});
        return wf::wf_prim({"update.mix", {target}, {pick(others)}, {{"weight", rng.uniform(0.0, 1.0)}}});
      }
    }
  };
  if (max_depth <= 0 || rng.coin(0.3)) {
    if (rng.coin(0.08)) return rng.coin(0.5) ? wf::Workflow::unit_seq() : wf::Workflow::unit_par();
    return prim();
  }
  switch (rng.below(3)) {
    case 0:
      return wf::Workflow::raw_seq(random_workflow(rng, ids, max_depth - 1),
                                   random_workflow(rng, ids, max_depth - 1));
    case 1: {
      if (ids.size() < 2) return prim();
      std::vector<std::string> left;
      std::vector<std::string> right;
      auto shuffled = ids;
      for (std::size_t i = shuffled.size(); i > 1; --i) std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
      const auto cut = 1 + rng.below(shuffled.size() - 1);
      left.assign(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(cut));
      right.assign(shuffled.begin() + static_cast<std::ptrdiff_t>(cut), shuffled.end());
      return wf::Workflow::raw_par(random_workflow(rng, left, max_depth - 1),
                                   random_workflow(rng, right, max_depth - 1));
    }
    default: {
      wf::PredicateRef cond{"sup_change_below", {pick(ids)}, rng.uniform(0.0, 1.0), {}};
      if (rng.coin(0.2)) cond = wf::PredicateRef{"always_false", {}, 0, {}};
      return wf::wf_loop(std::move(cond), random_workflow(rng, ids, max_depth - 1), 1 + rng.below(3));
    }
  }
}

}  // namespace schemacalc::gen
