#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "schemacalc/causal.hpp"
#include "schemacalc/impl.hpp"
#include "schemacalc/mind.hpp"
#include "schemacalc/semantics.hpp"
#include "schemacalc/syntax.hpp"
#include "schemacalc/value_iteration.hpp"
#include "schemacalc/workflow.hpp"

/// Seeded random instances for property checks.
namespace schemacalc::gen {

/// Fixed pool of well-typed atomic schemas of every kind.
const std::vector<syntax::SchemaTerm>& atom_pool();

syntax::SchemaTerm random_atomic(Rng& rng);
syntax::SchemaTerm random_null(Rng& rng);
/// Random term of depth at most `max_depth` using every operator.
syntax::SchemaTerm random_term(Rng& rng, int max_depth);
/// Random term whose normal form is neither Seq nor Null.
syntax::SchemaTerm random_seq_free_term(Rng& rng, int max_depth);
std::vector<syntax::SchemaTerm> random_context(Rng& rng, int max_depth, std::size_t max_size);
syntax::SchemaSet random_set(Rng& rng, int max_depth, std::size_t max_size);

SpaceSpec random_space(Rng& rng, const std::string& label, std::size_t min_points,
                       std::size_t max_points, SpaceRole role = SpaceRole::Other);
/// Positive row summing to one (occasionally with exact zeros).
std::vector<double> random_row(Rng& rng, std::size_t width);
sem::FiniteKernel random_kernel(Rng& rng, const ProductSpace& dom, const ProductSpace& cod);
impl::ParamTensor random_tensor(Rng& rng, const std::vector<std::size_t>& shape, double lo, double hi);

/// Random relabeling of the points of `space` (a permutation).
impl::PointMap random_permutation(Rng& rng, const SpaceSpec& space);
/// Random point map on `space`, not necessarily bijective.
impl::PointMap random_point_map(Rng& rng, const SpaceSpec& space);

vi::TabularMdp random_mdp(Rng& rng, std::size_t max_states, std::size_t max_actions, double gamma);

/// Random DAG: edges only from lower to higher positions of a random order.
causal::Dag random_dag(Rng& rng, std::size_t n, double edge_prob);

/// Mind with deterministic value tables "s0".."s{n-1}" over one state space.
mind::MindState random_table_mind(Rng& rng, std::size_t n);
/// Random workflow whose Prims only touch `ids`; Par branches get disjoint
/// id subsets.
wf::Workflow random_workflow(Rng& rng, const std::vector<std::string>& ids, int max_depth);

}  // namespace schemacalc::gen
