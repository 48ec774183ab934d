#include <benchmark/benchmark.h>

#include "schemacalc/causal.hpp"
#include "schemacalc/generators.hpp"
#include "schemacalc/semantics.hpp"
#include "schemacalc/value_iteration.hpp"

using namespace schemacalc;

namespace {

ProductSpace grid(std::size_t n) {
  std::vector<std::string> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back("p" + std::to_string(i));
  return {SpaceSpec("X", SpaceRole::Other, pts)};
}

void BM_KernelCompose(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  auto f = gen::random_kernel(rng, grid(n), grid(n));
  auto g = gen::random_kernel(rng, grid(n), grid(n));
  for (auto _ : state) benchmark::DoNotOptimize(sem::kernel_compose(f, g));
}
BENCHMARK(BM_KernelCompose)->Arg(8)->Arg(32)->Arg(128);

void BM_KernelProduct(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  auto f = gen::random_kernel(rng, grid(n), grid(n));
  for (auto _ : state) benchmark::DoNotOptimize(sem::kernel_product(f, f));
}
BENCHMARK(BM_KernelProduct)->Arg(4)->Arg(16);

vi::TabularMdp big_mdp(std::size_t states, std::size_t actions) {
  Rng rng(3);
  vi::TabularMdp m = gen::random_mdp(rng, 1, 1, 0.9);
  std::vector<std::string> o, d;
  for (std::size_t i = 0; i < states; ++i) o.push_back("o" + std::to_string(i));
  for (std::size_t i = 0; i < actions; ++i) d.push_back("d" + std::to_string(i));
  m.states = SpaceSpec("O", SpaceRole::Observation, o);
  m.actions = SpaceSpec("D", SpaceRole::Decision, d);
  std::vector<std::size_t> shape{states, actions, states};
  std::vector<double> t, r;
  for (std::size_t k = 0; k < states * actions; ++k) {
    auto row = gen::random_row(rng, states);
    t.insert(t.end(), row.begin(), row.end());
    for (std::size_t j = 0; j < states; ++j) r.push_back(rng.uniform(-1, 1));
  }
  m.transition = impl::ParamTensor(shape, t);
  m.reward = impl::ParamTensor(shape, r);
  return m;
}

void BM_BellmanUpdate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto m = big_mdp(n, 4);
  impl::ParamTensor theta({n}, std::vector<double>(n, 0.0));
  for (auto _ : state) benchmark::DoNotOptimize(vi::bellman_update(theta, m));
}
BENCHMARK(BM_BellmanUpdate)->Arg(16)->Arg(64);

void BM_ValueIteration(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto m = big_mdp(n, 4);
  impl::ParamTensor theta({n}, std::vector<double>(n, 0.0));
  for (auto _ : state) benchmark::DoNotOptimize(vi::run_vi(m, theta));
}
BENCHMARK(BM_ValueIteration)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_ValueIterationDirect(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto m = big_mdp(n, 4);
  impl::ParamTensor theta({n}, std::vector<double>(n, 0.0));
  for (auto _ : state) benchmark::DoNotOptimize(vi::run_vi_direct(m, theta));
}
BENCHMARK(BM_ValueIterationDirect)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Ges(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(4);
  auto dag = gen::random_dag(rng, n, 0.4);
  auto model = causal::make_uniform(causal::numbered_variables(n, 2), dag);
  for (std::size_t v = 0; v < n; ++v)
    for (auto& row : model.cpts[v].rows) row = gen::random_row(rng, 2);
  auto data = causal::sample_data(model, 5000, 5);
  for (auto _ : state) benchmark::DoNotOptimize(causal::ges_run(data));
}
BENCHMARK(BM_Ges)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
