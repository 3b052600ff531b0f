// Serial reference vs OpenMP kernel for each parallel hot path.
// The benchmark argument selects the execution mode: 0 serial, 1 parallel.

#include <benchmark/benchmark.h>

#include <random>
#include <variant>

#include "ism/bounds.hpp"
#include "ism/consistency.hpp"
#include "ism/mdp.hpp"
#include "ism/synthesis.hpp"
#include "ism/verify.hpp"

using namespace ism;

namespace {

Exec mode(const benchmark::State& st) { return st.range(0) ? Exec::parallel : Exec::serial; }

void label(benchmark::State& st) { st.SetLabel(st.range(0) ? "parallel" : "serial"); }

Ism rps_machine() {
  static const Ism m = [] {
    SynthesisOptions o;
    o.lambda = 0.1;
    return std::get<SynthesisSuccess>(synthesize(build_rps().with_switch(build_switch(4, 0.5)), o)).machine;
  }();
  return m;
}

Mdp random_mdp(std::size_t S, std::size_t A) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Mdp m(S, A);
  for (std::size_t k = 0; k < S * A; ++k) {
    m.reward[k] = u(rng);
    for (int j = 0; j < 8; ++j) m.next[k].push_back({static_cast<Index>(rng() % S), 0.125});
  }
  return m;
}

void BM_check_edge(benchmark::State& st) {
  const GameInstance g = build_rps_mem(0.2);
  const Belief u = uniform_belief(g.policies.size());
  const Observation o{0, 0};
  const EdgeQuery q = make_query(g, u, transform(u, o, g), o, 0.25);
  for (auto _ : st) benchmark::DoNotOptimize(check_edge(q, mode(st)));
  label(st);
}

void BM_bellman_sweep(benchmark::State& st) {
  const Mdp m = random_mdp(50000, 4);
  const std::vector<double> v(50000, 1.0);
  std::vector<double> out;
  std::vector<Index> greedy;
  for (auto _ : st) {
    bellman_sweep(m, v, 0.95, out, greedy, mode(st));
    benchmark::DoNotOptimize(out.data());
  }
  label(st);
}

void BM_verify_sampling(benchmark::State& st) {
  const GameInstance g = build_rps().with_switch(build_switch(4, 0.5));
  const Ism m = rps_machine();
  VerifyOptions vo;
  vo.num_sequences = 2000;
  vo.check_edges = false;
  vo.exec = mode(st);
  for (auto _ : st) benchmark::DoNotOptimize(verify_consistency(m, g, vo));
  label(st);
}

void BM_discrepancy_sampling(benchmark::State& st) {
  const GameInstance g = build_rps().with_switch(build_switch(4, 0.5));
  const Ism m = rps_machine();
  for (auto _ : st) benchmark::DoNotOptimize(check_discrepancy_bounds(g, m, 0.1, 1000, 50, 3, mode(st)));
  label(st);
}

}  // namespace

BENCHMARK(BM_check_edge)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_bellman_sweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_verify_sampling)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_discrepancy_sampling)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
