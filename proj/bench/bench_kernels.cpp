// Serial reference vs OpenMP kernels, and the streaming engine vs the batch oracle.

#include <benchmark/benchmark.h>

#include <random>

#include "diffscope/kernels.hpp"
#include "diffscope/oracle.hpp"
#include "diffscope/pipeline.hpp"
#include "diffscope/synth.hpp"

using namespace diffscope;

namespace {

std::vector<double> heavy_tail(std::size_t n) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = std::floor(std::pow(1.0 - u(rng), -1.0 / 1.5));
  return v;
}

void BM_TallySerial(benchmark::State& state) {
  auto v = heavy_tail(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::tally_bins_serial(v, 1.0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_TallyParallel(benchmark::State& state) {
  auto v = heavy_tail(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::tally_bins_parallel(v, 1.0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

synth::GeneratorParams cascade_params(std::int64_t users) {
  synth::GeneratorParams p;
  p.n_users = static_cast<std::size_t>(users);
  p.n_steps = 48;
  p.base_spontaneous_rate = 0.02;
  p.influence_rate = 0.05;
  return p;
}

void BM_CascadeSerial(benchmark::State& state) {
  auto p = cascade_params(state.range(0));
  auto g = synth::generate_graph(p);
  for (auto _ : state) benchmark::DoNotOptimize(synth::generate_cascade(g, p, synth::Execution::Serial));
}

void BM_CascadeParallel(benchmark::State& state) {
  auto p = cascade_params(state.range(0));
  auto g = synth::generate_graph(p);
  for (auto _ : state) benchmark::DoNotOptimize(synth::generate_cascade(g, p, synth::Execution::Parallel));
}

struct Workload {
  SessionConfig config;
  std::vector<UserMeta> graph;
  std::vector<Message> log;
};

Workload workload(std::int64_t users) {
  Workload w;
  auto p = cascade_params(users);
  w.graph = synth::generate_graph(p);
  w.log = synth::generate_cascade(w.graph, p);
  w.config.keywords = p.keywords;
  w.config.validate();
  return w;
}

void BM_Engine(benchmark::State& state) {
  auto w = workload(state.range(0));
  GraphFile gf{w.graph, 0};
  for (auto _ : state) {
    VectorSource src(w.log);
    benchmark::DoNotOptimize(run_pipeline(w.config, src, gf));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.log.size()));
}

void BM_Oracle(benchmark::State& state) {
  auto w = workload(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(oracle_report(w.config, w.log, w.graph));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.log.size()));
}

}  // namespace

BENCHMARK(BM_TallySerial)->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_TallyParallel)->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_CascadeSerial)->Arg(2'000)->Arg(20'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CascadeParallel)->Arg(2'000)->Arg(20'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Engine)->Arg(5'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Oracle)->Arg(5'000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
