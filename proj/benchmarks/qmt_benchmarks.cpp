#include <benchmark/benchmark.h>

#include "generators.hpp"

namespace {

using namespace qmt;
using namespace qmt::testing;

void BM_DempsterCombine(benchmark::State& state) {
  Rng rng(1);
  const Frame f = letters_frame(static_cast<std::size_t>(state.range(0)));
  const auto focal = static_cast<std::size_t>(state.range(1));
  const auto a = random_mass(rng, f, focal);
  const auto b = random_mass(rng, f, focal);
  for (auto _ : state) {
    try {
      benchmark::DoNotOptimize(dempster_combine(a, b));
    } catch (const Error&) {
    }
  }
}
BENCHMARK(BM_DempsterCombine)->ArgsProduct({{8, 16, 24}, {4, 16, 64}});

// Path of n nodes sharing one partition of a 12-element frame, evidence everywhere.
Engine loaded_path(std::size_t n) {
  Rng rng(2);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t v = 1; v < n; ++v) edges.emplace_back(v - 1, v);
  const Frame f = letters_frame(12);
  const auto net = make_network(f, std::vector<Partition>(n, Partition::from_masks(f, {0x00F, 0x0F0, 0xF00})), edges);
  Engine engine{MarkovTree::build(net)};
  for (std::size_t i = 0; i < n; ++i) {
    const auto& frame = net.partition(i).coarse_frame();
    engine.enter_evidence(net.id(i), MassFunction(frame, {{0b011, 0.3}, {0b110, 0.3}, {0b111, 0.4}}));
  }
  return engine;
}

void BM_PropagateBatch(benchmark::State& state) {
  const Engine base = loaded_path(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    Engine engine = base;
    benchmark::DoNotOptimize(engine.propagate_batch());
  }
}
BENCHMARK(BM_PropagateBatch)->RangeMultiplier(2)->Range(2, 64);

void BM_PropagateConcurrent(benchmark::State& state) {
  const Engine base = loaded_path(static_cast<std::size_t>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    Engine engine = base;
    benchmark::DoNotOptimize(engine.propagate_concurrent(++seed));
  }
}
BENCHMARK(BM_PropagateConcurrent)->RangeMultiplier(2)->Range(2, 64);

// Local propagation against brute-force combination on the full frame.
void BM_EngineVersusOracle(benchmark::State& state) {
  Rng rng(3);
  const bool use_oracle = state.range(0) == 1;
  const auto net = random_markov_tree(rng, 8, 8, 5, 5);
  oracle::EvidenceMap ev;
  for (;;) {
    ev = random_evidence(rng, net, 4);
    try {
      oracle::global_combine(net, ev);
      break;
    } catch (const Error&) {
    }
  }
  const Engine base{MarkovTree::build(net)};
  for (auto _ : state) {
    if (use_oracle) {
      benchmark::DoNotOptimize(oracle::global_combine(net, ev));
    } else {
      Engine engine = base;
      for (const auto& [id, list] : ev) {
        for (const auto& m : list) engine.enter_evidence(id, m);
      }
      benchmark::DoNotOptimize(engine.propagate_batch());
    }
  }
  state.SetLabel(use_oracle ? "oracle" : "engine");
}
BENCHMARK(BM_EngineVersusOracle)->Arg(0)->Arg(1);

void BM_ValidateMarkov(benchmark::State& state) {
  Rng rng(4);
  const auto net = random_markov_tree(rng, 6, 6, static_cast<std::size_t>(state.range(0)),
                                      static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(validate_markov(net));
}
BENCHMARK(BM_ValidateMarkov)->DenseRange(2, 5);

}  // namespace

BENCHMARK_MAIN();
