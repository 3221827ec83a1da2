// Serial reference vs OpenMP pass runner over a synthetic duo stream.

#include <benchmark/benchmark.h>

#include "rankforge/experiment.hpp"
#include "rankforge/synth.hpp"

using namespace rankforge;

namespace {

const std::vector<MatchRecord>& Stream() {
  static const std::vector<MatchRecord> matches = [] {
    SynthConfig cfg;
    cfg.n_players = 2000;
    cfg.team_size = 2;
    cfg.teams_per_match = 2;
    cfg.n_matches = 20000;
    cfg.seed = 1;
    return Generate(cfg).matches;
  }();
  return matches;
}

std::vector<PassKey> Keys() {
  std::vector<PassKey> keys;
  for (SystemKind s : {SystemKind::kElo, SystemKind::kGlicko, SystemKind::kTrueSkill}) {
    for (Aggregation a : {Aggregation::kSum, Aggregation::kMax, Aggregation::kMin}) keys.push_back({s, a});
  }
  keys.push_back({SystemKind::kPreviousRank, std::nullopt});
  return keys;
}

void BM_Serial(benchmark::State& state) {
  const auto keys = Keys();
  for (auto _ : state) {
    auto r = RunPassesSerial(Stream(), keys, {}, MetricKind::kAccuracy, 100);
    benchmark::DoNotOptimize(r);
  }
}

void BM_Parallel(benchmark::State& state) {
  const auto keys = Keys();
  for (auto _ : state) {
    auto r = RunPassesParallel(Stream(), keys, {}, MetricKind::kAccuracy, 100, static_cast<int>(state.range(0)));
    benchmark::DoNotOptimize(r);
  }
}

}  // namespace

BENCHMARK(BM_Serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Parallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
