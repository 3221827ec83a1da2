#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "golden_values.hpp"
#include "rankforge/evaluation.hpp"
#include "support/generators.hpp"

using namespace rankforge;

namespace {

// Brute force over the written definition.
double NdcgOracle(const std::vector<int>& ranks) {
  const int n = static_cast<int>(ranks.size());
  auto dcg = [&](const std::vector<int>& rs) {
    long double s = 0;
    for (int i = 0; i < n; ++i) s += static_cast<long double>(n - rs[i]) / std::log2(static_cast<long double>(i + 2));
    return s;
  };
  std::vector<int> ideal = ranks;
  std::sort(ideal.begin(), ideal.end());
  const long double idcg = dcg(ideal);
  return idcg == 0 ? 1.0 : static_cast<double>(dcg(ranks) / idcg);
}

PredictionRecord TwoTeamPrediction(std::vector<int> observed, std::vector<std::size_t> order) {
  PredictionRecord p;
  p.match_id = "m";
  p.team_keys = {"A", "B"};
  p.observed_ranks = std::move(observed);
  p.team_ratings = {0, 0};
  p.order = std::move(order);
  return p;
}

Rating Played(double mu, std::uint64_t games) { return {mu, std::nullopt, games, std::nullopt}; }

}  // namespace

TEST_CASE("ndcg examples") {
  std::unordered_map<std::string, int> obs{{"A", 1}, {"B", 2}};
  const std::vector<std::string> right{"A", "B"}, wrong{"B", "A"};
  CHECK(Ndcg(right, obs) == 1.0);
  CHECK(std::abs(Ndcg(wrong, obs) - 0.6309) <= 1e-4);
  CHECK(Ndcg(wrong, obs) == doctest::Approx(golden::kNdcgReversedPair).epsilon(1e-14));
  CHECK(NdcgFromRanks(std::vector<int>{2, 1, 3}) == doctest::Approx(golden::kNdcgThreeTeams).epsilon(1e-14));
  CHECK(NdcgFromRanks(std::vector<int>{1, 2, 3, 4, 5}) == 1.0);
  const std::vector<std::string> missing{"A", "C"};
  CHECK_THROWS_AS(Ndcg(missing, obs), InvalidArgument);
}

TEST_CASE("ndcg agrees with brute force and stays in range") {
  auto rng = testgen::Rng(404);
  for (int trial = 0; trial < 3000; ++trial) {
    const int n = testgen::UniformInt(rng, 2, 20);
    const std::vector<int> ranks = testgen::RandomPermutation(rng, n);
    const double v = NdcgFromRanks(ranks);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(v == doctest::Approx(NdcgOracle(ranks)).epsilon(1e-13));

    // Team labels do not matter, only ranks in predicted order.
    std::unordered_map<std::string, int> obs;
    std::vector<std::string> order;
    for (int i = 0; i < n; ++i) {
      const std::string key = "k" + std::to_string(testgen::UniformInt(rng, 0, 1000000)) + "_" + std::to_string(i);
      obs[key] = ranks[i];
      order.push_back(key);
    }
    CHECK(Ndcg(order, obs) == v);
  }
}

TEST_CASE("accuracy outcome") {
  CHECK(AccuracyOutcome(TwoTeamPrediction({1, 2}, {0, 1})) == 1);
  CHECK(AccuracyOutcome(TwoTeamPrediction({1, 2}, {1, 0})) == 0);
  CHECK(AccuracyOutcome(TwoTeamPrediction({2, 1}, {1, 0})) == 1);
  PredictionRecord three = TwoTeamPrediction({1, 2}, {0, 1});
  three.team_keys.push_back("C");
  three.observed_ranks.push_back(3);
  three.order.push_back(2);
  CHECK_THROWS_AS(AccuracyOutcome(three), InvalidArgument);
  CHECK(MatchMetric(three, MetricKind::kNdcg) == 1.0);
  CHECK_THROWS_AS(MatchMetric(three, MetricKind::kAuto), InvalidArgument);
}

TEST_CASE("accuracy of random predictions is near one half") {
  auto rng = testgen::Rng(77);
  int hits = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const bool flip = testgen::UniformInt(rng, 0, 1) == 1;
    hits += AccuracyOutcome(TwoTeamPrediction(flip ? std::vector<int>{2, 1} : std::vector<int>{1, 2},
                                              testgen::UniformInt(rng, 0, 1) ? std::vector<std::size_t>{0, 1}
                                                                             : std::vector<std::size_t>{1, 0}));
  }
  CHECK(std::abs(static_cast<double>(hits) / n - 0.5) <= 0.03);
}

TEST_CASE("best player selection") {
  RatingStore store;
  store.Put("low", Played(1400, 20));
  store.Put("high", Played(1800, 20));
  store.Put("rookie", Played(2500, 10));  // exactly min games: excluded
  store.Put("mid", Played(1600, 11));
  store.Put("tie", Played(1600, 50));

  SetupSpec spec;
  spec.kind = SetupKind::kBest;
  spec.best_top_k = 3;
  Selection sel = SelectBestPlayers(store, SystemKind::kElo, spec);
  CHECK(sel.players == std::vector<PlayerId>{"high", "mid", "tie"});
  CHECK_FALSE(sel.short_of_target);

  spec.best_top_k = 10;
  sel = SelectBestPlayers(store, SystemKind::kElo, spec);
  CHECK(sel.players.size() == 4);
  CHECK(sel.short_of_target);

  RatingStore empty;
  sel = SelectBestPlayers(empty, SystemKind::kElo, spec);
  CHECK(sel.players.empty());
  CHECK(sel.short_of_target);
}

TEST_CASE("best selection for PreviousRank uses the last rank") {
  RatingStore store;
  Rating a = Played(0, 20), b = Played(0, 20), c = Played(0, 20);
  a.last_rank = 3;
  b.last_rank = 1;
  c.last_rank = 2;
  store.Put("a", a);
  store.Put("b", b);
  store.Put("c", c);
  SetupSpec spec;
  spec.best_top_k = 2;
  CHECK(SelectBestPlayers(store, SystemKind::kPreviousRank, spec).players == std::vector<PlayerId>{"b", "c"});
}

TEST_CASE("frequent player selection") {
  RatingStore store;
  store.Put("z", Played(1500, 101));
  store.Put("y", Played(1500, 100));
  store.Put("a", Played(1500, 500));
  SetupSpec spec;
  CHECK(SelectFrequentPlayers(store, spec) == std::vector<PlayerId>{"a", "z"});
  spec.frequent_min_games = 0;
  spec.frequent_window = 0;
  CHECK(SelectFrequentPlayers(store, spec).size() == 3);
}

TEST_CASE("setup validation") {
  SetupSpec spec;
  CHECK_NOTHROW(spec.Validate());
  spec.best_window = 11;
  CHECK_THROWS_AS(spec.Validate(), ConfigError);
  spec = {};
  spec.bins = 0;
  CHECK_THROWS_AS(spec.Validate(), ConfigError);
  for (auto s : {SetupKind::kAll, SetupKind::kBest, SetupKind::kFrequent}) CHECK(ParseSetup(SetupName(s)) == s);
  CHECK_THROWS_AS(ParseSetup("top"), ConfigError);
  CHECK(ParseMetric("ndcg") == MetricKind::kNdcg);
}

TEST_CASE("windowed series") {
  const std::vector<double> metric{1, 0, 1, 1, 0, std::nan("")};
  std::unordered_map<PlayerId, MatchHistory> hist{
      {"p", {0, 2, 4}},
      {"q", {2, 3, 5}},
      {"r", {1}},
  };

  SUBCASE("a single player") {
    const std::vector<PlayerId> sel{"p"};
    const WindowedResult r = WindowedSeries(metric, hist, sel, 3);
    CHECK(r.series.x == std::vector<double>{1, 2, 3});
    CHECK(r.series.y == std::vector<double>{1, 1, 0});
    CHECK_FALSE(r.truncated);
    CHECK(r.value_count == 3);
  }
  SUBCASE("a shared match counts once at its smallest index") {
    const std::vector<PlayerId> sel{"p", "q"};
    const WindowedResult r = WindowedSeries(metric, hist, sel, 3);
    // match 2 is p's 2nd and q's 1st game, so it sits at index 1.
    CHECK(r.series.x == std::vector<double>{1, 2, 3});
    CHECK(r.series.population == std::vector<std::size_t>{2, 1, 1});
    CHECK(r.series.y == std::vector<double>{1, 1, 0});
    CHECK(r.value_count == 4);  // match 5 is NaN
    CHECK(WeightedMean(r.series) == doctest::Approx(r.value_sum / static_cast<double>(r.value_count)));
  }
  SUBCASE("short histories truncate the series") {
    const std::vector<PlayerId> sel{"r"};
    const WindowedResult r = WindowedSeries(metric, hist, sel, 10);
    CHECK(r.series.x == std::vector<double>{1});
    CHECK(r.truncated);
  }
  SUBCASE("nobody selected") {
    const WindowedResult r = WindowedSeries(metric, hist, {}, 5);
    CHECK(r.series.x.empty());
    CHECK(std::isnan(WeightedMean(r.series)));
  }
}

TEST_CASE("bin series") {
  std::vector<double> ones(1000, 1.0);
  MetricSeries s = BinSeries(ones, 500);
  CHECK(s.x.size() == 500);
  for (double y : s.y) CHECK(y == 1.0);

  const std::vector<double> five{1, 2, 3, 4, 5};
  s = BinSeries(five, 2);
  CHECK(s.population == std::vector<std::size_t>{3, 2});
  CHECK(s.y == std::vector<double>{2.0, 4.5});

  s = BinSeries(five, 1);
  CHECK(s.y == std::vector<double>{3.0});
  s = BinSeries(five, 500);
  CHECK(s.y == five);
  CHECK(BinSeries(std::vector<double>{}, 500).x.empty());
}

TEST_CASE("bin series length and weighted mean") {
  auto rng = testgen::Rng(55);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = testgen::UniformInt(rng, 0, 3000);
    const int bins = testgen::UniformInt(rng, 1, 600);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (double& x : v) x = testgen::Uniform(rng, 0, 1);
    const MetricSeries s = BinSeries(v, bins);
    REQUIRE(s.x.size() == static_cast<std::size_t>(std::min(n, bins)));
    REQUIRE(std::accumulate(s.population.begin(), s.population.end(), std::size_t{0}) == v.size());
    if (n > 0) {
      const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
      CHECK(std::abs(WeightedMean(s) - mean) <= 1e-9);
    }
  }
}
