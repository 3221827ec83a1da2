#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rankforge/core.hpp"
#include "rankforge/rating_systems.hpp"

namespace rankforge {

enum class SetupKind { kAll, kBest, kFrequent };

SetupKind ParseSetup(std::string_view tag);
std::string_view SetupName(SetupKind setup);

enum class MetricKind { kAuto, kNdcg, kAccuracy };

MetricKind ParseMetric(std::string_view tag);
std::string_view MetricName(MetricKind metric);

struct SetupSpec {
  SetupKind kind = SetupKind::kAll;
  int best_top_k = 1000;
  int best_min_games = 10;
  int frequent_min_games = 100;
  int best_window = 10;
  int frequent_window = 100;
  int bins = 500;

  int window() const { return kind == SetupKind::kBest ? best_window : frequent_window; }
  // Throws ConfigError.
  void Validate() const;
};

struct MetricSeries {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<std::size_t> population;  // values averaged into each point
  std::string label;
};

/// NDCG with linear gain N - rank and log2(position + 1) discount.
double Ndcg(std::span<const std::string> predicted_order,
            const std::unordered_map<std::string, int>& observed_ranks);

/// Same metric from the observed ranks listed in predicted order.
double NdcgFromRanks(std::span<const int> ranks_in_predicted_order);

/// 1 if the team predicted first won a head-to-head match, else 0.
int AccuracyOutcome(const PredictionRecord& prediction);

/// Metric value of one prediction; kAuto is not accepted here.
double MatchMetric(const PredictionRecord& prediction, MetricKind metric);

struct Selection {
  std::vector<PlayerId> players;  // ordered as selected
  bool short_of_target = false;   // fewer than best_top_k qualified
};

/// Top best_top_k players by final rating among those with more than
/// best_min_games games. PreviousRank stores rank by last_rank ascending.
Selection SelectBestPlayers(const RatingStore& final_store, SystemKind system, const SetupSpec& spec);

/// Every player with more than frequent_min_games games, sorted by id.
std::vector<PlayerId> SelectFrequentPlayers(const RatingStore& final_store, const SetupSpec& spec);

// One player's chronological matches, as indices into the replayed stream.
using MatchHistory = std::vector<std::uint32_t>;

struct WindowedResult {
  MetricSeries series;
  bool truncated = false;  // some game index in 1..window had no match
  double value_sum = 0.0;   // over every bucketed match
  std::size_t value_count = 0;
};

/// Per-game-index means over the selected players' first `window` matches.
/// A match shared by several selected players is counted once, at its
/// smallest game index. `metric[m]` is NaN for matches excluded from
/// evaluation; those are dropped.
WindowedResult WindowedSeries(std::span<const double> metric,
                              const std::unordered_map<PlayerId, MatchHistory>& histories,
                              std::span<const PlayerId> selected, int window);

/// Splits values into min(n_bins, size) contiguous chunks, the first
/// size % n_bins of which hold one extra element, and averages each.
MetricSeries BinSeries(std::span<const double> values, int n_bins);

/// Population-weighted mean of a series.
double WeightedMean(const MetricSeries& series);

}  // namespace rankforge
