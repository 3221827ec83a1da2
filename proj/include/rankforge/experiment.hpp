#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rankforge/aggregation.hpp"
#include "rankforge/core.hpp"
#include "rankforge/evaluation.hpp"
#include "rankforge/flat_config.hpp"
#include "rankforge/ingestion.hpp"
#include "rankforge/rating_systems.hpp"

namespace rankforge {

inline constexpr std::string_view kToolVersion = "1.0.0";

struct ExperimentConfig {
  std::string dataset_path;
  std::optional<std::string> adapter_path;  // dataset is raw when set
  std::string dataset_name;
  std::vector<SystemKind> systems;
  std::vector<Aggregation> aggregations;
  std::vector<SetupKind> setups;
  SystemParams params;
  SetupSpec setup;  // thresholds shared by all setups; `kind` unused
  MetricKind metric = MetricKind::kAuto;
  int threads = 0;  // 0: OpenMP default

  // Throws ConfigError.
  static ExperimentConfig FromConfig(const FlatConfig& config);
  void Validate() const;
  // Every setting with defaults filled in, for the run manifest.
  FlatConfig Resolved() const;
};

// One configuration to replay. PreviousRank has no aggregation.
struct PassKey {
  SystemKind system = SystemKind::kElo;
  std::optional<Aggregation> aggregation;

  std::string AggregationLabel() const;
  friend bool operator==(const PassKey&, const PassKey&) = default;
};

std::vector<PassKey> ExpandPasses(const ExperimentConfig& config);

struct PassResult {
  PassKey key;
  std::vector<double> metric;  // per match; NaN when excluded from evaluation
  std::unordered_map<PlayerId, MatchHistory> histories;  // first `history_cap` matches
  RatingStore final_store;
  UpdateCounters counters;
  std::size_t excluded_matches = 0;
};

/// Replays the whole stream chronologically from default ratings.
PassResult ReplayPass(const std::vector<MatchRecord>& matches, const PassKey& key, const SystemParams& params,
                      MetricKind metric, std::size_t history_cap);

/// Reference: one pass after another.
std::vector<PassResult> RunPassesSerial(const std::vector<MatchRecord>& matches, const std::vector<PassKey>& keys,
                                        const SystemParams& params, MetricKind metric, std::size_t history_cap);

/// Same results as RunPassesSerial; passes run concurrently with OpenMP.
std::vector<PassResult> RunPassesParallel(const std::vector<MatchRecord>& matches,
                                          const std::vector<PassKey>& keys, const SystemParams& params,
                                          MetricKind metric, std::size_t history_cap, int threads = 0);

/// Accuracy when every match is head-to-head, NDCG otherwise.
MetricKind ResolveMetric(MetricKind requested, const std::vector<MatchRecord>& matches);

struct CellResult {
  PassKey key;
  SetupKind setup = SetupKind::kAll;
  double value = 0.0;  // NaN when no match qualified
  std::size_t n_matches = 0;
  MetricSeries series;
  std::vector<std::string> warnings;
};

std::vector<CellResult> EvaluatePass(const PassResult& pass, const std::vector<SetupKind>& setups,
                                     const SetupSpec& spec, bool head_to_head);

struct ExperimentResult {
  ExperimentConfig config;
  MetricKind metric = MetricKind::kAuto;
  std::size_t n_matches = 0;
  std::size_t rows_read = 0;
  std::size_t rows_skipped = 0;
  std::size_t matches_skipped = 0;
  std::vector<PassResult> passes;
  std::vector<CellResult> cells;
};

/// Loads the dataset (adapting it first when an adapter is configured).
/// Throws DataError for unusable or empty data.
ParseResult LoadDataset(const ExperimentConfig& config);

ExperimentResult RunExperiment(const ExperimentConfig& config, const std::vector<MatchRecord>& matches);
ExperimentResult RunExperiment(const ExperimentConfig& config);

/// Writes summary.csv, series_<system>_<agg>_<setup>.csv and
/// run_manifest.json. Files already written are removed if a write fails.
void EmitReport(const ExperimentResult& result, const std::filesystem::path& out_dir);

std::string SeriesFileName(const CellResult& cell);
std::string FormatReal(double value);

}  // namespace rankforge
