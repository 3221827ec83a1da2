#include "rankforge/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace rankforge {

SetupKind ParseSetup(std::string_view tag) {
  if (tag == "all") return SetupKind::kAll;
  if (tag == "best") return SetupKind::kBest;
  if (tag == "frequent") return SetupKind::kFrequent;
  throw ConfigError(fmt::format("unknown setup '{}'", tag));
}

std::string_view SetupName(SetupKind setup) {
  switch (setup) {
    case SetupKind::kAll:
      return "all";
    case SetupKind::kBest:
      return "best";
    case SetupKind::kFrequent:
      return "frequent";
  }
  return "unknown";
}

MetricKind ParseMetric(std::string_view tag) {
  if (tag == "auto") return MetricKind::kAuto;
  if (tag == "ndcg") return MetricKind::kNdcg;
  if (tag == "accuracy") return MetricKind::kAccuracy;
  throw ConfigError(fmt::format("unknown metric '{}'", tag));
}

std::string_view MetricName(MetricKind metric) {
  switch (metric) {
    case MetricKind::kAuto:
      return "auto";
    case MetricKind::kNdcg:
      return "ndcg";
    case MetricKind::kAccuracy:
      return "accuracy";
  }
  return "unknown";
}

void SetupSpec::Validate() const {
  if (best_top_k < 1) throw ConfigError("best_top_k must be at least 1");
  if (best_min_games < 0 || frequent_min_games < 0) throw ConfigError("min games must be non-negative");
  if (best_window < 1 || frequent_window < 1) throw ConfigError("evaluation windows must be at least 1");
  if (best_window > best_min_games) throw ConfigError("best_window exceeds best_min_games");
  if (frequent_window > frequent_min_games) throw ConfigError("frequent_window exceeds frequent_min_games");
  if (bins < 1) throw ConfigError("bins must be at least 1");
}

double NdcgFromRanks(std::span<const int> ranks) {
  const std::size_t n = ranks.size();
  if (n < 2) throw InvalidArgument("NDCG needs at least 2 teams");
  std::vector<int> check(ranks.begin(), ranks.end());
  if (!IsRankPermutation(check)) throw InvalidArgument("NDCG ranks must be a permutation");
  double dcg = 0.0;
  double idcg = 0.0;
  for (std::size_t pos = 0; pos < n; ++pos) {
    const double discount = std::log2(static_cast<double>(pos) + 2.0);
    dcg += static_cast<double>(n - static_cast<std::size_t>(ranks[pos])) / discount;
    idcg += static_cast<double>(n - 1 - pos) / discount;
  }
  if (dcg == idcg) return 1.0;
  return dcg / idcg;
}

double Ndcg(std::span<const std::string> predicted_order,
            const std::unordered_map<std::string, int>& observed_ranks) {
  if (predicted_order.size() != observed_ranks.size()) {
    throw InvalidArgument("predicted order and observed ranks cover different teams");
  }
  std::vector<int> ranks;
  ranks.reserve(predicted_order.size());
  for (const std::string& key : predicted_order) {
    auto it = observed_ranks.find(key);
    if (it == observed_ranks.end()) throw InvalidArgument(fmt::format("team '{}' has no observed rank", key));
    ranks.push_back(it->second);
  }
  return NdcgFromRanks(ranks);
}

int AccuracyOutcome(const PredictionRecord& prediction) {
  if (prediction.order.size() != 2) throw InvalidArgument("accuracy is defined for head-to-head matches only");
  return prediction.observed_ranks[prediction.order.front()] == 1 ? 1 : 0;
}

double MatchMetric(const PredictionRecord& prediction, MetricKind metric) {
  switch (metric) {
    case MetricKind::kAccuracy:
      return AccuracyOutcome(prediction);
    case MetricKind::kNdcg:
      return NdcgFromRanks(prediction.ObservedRanksInPredictedOrder());
    case MetricKind::kAuto:
      break;
  }
  throw InvalidArgument("metric must be resolved before scoring");
}

Selection SelectBestPlayers(const RatingStore& final_store, SystemKind system, const SetupSpec& spec) {
  struct Candidate {
    const PlayerId* id;
    double score;  // higher is better
  };
  std::vector<Candidate> candidates;
  for (const auto& [id, r] : final_store.ratings()) {
    if (r.games_played <= static_cast<std::uint64_t>(spec.best_min_games)) continue;
    const double score = system == SystemKind::kPreviousRank
                             ? -static_cast<double>(r.last_rank.value_or(std::numeric_limits<int>::max()))
                             : r.mu;
    candidates.push_back({&id, score});
  }
  const std::size_t k = static_cast<std::size_t>(spec.best_top_k);
  auto better = [](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return *a.id < *b.id;
  };
  const std::size_t take = std::min(k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                    candidates.end(), better);
  Selection sel;
  sel.short_of_target = candidates.size() < k;
  sel.players.reserve(take);
  for (std::size_t i = 0; i < take; ++i) sel.players.push_back(*candidates[i].id);
  return sel;
}

std::vector<PlayerId> SelectFrequentPlayers(const RatingStore& final_store, const SetupSpec& spec) {
  std::vector<PlayerId> out;
  for (const auto& [id, r] : final_store.ratings()) {
    if (r.games_played > static_cast<std::uint64_t>(spec.frequent_min_games)) out.push_back(id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

WindowedResult WindowedSeries(std::span<const double> metric,
                              const std::unordered_map<PlayerId, MatchHistory>& histories,
                              std::span<const PlayerId> selected, int window) {
  if (window < 1) throw InvalidArgument("window must be at least 1");
  // Smallest qualifying game index per match.
  std::unordered_map<std::uint32_t, int> first_index;
  for (const PlayerId& p : selected) {
    auto it = histories.find(p);
    if (it == histories.end()) continue;
    const MatchHistory& h = it->second;
    const std::size_t limit = std::min(h.size(), static_cast<std::size_t>(window));
    for (std::size_t g = 0; g < limit; ++g) {
      const int index = static_cast<int>(g) + 1;
      auto [slot, inserted] = first_index.emplace(h[g], index);
      if (!inserted) slot->second = std::min(slot->second, index);
    }
  }
  std::vector<double> sum(static_cast<std::size_t>(window) + 1, 0.0);
  std::vector<std::size_t> count(static_cast<std::size_t>(window) + 1, 0);
  WindowedResult out;
  // Visit matches in stream order so sums are reproducible.
  std::vector<std::pair<std::uint32_t, int>> entries(first_index.begin(), first_index.end());
  std::sort(entries.begin(), entries.end());
  for (const auto& [match, index] : entries) {
    const double value = metric[match];
    if (std::isnan(value)) continue;
    sum[index] += value;
    ++count[index];
    out.value_sum += value;
    ++out.value_count;
  }
  for (int g = 1; g <= window; ++g) {
    if (count[g] == 0) {
      out.truncated = true;
      continue;
    }
    out.series.x.push_back(g);
    out.series.y.push_back(sum[g] / static_cast<double>(count[g]));
    out.series.population.push_back(count[g]);
  }
  return out;
}

MetricSeries BinSeries(std::span<const double> values, int n_bins) {
  if (n_bins < 1) throw InvalidArgument("n_bins must be at least 1");
  MetricSeries out;
  const std::size_t n = values.size();
  const std::size_t bins = std::min(static_cast<std::size_t>(n_bins), n);
  if (bins == 0) return out;
  const std::size_t base = n / bins;
  const std::size_t extra = n % bins;
  std::size_t pos = 0;
  for (std::size_t b = 0; b < bins; ++b) {
    const std::size_t len = base + (b < extra ? 1 : 0);
    double sum = 0.0;
    for (std::size_t i = 0; i < len; ++i) sum += values[pos + i];
    out.x.push_back(static_cast<double>(b + 1));
    out.y.push_back(sum / static_cast<double>(len));
    out.population.push_back(len);
    pos += len;
  }
  return out;
}

double WeightedMean(const MetricSeries& series) {
  double sum = 0.0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < series.y.size(); ++i) {
    const std::size_t pop = i < series.population.size() ? series.population[i] : 1;
    sum += series.y[i] * static_cast<double>(pop);
    total += pop;
  }
  return total == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(total);
}

}  // namespace rankforge
