#pragma once

#include <cstdint>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rankforge/aggregation.hpp"
#include "rankforge/core.hpp"
#include "rankforge/flat_config.hpp"

namespace rankforge {

struct SynthConfig {
  int n_players = 1000;
  double latent_mean = 0.0;
  double latent_sd = 1.0;
  int team_size = 2;
  int teams_per_match = 2;
  int n_matches = 10000;
  double performance_noise_sd = 0.25;  // 0 gives noiseless outcomes
  std::uint64_t seed = 1;
  Aggregation latent_team_rule = Aggregation::kSum;

  // Throws ConfigError.
  void Validate() const;
  static SynthConfig FromConfig(const FlatConfig& config);
};

struct SynthData {
  std::vector<MatchRecord> matches;  // timestamps 1..n_matches
  std::vector<std::pair<PlayerId, double>> latent;  // every player, by index
};

/// Latent skills ~ Normal(mean, sd^2), drawn once. Each match samples
/// players without replacement; team performance is the latent team rule
/// plus Normal(0, noise^2); ranks follow performance, highest first.
SynthData Generate(const SynthConfig& config);

/// Ranks (1 = best) for noisy team performances drawn around `team_scores`.
/// Exact ties go to the lower index.
std::vector<int> SampleRanks(std::span<const double> team_scores, double noise_sd, std::mt19937_64& rng);

/// Writes `player_id,latent_skill`.
void WriteLatent(const SynthData& data, std::ostream& out);

}  // namespace rankforge
