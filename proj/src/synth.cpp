#include "rankforge/synth.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

namespace rankforge {

void SynthConfig::Validate() const {
  if (team_size < 1) throw ConfigError("team_size must be at least 1");
  if (teams_per_match < 2) throw ConfigError("teams_per_match must be at least 2");
  if (n_matches < 0) throw ConfigError("n_matches must be non-negative");
  if (static_cast<std::int64_t>(n_players) < static_cast<std::int64_t>(team_size) * teams_per_match) {
    throw ConfigError(fmt::format("n_players ({}) is smaller than team_size x teams_per_match ({})", n_players,
                                  team_size * teams_per_match));
  }
  if (!(latent_sd > 0.0)) throw ConfigError("latent_sd must be positive");
  if (!(performance_noise_sd >= 0.0)) throw ConfigError("performance_noise_sd must be non-negative");
}

SynthConfig SynthConfig::FromConfig(const FlatConfig& c) {
  SynthConfig s;
  s.n_players = static_cast<int>(c.GetInt("n_players", s.n_players));
  s.latent_mean = c.GetDouble("latent_mean", s.latent_mean);
  s.latent_sd = c.GetDouble("latent_sd", s.latent_sd);
  s.team_size = static_cast<int>(c.GetInt("team_size", s.team_size));
  s.teams_per_match = static_cast<int>(c.GetInt("teams_per_match", s.teams_per_match));
  s.n_matches = static_cast<int>(c.GetInt("n_matches", s.n_matches));
  s.performance_noise_sd = c.GetDouble("performance_noise_sd", s.performance_noise_sd);
  s.seed = static_cast<std::uint64_t>(c.GetInt("seed", static_cast<std::int64_t>(s.seed)));
  s.latent_team_rule = ParseAggregation(c.GetString("latent_team_rule", "sum"));
  s.Validate();
  return s;
}

std::vector<int> SampleRanks(std::span<const double> team_scores, double noise_sd, std::mt19937_64& rng) {
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> perf(team_scores.begin(), team_scores.end());
  for (double& p : perf) p += noise_sd * noise(rng);
  std::vector<std::size_t> order(perf.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return perf[a] > perf[b]; });
  std::vector<int> ranks(perf.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) ranks[order[pos]] = static_cast<int>(pos) + 1;
  return ranks;
}

SynthData Generate(const SynthConfig& config) {
  config.Validate();
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> unit(0.0, 1.0);

  SynthData data;
  const int id_width = static_cast<int>(std::to_string(config.n_players).size());
  std::vector<double> latent(static_cast<std::size_t>(config.n_players));
  data.latent.reserve(latent.size());
  for (int p = 0; p < config.n_players; ++p) {
    latent[p] = config.latent_mean + config.latent_sd * unit(rng);
    data.latent.emplace_back(fmt::format("p{:0{}}", p, id_width), latent[p]);
  }

  const int match_width = static_cast<int>(std::to_string(config.n_matches).size());
  const std::size_t per_match = static_cast<std::size_t>(config.team_size) * config.teams_per_match;
  std::vector<int> pool(latent.size());
  std::iota(pool.begin(), pool.end(), 0);
  std::vector<double> member_latent;
  std::vector<double> scores(static_cast<std::size_t>(config.teams_per_match));

  data.matches.reserve(static_cast<std::size_t>(config.n_matches));
  for (int m = 0; m < config.n_matches; ++m) {
    // Partial Fisher-Yates: the first per_match slots become the sample.
    for (std::size_t i = 0; i < per_match; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
      std::swap(pool[i], pool[pick(rng)]);
    }
    MatchRecord rec;
    rec.match_id = fmt::format("m{:0{}}", m + 1, match_width);
    rec.timestamp = Timestamp(std::to_string(m + 1));
    for (int t = 0; t < config.teams_per_match; ++t) {
      Team team;
      team.key = fmt::format("t{}", t + 1);
      member_latent.clear();
      for (int k = 0; k < config.team_size; ++k) {
        const int player = pool[static_cast<std::size_t>(t) * config.team_size + k];
        team.members.push_back(data.latent[player].first);
        member_latent.push_back(latent[player]);
      }
      scores[t] = AggregateMu(config.latent_team_rule, member_latent);
      rec.teams.push_back(std::move(team));
    }
    rec.observed_ranks = SampleRanks(scores, config.performance_noise_sd, rng);
    data.matches.push_back(std::move(rec));
  }
  return data;
}

void WriteLatent(const SynthData& data, std::ostream& out) {
  out << "player_id,latent_skill\n";
  for (const auto& [id, skill] : data.latent) out << id << ',' << fmt::format("{:.6g}", skill) << '\n';
}

}  // namespace rankforge
