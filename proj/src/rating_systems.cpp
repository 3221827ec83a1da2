#include "rankforge/rating_systems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

namespace rankforge {
namespace {

constexpr double kProbClamp = 1e-12;
constexpr double kVerbatimSigmaFloor = 0.001;

double PairCount(std::size_t n) { return static_cast<double>(n) * static_cast<double>(n - 1) / 2.0; }

void CheckField(const Field& field, std::size_t i) {
  if (field.size() < 2) throw InvalidArgument("field needs at least 2 teams");
  if (i >= field.size()) throw InvalidArgument("team index out of range");
}

double FieldSigma(const FieldEntry& e) {
  if (!e.sigma || !(*e.sigma > 0.0)) {
    throw InvalidArgument(fmt::format("team '{}' has no positive deviation", e.team_key));
  }
  return *e.sigma;
}

// Teams sorted by `better`, ties by key.
std::vector<std::size_t> OrderTeams(const MatchRecord& match, const std::vector<double>& score,
                                    bool higher_first) {
  std::vector<std::size_t> order(match.teams.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b]) return higher_first ? score[a] > score[b] : score[a] < score[b];
    return match.teams[a].key < match.teams[b].key;
  });
  return order;
}

PredictionRecord MakeRecord(const MatchRecord& match, std::vector<double> scores, bool higher_first) {
  PredictionRecord rec;
  rec.match_id = match.match_id;
  rec.team_keys.reserve(match.teams.size());
  for (const Team& t : match.teams) rec.team_keys.push_back(t.key);
  rec.observed_ranks = match.observed_ranks;
  rec.order = OrderTeams(match, scores, higher_first);
  rec.team_ratings = std::move(scores);
  return rec;
}

// Per-pair contribution; both modes are applied by ApplyPairTerms.
struct PairTerms {
  double winner_mu = 0.0;
  double loser_mu = 0.0;
  double winner_sigma = 0.0;  // standard: variance multiplier; verbatim: additive sigma delta
  double loser_sigma = 0.0;
};

PairTerms ComputePairTerms(MuSigma w, MuSigma l, const SystemParams& p) {
  if (!(w.sigma > 0.0) || !(l.sigma > 0.0)) throw InvalidArgument("TrueSkill deviations must be positive");
  const double t = w.mu - l.mu;
  const double c = std::sqrt(2.0 * p.beta * p.beta + w.sigma * w.sigma + l.sigma * l.sigma);
  const double v = TrueSkillV(t / c);
  const double w_var = w.sigma * w.sigma;
  const double l_var = l.sigma * l.sigma;

  PairTerms terms;
  terms.winner_mu = w_var / c * v;
  terms.loser_mu = -l_var / c * v;
  if (p.trueskill_mode == TrueSkillMode::kStandard) {
    const double ww = v * (v + t / c);
    terms.winner_sigma = 1.0 - w_var / (c * c) * ww;
    terms.loser_sigma = 1.0 - l_var / (c * c) * ww;
  } else {
    const double ww = v * (v + t);
    terms.winner_sigma = -w.sigma * (w_var / (c * c) * ww);
    terms.loser_sigma = -l.sigma * (l_var / (c * c) * ww);
  }
  return terms;
}

struct Accumulator {
  double mu_delta = 0.0;
  double sigma_term;  // product of multipliers or sum of deltas
  explicit Accumulator(TrueSkillMode mode) : sigma_term(mode == TrueSkillMode::kStandard ? 1.0 : 0.0) {}

  void Add(double mu, double sigma, TrueSkillMode mode) {
    mu_delta += mu;
    if (mode == TrueSkillMode::kStandard) {
      sigma_term *= sigma;
    } else {
      sigma_term += sigma;
    }
  }

  MuSigma Apply(MuSigma pre, TrueSkillMode mode, int& floors) const {
    MuSigma out{pre.mu + mu_delta, 0.0};
    if (mode == TrueSkillMode::kStandard) {
      out.sigma = pre.sigma * std::sqrt(sigma_term);
    } else {
      out.sigma = pre.sigma + sigma_term;
      if (!(out.sigma > 0.0)) {
        out.sigma = kVerbatimSigmaFloor;
        ++floors;
      }
    }
    return out;
  }
};

}  // namespace

TrueSkillMode ParseTrueSkillMode(std::string_view tag) {
  if (tag == "standard") return TrueSkillMode::kStandard;
  if (tag == "paper_verbatim") return TrueSkillMode::kPaperVerbatim;
  throw ConfigError(fmt::format("unknown trueskill_mode '{}'", tag));
}

std::string_view TrueSkillModeName(TrueSkillMode mode) {
  return mode == TrueSkillMode::kStandard ? "standard" : "paper_verbatim";
}

void SystemParams::Validate() const {
  if (!(k > 0.0)) throw ConfigError("K must be positive");
  if (!(d > 0.0)) throw ConfigError("D must be positive");
  if (!(beta > 0.0)) throw ConfigError("beta must be positive");
  if (!(tau >= 0.0)) throw ConfigError("tau must be non-negative");
  if (!(q > 0.0)) throw ConfigError("q must be positive");
}

std::vector<std::string> PredictionRecord::PredictedKeys() const {
  std::vector<std::string> keys;
  keys.reserve(order.size());
  for (std::size_t i : order) keys.push_back(team_keys[i]);
  return keys;
}

std::vector<int> PredictionRecord::ObservedRanksInPredictedOrder() const {
  std::vector<int> ranks;
  ranks.reserve(order.size());
  for (std::size_t i : order) ranks.push_back(observed_ranks[i]);
  return ranks;
}

double EloWinProbability(const Field& field, std::size_t i, const SystemParams& params) {
  CheckField(field, i);
  const double mu_i = field.entries[i].mu;
  double sum = 0.0;
  for (std::size_t j = 0; j < field.size(); ++j) {
    if (j == i) continue;
    sum += 1.0 / (1.0 + std::exp((field.entries[j].mu - mu_i) / params.d));
  }
  return sum / PairCount(field.size());
}

double NormalizeObservedRank(std::size_t n, int rank) {
  if (n < 2) throw InvalidArgument("need at least 2 teams");
  if (rank < 1 || static_cast<std::size_t>(rank) > n) {
    throw InvalidArgument(fmt::format("rank {} outside 1..{}", rank, n));
  }
  return static_cast<double>(n - static_cast<std::size_t>(rank)) / PairCount(n);
}

double EloUpdateTeam(double team_mu, double r_prime, double win_prob, const SystemParams& params) {
  return team_mu + params.k * (r_prime - win_prob);
}

Distribution DistributeTeamDelta(std::span<const double> member_values, double team_delta) {
  if (member_values.empty()) throw InvalidArgument("empty team");
  Weights w = ContributionWeights(member_values);
  Distribution out;
  out.fallback = w.fallback;
  out.deltas.reserve(w.values.size());
  for (double wi : w.values) out.deltas.push_back(wi * team_delta);
  return out;
}

double GlickoG(double sigma, const SystemParams& params) {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  return 1.0 / std::sqrt(1.0 + 3.0 * params.q * params.q * sigma * sigma / pi2);
}

double GlickoWinProbability(const Field& field, std::size_t i, const SystemParams& params) {
  CheckField(field, i);
  const FieldEntry& ti = field.entries[i];
  const double si = FieldSigma(ti);
  double sum = 0.0;
  for (std::size_t j = 0; j < field.size(); ++j) {
    if (j == i) continue;
    const FieldEntry& tj = field.entries[j];
    const double sj = FieldSigma(tj);
    const double g = GlickoG(std::sqrt(si * si + sj * sj), params);
    sum += 1.0 / (1.0 + std::pow(10.0, -g * (ti.mu - tj.mu) / params.d));
  }
  return sum / PairCount(field.size());
}

double GlickoDSquared(const Field& field, std::size_t i, double win_prob, const SystemParams& params) {
  CheckField(field, i);
  const double pr = std::clamp(win_prob, kProbClamp, 1.0 - kProbClamp);
  double sum = 0.0;
  for (std::size_t j = 0; j < field.size(); ++j) {
    if (j == i) continue;
    const double g = GlickoG(field.entries[j].sigma.value_or(0.0), params);
    sum += g * g * pr * (1.0 - pr);
  }
  return 1.0 / (params.q * params.q * sum);
}

MuSigma GlickoUpdateTeam(MuSigma team, double r_prime, const Field& field, std::size_t i,
                         const SystemParams& params) {
  if (!(team.sigma > 0.0)) throw InvalidArgument("team deviation must be positive");
  const double pr = GlickoWinProbability(field, i, params);
  const double d2 = GlickoDSquared(field, i, pr, params);
  const double precision = 1.0 / (team.sigma * team.sigma) + 1.0 / d2;
  double g_sum = 0.0;
  for (std::size_t j = 0; j < field.size(); ++j) {
    if (j == i) continue;
    g_sum += GlickoG(FieldSigma(field.entries[j]), params);
  }
  return {team.mu + params.q / precision * g_sum * (r_prime - pr), std::sqrt(1.0 / precision)};
}

MemberDeltas GlickoDistribute(std::span<const MuSigma> members, double team_mu_delta,
                              double team_sigma_delta) {
  if (members.empty()) throw InvalidArgument("empty team");
  std::vector<double> mus, sigmas;
  mus.reserve(members.size());
  sigmas.reserve(members.size());
  for (const MuSigma& m : members) {
    mus.push_back(m.mu);
    sigmas.push_back(m.sigma);
  }
  Distribution dmu = DistributeTeamDelta(mus, team_mu_delta);
  Distribution dsigma = DistributeTeamDelta(sigmas, team_sigma_delta);
  return {std::move(dmu.deltas), std::move(dsigma.deltas),
          static_cast<int>(dmu.fallback) + static_cast<int>(dsigma.fallback)};
}

double TrueSkillV(double x) {
  if (x >= -5.0) {
    const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    const double cdf = 0.5 * std::erfc(-x / std::numbers::sqrt2);
    return pdf / cdf;
  }
  // Left tail: v(x) = 1 / R(-x) with the Mills ratio R(t) = cdf(-t) / pdf(t)
  // from its continued fraction t + 1/(t + 2/(t + 3/(t + ...))).
  const double t = -x;
  double frac = t;
  for (int k = 80; k >= 1; --k) frac = t + k / frac;
  return frac;
}

double InflateSigma(double sigma, const SystemParams& params) {
  return std::sqrt(sigma * sigma + params.tau * params.tau);
}

PairUpdate TrueSkillUpdatePair(MuSigma winner, MuSigma loser, const SystemParams& params) {
  const PairTerms terms = ComputePairTerms(winner, loser, params);
  Accumulator w(params.trueskill_mode), l(params.trueskill_mode);
  w.Add(terms.winner_mu, terms.winner_sigma, params.trueskill_mode);
  l.Add(terms.loser_mu, terms.loser_sigma, params.trueskill_mode);
  PairUpdate out;
  out.winner = w.Apply(winner, params.trueskill_mode, out.sigma_floors);
  out.loser = l.Apply(loser, params.trueskill_mode, out.sigma_floors);
  return out;
}

MatchUpdate TrueSkillUpdateMatch(std::span<const int> observed_ranks, std::span<const MuSigma> teams,
                                 const SystemParams& params) {
  const std::size_t n = teams.size();
  if (n < 2) throw InvalidArgument("need at least 2 teams");
  if (observed_ranks.size() != n) throw InvalidArgument("rank/team count mismatch");
  std::vector<int> ranks(observed_ranks.begin(), observed_ranks.end());
  if (!IsRankPermutation(ranks)) throw InvalidArgument("observed ranks must be a permutation");

  std::vector<std::size_t> by_rank(n);
  for (std::size_t i = 0; i < n; ++i) by_rank[ranks[i] - 1] = i;

  std::vector<Accumulator> acc(n, Accumulator(params.trueskill_mode));
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const std::size_t w = by_rank[k];
    const std::size_t l = by_rank[k + 1];
    const PairTerms terms = ComputePairTerms(teams[w], teams[l], params);
    acc[w].Add(terms.winner_mu, terms.winner_sigma, params.trueskill_mode);
    acc[l].Add(terms.loser_mu, terms.loser_sigma, params.trueskill_mode);
  }
  MatchUpdate out;
  out.teams.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.teams.push_back(acc[i].Apply(teams[i], params.trueskill_mode, out.sigma_floors));
  }
  return out;
}

PredictionRecord PreviousRankPredict(const MatchRecord& match, const RatingStore& store) {
  const double unseen = static_cast<double>(match.teams.size()) / 2.0;
  std::vector<double> scores;
  scores.reserve(match.teams.size());
  for (const Team& team : match.teams) {
    double score = 0.0;
    for (const PlayerId& p : team.members) {
      const Rating* r = store.Find(p);
      score += (r && r->last_rank) ? static_cast<double>(*r->last_rank) : unseen;
    }
    scores.push_back(score);
  }
  return MakeRecord(match, std::move(scores), /*higher_first=*/false);
}

PredictionRecord PredictRanks(SystemKind system, Aggregation aggregation, const MatchRecord& match,
                              const RatingStore& store, const SystemParams& params) {
  (void)params;
  if (system == SystemKind::kPreviousRank) return PreviousRankPredict(match, store);
  const Rating fallback = DefaultRating(system);
  std::vector<double> scores;
  scores.reserve(match.teams.size());
  std::vector<double> mus;
  for (const Team& team : match.teams) {
    mus.clear();
    for (const PlayerId& p : team.members) {
      const Rating* r = store.Find(p);
      mus.push_back((r ? *r : fallback).mu);
    }
    scores.push_back(AggregateMu(aggregation, mus));
  }
  return MakeRecord(match, std::move(scores), /*higher_first=*/true);
}

PredictionRecord ProcessMatch(SystemKind system, Aggregation aggregation, const MatchRecord& match,
                              RatingStore& store, const SystemParams& params, UpdateCounters* counters) {
  ValidateMatch(match);
  PredictionRecord prediction = PredictRanks(system, aggregation, match, store, params);

  // Working copies; the store is written only after every step succeeded.
  const Rating fallback = DefaultRating(system);
  std::vector<std::vector<Rating>> members(match.teams.size());
  for (std::size_t t = 0; t < match.teams.size(); ++t) {
    for (const PlayerId& p : match.teams[t].members) {
      const Rating* r = store.Find(p);
      members[t].push_back(r ? *r : fallback);
    }
  }

  UpdateCounters local;
  const std::size_t n = match.teams.size();

  if (system == SystemKind::kPreviousRank) {
    for (std::size_t t = 0; t < n; ++t) {
      for (Rating& r : members[t]) r.last_rank = match.observed_ranks[t];
    }
  } else {
    if (system == SystemKind::kTrueSkill) {
      for (auto& team : members) {
        for (Rating& r : team) r.sigma = InflateSigma(r.sigma.value(), params);
      }
    }

    Field field;
    field.entries.reserve(n);
    std::vector<std::vector<MuSigma>> ms(n);
    for (std::size_t t = 0; t < n; ++t) {
      std::vector<double> mus;
      for (const Rating& r : members[t]) {
        mus.push_back(r.mu);
        ms[t].push_back({r.mu, r.sigma.value_or(0.0)});
      }
      FieldEntry entry{match.teams[t].key, AggregateMu(aggregation, mus), std::nullopt};
      if (system != SystemKind::kElo) entry.sigma = AggregateSigma(aggregation, ms[t]);
      field.entries.push_back(std::move(entry));
    }

    std::vector<double> mu_delta(n), sigma_delta(n, 0.0);
    if (system == SystemKind::kElo) {
      for (std::size_t t = 0; t < n; ++t) {
        const double pr = EloWinProbability(field, t, params);
        const double r_prime = NormalizeObservedRank(n, match.observed_ranks[t]);
        mu_delta[t] = EloUpdateTeam(field.entries[t].mu, r_prime, pr, params) - field.entries[t].mu;
      }
    } else if (system == SystemKind::kGlicko) {
      for (std::size_t t = 0; t < n; ++t) {
        const FieldEntry& e = field.entries[t];
        const double r_prime = NormalizeObservedRank(n, match.observed_ranks[t]);
        const MuSigma updated = GlickoUpdateTeam({e.mu, *e.sigma}, r_prime, field, t, params);
        mu_delta[t] = updated.mu - e.mu;
        sigma_delta[t] = updated.sigma - *e.sigma;
      }
    } else {
      std::vector<MuSigma> teams;
      teams.reserve(n);
      for (const FieldEntry& e : field.entries) teams.push_back({e.mu, *e.sigma});
      const MatchUpdate updated = TrueSkillUpdateMatch(match.observed_ranks, teams, params);
      local.sigma_floors += static_cast<std::uint64_t>(updated.sigma_floors);
      for (std::size_t t = 0; t < n; ++t) {
        mu_delta[t] = updated.teams[t].mu - teams[t].mu;
        sigma_delta[t] = updated.teams[t].sigma - teams[t].sigma;
      }
    }

    for (std::size_t t = 0; t < n; ++t) {
      if (system == SystemKind::kElo) {
        std::vector<double> mus;
        for (const Rating& r : members[t]) mus.push_back(r.mu);
        const Distribution dist = DistributeTeamDelta(mus, mu_delta[t]);
        local.weight_fallbacks += dist.fallback ? 1 : 0;
        for (std::size_t m = 0; m < mus.size(); ++m) members[t][m].mu += dist.deltas[m];
      } else {
        const MemberDeltas dist = GlickoDistribute(ms[t], mu_delta[t], sigma_delta[t]);
        local.weight_fallbacks += static_cast<std::uint64_t>(dist.fallbacks);
        for (std::size_t m = 0; m < ms[t].size(); ++m) {
          members[t][m].mu += dist.mu[m];
          members[t][m].sigma = *members[t][m].sigma + dist.sigma[m];
        }
      }
    }
  }

  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t m = 0; m < members[t].size(); ++m) {
      Rating& r = members[t][m];
      ++r.games_played;
      store.Put(match.teams[t].members[m], std::move(r));
    }
  }
  if (counters) *counters += local;
  return prediction;
}

RatingEngine::RatingEngine(SystemKind system, Aggregation aggregation, SystemParams params)
    : system_(system), aggregation_(aggregation), params_(params) {
  params_.Validate();
}

}  // namespace rankforge
