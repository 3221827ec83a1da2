#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rankforge/aggregation.hpp"
#include "rankforge/core.hpp"

namespace rankforge {

enum class TrueSkillMode {
  kStandard,       // v(t/c) with the variance-form deviation update
  kPaperVerbatim,  // sigma' = sigma - sigma * (sigma^2/c^2 * v * (v + t)), floored
};

TrueSkillMode ParseTrueSkillMode(std::string_view tag);
std::string_view TrueSkillModeName(TrueSkillMode mode);

struct SystemParams {
  double k = 10.0;         // Elo magnitude factor
  double d = 400.0;        // Elo/Glicko scale
  double beta = 4.16;      // TrueSkill performance noise
  double tau = 0.0833;     // TrueSkill dynamics, added in quadrature before each match
  double q = 0.0057565;    // Glicko constant, ln(10)/400
  TrueSkillMode trueskill_mode = TrueSkillMode::kStandard;

  // Throws ConfigError.
  void Validate() const;
};

// Warning counters accumulated over a replay.
struct UpdateCounters {
  std::uint64_t weight_fallbacks = 0;  // uniform weights used for a team
  std::uint64_t sigma_floors = 0;      // verbatim-mode TrueSkill deviation floored

  UpdateCounters& operator+=(const UpdateCounters& o) {
    weight_fallbacks += o.weight_fallbacks;
    sigma_floors += o.sigma_floors;
    return *this;
  }
  friend bool operator==(const UpdateCounters&, const UpdateCounters&) = default;
};

struct PredictionRecord {
  std::string match_id;
  std::vector<std::string> team_keys;  // match order
  std::vector<int> observed_ranks;     // match order
  std::vector<double> team_ratings;    // match order; PreviousRank stores its team score
  std::vector<std::size_t> order;      // team indices, predicted best first

  std::vector<std::string> PredictedKeys() const;
  // Observed rank of the team predicted at each position.
  std::vector<int> ObservedRanksInPredictedOrder() const;

  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

// ---- Extended Elo ---------------------------------------------------------

/// Probability that team `i` wins the field: the sum of its pairwise
/// logistic (base e) win chances divided by C(N,2).
double EloWinProbability(const Field& field, std::size_t i, const SystemParams& params);

/// (N - rank) / C(N,2); the values of a full ranking sum to one.
double NormalizeObservedRank(std::size_t n, int rank);

double EloUpdateTeam(double team_mu, double r_prime, double win_prob, const SystemParams& params);

struct Distribution {
  std::vector<double> deltas;
  bool fallback = false;
};

/// Splits a team delta across members in proportion to `member_values`.
Distribution DistributeTeamDelta(std::span<const double> member_values, double team_delta);

// ---- Extended Glicko ------------------------------------------------------

double GlickoG(double sigma, const SystemParams& params);

/// Pairwise base-10 Glicko expectations averaged over C(N,2).
/// Every entry of the field needs a positive sigma.
double GlickoWinProbability(const Field& field, std::size_t i, const SystemParams& params);

/// Inverse information of the field for team `i`. The probability is clamped
/// to [1e-12, 1 - 1e-12].
double GlickoDSquared(const Field& field, std::size_t i, double win_prob, const SystemParams& params);

/// Team posterior: mean step scaled by the combined precision, deviation
/// sqrt(1 / (1/sigma^2 + 1/d^2)).
MuSigma GlickoUpdateTeam(MuSigma team, double r_prime, const Field& field, std::size_t i,
                         const SystemParams& params);

struct MemberDeltas {
  std::vector<double> mu;
  std::vector<double> sigma;
  int fallbacks = 0;  // 0..2, one per weight vector that fell back
};

MemberDeltas GlickoDistribute(std::span<const MuSigma> members, double team_mu_delta,
                              double team_sigma_delta);

// ---- TrueSkill (two-team, no draws) ---------------------------------------

/// pdf(x) / cdf(x) of the standard normal, stable far into the left tail.
double TrueSkillV(double x);

struct PairUpdate {
  MuSigma winner;
  MuSigma loser;
  int sigma_floors = 0;
};

PairUpdate TrueSkillUpdatePair(MuSigma winner, MuSigma loser, const SystemParams& params);

struct MatchUpdate {
  std::vector<MuSigma> teams;  // aligned with the input
  int sigma_floors = 0;
};

/// Multi-team update as adjacent-rank pairs, all evaluated against the
/// pre-match values and applied together.
MatchUpdate TrueSkillUpdateMatch(std::span<const int> observed_ranks, std::span<const MuSigma> teams,
                                 const SystemParams& params);

/// Inflates a deviation by the dynamics factor: sqrt(sigma^2 + tau^2).
double InflateSigma(double sigma, const SystemParams& params);

// ---- Prediction and replay ------------------------------------------------

/// PreviousRank: team score is the sum of member last ranks (N/2 for
/// unseen players); lower scores rank first.
PredictionRecord PreviousRankPredict(const MatchRecord& match, const RatingStore& store);

/// Orders teams by aggregated mu (descending), ties by team key. Does not
/// modify the store; unseen players read as defaults.
PredictionRecord PredictRanks(SystemKind system, Aggregation aggregation, const MatchRecord& match,
                              const RatingStore& store, const SystemParams& params);

/// Predicts, then updates every member from the observed ranks. The store is
/// left untouched if anything throws.
PredictionRecord ProcessMatch(SystemKind system, Aggregation aggregation, const MatchRecord& match,
                              RatingStore& store, const SystemParams& params,
                              UpdateCounters* counters = nullptr);

// One configuration's replay state.
class RatingEngine {
 public:
  RatingEngine(SystemKind system, Aggregation aggregation, SystemParams params = {});

  PredictionRecord Process(const MatchRecord& match) {
    return ProcessMatch(system_, aggregation_, match, store_, params_, &counters_);
  }

  SystemKind system() const { return system_; }
  Aggregation aggregation() const { return aggregation_; }
  const SystemParams& params() const { return params_; }
  const RatingStore& store() const { return store_; }
  RatingStore& store() { return store_; }
  const UpdateCounters& counters() const { return counters_; }

 private:
  SystemKind system_;
  Aggregation aggregation_;
  SystemParams params_;
  RatingStore store_;
  UpdateCounters counters_;
};

}  // namespace rankforge
