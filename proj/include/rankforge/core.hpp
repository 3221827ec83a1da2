#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rankforge {

// Bad configuration: unknown tags, missing keys, invalid parameters.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input data: malformed rows, invalid matches, empty datasets.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition violated by a caller (empty team, rank out of range, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using PlayerId = std::string;

enum class SystemKind { kElo, kGlicko, kTrueSkill, kPreviousRank };

SystemKind ParseSystem(std::string_view tag);
std::string_view SystemName(SystemKind system);

// Per-player state. `mu` is unused (zero) for PreviousRank.
struct Rating {
  double mu = 0.0;
  std::optional<double> sigma;
  std::uint64_t games_played = 0;
  std::optional<int> last_rank;

  friend bool operator==(const Rating&, const Rating&) = default;
};

Rating DefaultRating(SystemKind system);

// Totally ordered timestamp. Values that parse as integers compare
// numerically and sort before non-integer values, which compare as strings.
class Timestamp {
 public:
  Timestamp() = default;
  explicit Timestamp(std::string text);

  const std::string& text() const { return text_; }

  std::strong_ordering operator<=>(const Timestamp& other) const;
  bool operator==(const Timestamp& other) const { return text_ == other.text_; }

 private:
  std::string text_;
  std::optional<std::int64_t> integer_;
};

struct Team {
  std::string key;
  std::vector<PlayerId> members;

  friend bool operator==(const Team&, const Team&) = default;
};

struct MatchRecord {
  std::string match_id;
  Timestamp timestamp;
  std::vector<Team> teams;
  std::vector<int> observed_ranks;  // aligned with teams, 1 = winner

  std::size_t team_count() const { return teams.size(); }
  bool equal_team_sizes() const;

  friend bool operator==(const MatchRecord&, const MatchRecord&) = default;
};

// Throws DataError describing the first violated invariant.
void ValidateMatch(const MatchRecord& match);

// True when `ranks` is a permutation of 1..ranks.size().
bool IsRankPermutation(const std::vector<int>& ranks);

// Replay order: timestamp, then match_id.
bool ChronologicalLess(const MatchRecord& a, const MatchRecord& b);

struct FieldEntry {
  std::string team_key;
  double mu = 0.0;
  std::optional<double> sigma;
};

struct Field {
  std::vector<FieldEntry> entries;

  std::size_t size() const { return entries.size(); }
};

class RatingStore {
 public:
  using Map = std::unordered_map<PlayerId, Rating>;

  const Rating* Find(const PlayerId& player) const;
  Rating& Put(const PlayerId& player, Rating rating);
  void Reserve(std::size_t n) { ratings_.reserve(n); }

  std::size_t size() const { return ratings_.size(); }
  const Map& ratings() const { return ratings_; }

  friend bool operator==(const RatingStore&, const RatingStore&) = default;

 private:
  friend Rating& GetOrInit(RatingStore&, const PlayerId&, SystemKind);
  Map ratings_;
};

// Returns the stored rating, inserting the system default on first sight.
Rating& GetOrInit(RatingStore& store, const PlayerId& player, SystemKind system);

}  // namespace rankforge
