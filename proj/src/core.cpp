#include "rankforge/core.hpp"

#include <algorithm>
#include <charconv>
#include <unordered_set>

#include <fmt/format.h>

namespace rankforge {

SystemKind ParseSystem(std::string_view tag) {
  if (tag == "elo") return SystemKind::kElo;
  if (tag == "glicko") return SystemKind::kGlicko;
  if (tag == "trueskill") return SystemKind::kTrueSkill;
  if (tag == "previousrank") return SystemKind::kPreviousRank;
  throw ConfigError(fmt::format("unknown rating system '{}'", tag));
}

std::string_view SystemName(SystemKind system) {
  switch (system) {
    case SystemKind::kElo:
      return "elo";
    case SystemKind::kGlicko:
      return "glicko";
    case SystemKind::kTrueSkill:
      return "trueskill";
    case SystemKind::kPreviousRank:
      return "previousrank";
  }
  return "unknown";
}

Rating DefaultRating(SystemKind system) {
  Rating r;
  switch (system) {
    case SystemKind::kElo:
      r.mu = 1500.0;
      break;
    case SystemKind::kGlicko:
      r.mu = 1500.0;
      r.sigma = 350.0;
      break;
    case SystemKind::kTrueSkill:
      r.mu = 25.0;
      r.sigma = 25.0 / 3.0;
      break;
    case SystemKind::kPreviousRank:
      break;
  }
  return r;
}

Timestamp::Timestamp(std::string text) : text_(std::move(text)) {
  std::int64_t value = 0;
  const char* first = text_.data();
  const char* last = first + text_.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (!text_.empty() && ec == std::errc() && ptr == last) integer_ = value;
}

std::strong_ordering Timestamp::operator<=>(const Timestamp& other) const {
  if (integer_ && other.integer_) {
    if (auto c = *integer_ <=> *other.integer_; c != 0) return c;
    return text_ <=> other.text_;  // "007" vs "7"
  }
  if (integer_) return std::strong_ordering::less;
  if (other.integer_) return std::strong_ordering::greater;
  return text_ <=> other.text_;
}

bool MatchRecord::equal_team_sizes() const {
  return std::all_of(teams.begin(), teams.end(), [&](const Team& t) {
    return t.members.size() == teams.front().members.size();
  });
}

bool IsRankPermutation(const std::vector<int>& ranks) {
  std::vector<bool> seen(ranks.size() + 1, false);
  for (int r : ranks) {
    if (r < 1 || static_cast<std::size_t>(r) > ranks.size() || seen[r]) return false;
    seen[r] = true;
  }
  return true;
}

void ValidateMatch(const MatchRecord& match) {
  if (match.teams.size() < 2) {
    throw DataError(fmt::format("match '{}': needs at least 2 teams, has {}",
                                match.match_id, match.teams.size()));
  }
  if (match.observed_ranks.size() != match.teams.size()) {
    throw DataError(fmt::format("match '{}': {} ranks for {} teams", match.match_id,
                                match.observed_ranks.size(), match.teams.size()));
  }
  if (!IsRankPermutation(match.observed_ranks)) {
    throw DataError(fmt::format("match '{}': observed ranks are not a permutation of 1..{}",
                                match.match_id, match.teams.size()));
  }
  std::unordered_set<std::string_view> keys;
  std::unordered_set<std::string_view> players;
  for (const Team& team : match.teams) {
    if (!keys.insert(team.key).second) {
      throw DataError(fmt::format("match '{}': duplicate team key '{}'", match.match_id, team.key));
    }
    if (team.members.empty()) {
      throw DataError(fmt::format("match '{}': team '{}' is empty", match.match_id, team.key));
    }
    for (const PlayerId& p : team.members) {
      if (p.empty()) {
        throw DataError(fmt::format("match '{}': empty player id", match.match_id));
      }
      if (!players.insert(p).second) {
        throw DataError(fmt::format("match '{}': player '{}' appears twice", match.match_id, p));
      }
    }
  }
}

bool ChronologicalLess(const MatchRecord& a, const MatchRecord& b) {
  if (auto c = a.timestamp <=> b.timestamp; c != 0) return c < 0;
  return a.match_id < b.match_id;
}

const Rating* RatingStore::Find(const PlayerId& player) const {
  auto it = ratings_.find(player);
  return it == ratings_.end() ? nullptr : &it->second;
}

Rating& RatingStore::Put(const PlayerId& player, Rating rating) {
  return ratings_.insert_or_assign(player, std::move(rating)).first->second;
}

Rating& GetOrInit(RatingStore& store, const PlayerId& player, SystemKind system) {
  auto it = store.ratings_.find(player);
  if (it != store.ratings_.end()) return it->second;
  return store.ratings_.emplace(player, DefaultRating(system)).first->second;
}

}  // namespace rankforge
