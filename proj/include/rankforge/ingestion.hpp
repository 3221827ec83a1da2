#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "rankforge/core.hpp"
#include "rankforge/flat_config.hpp"

namespace rankforge {

inline constexpr std::string_view kCanonicalHeader = "match_id,timestamp,team_key,player_id,team_rank";

struct CanonicalRow {
  std::string match_id;
  std::string timestamp;
  std::string team_key;
  std::string player_id;
  int team_rank = 0;
};

struct ParseOptions {
  // Fraction of rows or matches that may be skipped before parsing fails.
  double max_skip_fraction = 0.10;
  // Reject matches whose teams differ in size (otherwise kept and flagged
  // at evaluation time).
  bool require_equal_team_sizes = false;
};

struct ParseResult {
  std::vector<MatchRecord> matches;  // sorted by (timestamp, match_id)
  std::vector<std::string> diagnostics;
  std::size_t rows_read = 0;
  std::size_t rows_skipped = 0;
  std::size_t matches_skipped = 0;
};

/// Reads canonical CSV, groups rows into matches, densely re-ranks team
/// placements, validates and sorts. Throws DataError on a bad header or when
/// more than max_skip_fraction of rows or matches are skipped.
ParseResult ParseCanonical(std::istream& in, const ParseOptions& options = {});

/// Writes matches in order, one row per player, teams in match order.
void SerializeCanonical(const std::vector<MatchRecord>& matches, std::ostream& out);

enum class RankSemantics { kTeamPlacement, kWinnerFlag };

// Raw dataset -> canonical rows. Built from a flat config whose keys are the
// canonical field names mapped to raw column headers, plus:
//   rank_semantics   = team_placement | winner_flag
//   team_size_filter = <n>      keep only teams with n players
//   team_size_column = <col>    read team size from this column instead of
//                               counting rows
struct AdapterSpec {
  std::string match_id_column;
  std::string timestamp_column;
  std::string team_key_column;
  std::string player_id_column;
  std::string team_rank_column;
  RankSemantics rank_semantics = RankSemantics::kTeamPlacement;
  std::optional<int> team_size_filter;
  std::optional<std::string> team_size_column;

  static AdapterSpec FromConfig(const FlatConfig& config);
};

struct AdaptStats {
  std::size_t rows_read = 0;
  std::size_t rows_written = 0;
  std::size_t rows_malformed = 0;
  std::size_t rows_filtered = 0;  // dropped by the team size filter
};

/// Maps raw columns onto the canonical header and writes canonical CSV.
/// Throws ConfigError before reading any row if a mapped column is missing.
AdaptStats AdaptDataset(std::istream& raw, const AdapterSpec& adapter, std::ostream& canonical);

/// Truthy winner flags: 1, true, t, yes, y, win, won, w (case-insensitive).
bool IsWinnerFlag(std::string_view value);

}  // namespace rankforge
