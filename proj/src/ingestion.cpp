#include "rankforge/ingestion.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <unordered_map>

#include <fmt/format.h>

#include "rankforge/csv.hpp"

namespace rankforge {
namespace {

constexpr std::size_t kCanonicalFields = 5;

std::optional<int> ParsePositiveInt(std::string_view s) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || value < 1) return std::nullopt;
  return value;
}

void StripBom(std::vector<std::string>& header) {
  if (!header.empty() && header.front().rfind("\xEF\xBB\xBF", 0) == 0) header.front().erase(0, 3);
}

struct TeamBuild {
  std::string key;
  int rank = 0;
  std::vector<PlayerId> members;
};

struct MatchBuild {
  std::string id;
  std::string timestamp;
  std::vector<TeamBuild> teams;
  std::unordered_map<std::string, std::size_t> team_index;
  std::string error;  // first grouping error, empty if none
};

// Maps distinct placements onto 1..N preserving order. Fails on ties.
bool DenseRerank(std::vector<int>& ranks) {
  std::vector<int> distinct = ranks;
  std::sort(distinct.begin(), distinct.end());
  if (std::adjacent_find(distinct.begin(), distinct.end()) != distinct.end()) return false;
  for (int& r : ranks) r = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), r) - distinct.begin()) + 1;
  return true;
}

}  // namespace

ParseResult ParseCanonical(std::istream& in, const ParseOptions& options) {
  csv::Reader reader(in);
  std::vector<std::string> fields;
  if (reader.Next(fields) != csv::Reader::Status::kRecord) {
    throw DataError("canonical CSV: missing header row");
  }
  StripBom(fields);
  std::string header;
  for (std::size_t i = 0; i < fields.size(); ++i) header += (i ? "," : "") + fields[i];
  if (header != kCanonicalHeader) {
    throw DataError(fmt::format("canonical CSV: expected header '{}', got '{}'", kCanonicalHeader, header));
  }

  ParseResult result;
  std::vector<MatchBuild> builds;
  std::unordered_map<std::string, std::size_t> match_index;

  while (true) {
    const auto status = reader.Next(fields);
    if (status == csv::Reader::Status::kEnd) break;
    if (status == csv::Reader::Status::kRecord && fields.size() == 1 && fields[0].empty()) continue;
    ++result.rows_read;
    auto skip = [&](std::string_view why) {
      ++result.rows_skipped;
      result.diagnostics.push_back(fmt::format("line {}: {}", reader.line(), why));
    };
    if (status == csv::Reader::Status::kMalformed) {
      skip("malformed quoting");
      continue;
    }
    if (fields.size() != kCanonicalFields) {
      skip(fmt::format("expected {} fields, got {}", kCanonicalFields, fields.size()));
      continue;
    }
    if (fields[0].empty() || fields[1].empty() || fields[2].empty() || fields[3].empty()) {
      skip("empty match_id, timestamp, team_key or player_id");
      continue;
    }
    const auto rank = ParsePositiveInt(fields[4]);
    if (!rank) {
      skip(fmt::format("team_rank '{}' is not a positive integer", fields[4]));
      continue;
    }

    auto [mit, new_match] = match_index.emplace(fields[0], builds.size());
    if (new_match) {
      builds.push_back({});
      builds.back().id = fields[0];
      builds.back().timestamp = fields[1];
    }
    MatchBuild& m = builds[mit->second];
    if (m.timestamp != fields[1] && m.error.empty()) {
      m.error = fmt::format("timestamps disagree ('{}' vs '{}')", m.timestamp, fields[1]);
    }
    auto [tit, new_team] = m.team_index.emplace(fields[2], m.teams.size());
    if (new_team) m.teams.push_back({fields[2], *rank, {}});
    TeamBuild& t = m.teams[tit->second];
    if (t.rank != *rank && m.error.empty()) {
      m.error = fmt::format("team '{}' has ranks {} and {}", t.key, t.rank, *rank);
    }
    t.members.push_back(std::move(fields[3]));
  }

  for (MatchBuild& b : builds) {
    MatchRecord rec;
    rec.match_id = b.id;
    rec.timestamp = Timestamp(b.timestamp);
    for (TeamBuild& t : b.teams) {
      rec.observed_ranks.push_back(t.rank);
      rec.teams.push_back({std::move(t.key), std::move(t.members)});
    }
    std::string error = b.error;
    if (error.empty() && !DenseRerank(rec.observed_ranks)) error = "tied team ranks";
    if (error.empty()) {
      try {
        ValidateMatch(rec);
      } catch (const DataError& e) {
        error = e.what();
      }
    }
    if (error.empty() && options.require_equal_team_sizes && !rec.equal_team_sizes()) {
      error = "teams differ in size";
    }
    if (!error.empty()) {
      ++result.matches_skipped;
      result.diagnostics.push_back(fmt::format("match '{}' skipped: {}", b.id, error));
      continue;
    }
    result.matches.push_back(std::move(rec));
  }

  const auto too_many = [&](std::size_t skipped, std::size_t total) {
    return total > 0 && static_cast<double>(skipped) > options.max_skip_fraction * static_cast<double>(total);
  };
  if (too_many(result.rows_skipped, result.rows_read)) {
    throw DataError(fmt::format("{} of {} rows malformed (first: {})", result.rows_skipped, result.rows_read,
                                result.diagnostics.front()));
  }
  if (too_many(result.matches_skipped, builds.size())) {
    throw DataError(fmt::format("{} of {} matches failed validation", result.matches_skipped, builds.size()));
  }

  std::sort(result.matches.begin(), result.matches.end(), ChronologicalLess);
  return result;
}

void SerializeCanonical(const std::vector<MatchRecord>& matches, std::ostream& out) {
  out << kCanonicalHeader << '\n';
  for (const MatchRecord& m : matches) {
    for (std::size_t t = 0; t < m.teams.size(); ++t) {
      const std::string rank = std::to_string(m.observed_ranks.at(t));
      for (const PlayerId& p : m.teams[t].members) {
        csv::WriteRecord(out, {m.match_id, m.timestamp.text(), m.teams[t].key, p, rank});
      }
    }
  }
}

bool IsWinnerFlag(std::string_view value) {
  std::string v = Trim(value);
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  return v == "1" || v == "true" || v == "t" || v == "yes" || v == "y" || v == "win" || v == "won" ||
         v == "w";
}

AdapterSpec AdapterSpec::FromConfig(const FlatConfig& config) {
  AdapterSpec spec;
  spec.match_id_column = config.Require("match_id");
  spec.timestamp_column = config.Require("timestamp");
  spec.team_key_column = config.Require("team_key");
  spec.player_id_column = config.Require("player_id");
  spec.team_rank_column = config.Require("team_rank");
  const std::string semantics = config.GetString("rank_semantics", "team_placement");
  if (semantics == "team_placement") {
    spec.rank_semantics = RankSemantics::kTeamPlacement;
  } else if (semantics == "winner_flag") {
    spec.rank_semantics = RankSemantics::kWinnerFlag;
  } else {
    throw ConfigError(fmt::format("unknown rank_semantics '{}'", semantics));
  }
  if (config.Has("team_size_filter")) {
    const auto n = config.GetInt("team_size_filter", 0);
    if (n < 1) throw ConfigError("team_size_filter must be positive");
    spec.team_size_filter = static_cast<int>(n);
  }
  if (auto col = config.Get("team_size_column"); col && !col->empty()) spec.team_size_column = *col;
  return spec;
}

AdaptStats AdaptDataset(std::istream& raw, const AdapterSpec& adapter, std::ostream& canonical) {
  csv::Reader reader(raw);
  std::vector<std::string> header;
  if (reader.Next(header) != csv::Reader::Status::kRecord) throw DataError("raw CSV: missing header row");
  StripBom(header);
  for (std::string& h : header) h = Trim(h);

  auto column = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ConfigError(fmt::format("raw CSV has no column '{}'", name));
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_match = column(adapter.match_id_column);
  const std::size_t c_time = column(adapter.timestamp_column);
  const std::size_t c_team = column(adapter.team_key_column);
  const std::size_t c_player = column(adapter.player_id_column);
  const std::size_t c_rank = column(adapter.team_rank_column);
  std::optional<std::size_t> c_size;
  if (adapter.team_size_column) c_size = column(*adapter.team_size_column);
  const std::size_t needed = std::max({c_match, c_time, c_team, c_player, c_rank, c_size.value_or(0)}) + 1;

  AdaptStats stats;
  struct Pending {
    CanonicalRow row;
    std::optional<int> declared_size;
  };
  std::vector<Pending> rows;
  std::vector<std::string> fields;
  while (true) {
    const auto status = reader.Next(fields);
    if (status == csv::Reader::Status::kEnd) break;
    if (status == csv::Reader::Status::kRecord && fields.size() == 1 && fields[0].empty()) continue;
    ++stats.rows_read;
    if (status == csv::Reader::Status::kMalformed || fields.size() < needed) {
      ++stats.rows_malformed;
      continue;
    }
    Pending p;
    p.row.match_id = Trim(fields[c_match]);
    p.row.timestamp = Trim(fields[c_time]);
    p.row.team_key = Trim(fields[c_team]);
    p.row.player_id = Trim(fields[c_player]);
    if (adapter.rank_semantics == RankSemantics::kWinnerFlag) {
      p.row.team_rank = IsWinnerFlag(fields[c_rank]) ? 1 : 2;
    } else {
      auto r = ParsePositiveInt(Trim(fields[c_rank]));
      if (!r) {
        ++stats.rows_malformed;
        continue;
      }
      p.row.team_rank = *r;
    }
    if (c_size) {
      auto s = ParsePositiveInt(Trim(fields[*c_size]));
      if (!s) {
        ++stats.rows_malformed;
        continue;
      }
      p.declared_size = *s;
    }
    rows.push_back(std::move(p));
  }

  std::map<std::pair<std::string, std::string>, int> team_sizes;
  if (adapter.team_size_filter && !c_size) {
    for (const Pending& p : rows) ++team_sizes[{p.row.match_id, p.row.team_key}];
  }

  canonical << kCanonicalHeader << '\n';
  for (const Pending& p : rows) {
    if (adapter.team_size_filter) {
      const int size = p.declared_size ? *p.declared_size : team_sizes[{p.row.match_id, p.row.team_key}];
      if (size != *adapter.team_size_filter) {
        ++stats.rows_filtered;
        continue;
      }
    }
    const std::string rank = std::to_string(p.row.team_rank);
    csv::WriteRecord(canonical, {p.row.match_id, p.row.timestamp, p.row.team_key, p.row.player_id, rank});
    ++stats.rows_written;
  }
  return stats;
}

}  // namespace rankforge
