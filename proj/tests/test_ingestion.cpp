#include <sstream>

#include "doctest.h"
#include "rankforge/csv.hpp"
#include "rankforge/ingestion.hpp"
#include "support/generators.hpp"

using namespace rankforge;

namespace {

ParseResult Parse(const std::string& text, ParseOptions options = {}) {
  std::istringstream in(text);
  return ParseCanonical(in, options);
}

const std::string kHeader = "match_id,timestamp,team_key,player_id,team_rank\n";

AdapterSpec Adapter(const std::string& text) {
  std::istringstream in(text);
  return AdapterSpec::FromConfig(FlatConfig::Parse(in));
}

std::string Adapt(const std::string& raw, const AdapterSpec& spec, AdaptStats* stats = nullptr) {
  std::istringstream in(raw);
  std::ostringstream out;
  const AdaptStats s = AdaptDataset(in, spec, out);
  if (stats) *stats = s;
  return out.str();
}

}  // namespace

TEST_CASE("minimal duo match") {
  const ParseResult r = Parse(kHeader +
                              "m1,1,A,p1,1\n"
                              "m1,1,A,p2,1\n"
                              "m1,1,B,p3,2\n"
                              "m1,1,B,p4,2\n");
  REQUIRE(r.matches.size() == 1);
  const MatchRecord& m = r.matches[0];
  CHECK(m.match_id == "m1");
  CHECK(m.teams.size() == 2);
  CHECK(m.teams[0].key == "A");
  CHECK(m.teams[0].members == std::vector<PlayerId>{"p1", "p2"});
  CHECK(m.observed_ranks == std::vector<int>{1, 2});
  CHECK(r.rows_read == 4);
  CHECK(r.diagnostics.empty());
}

TEST_CASE("matches with tied ranks are rejected") {
  std::string text = kHeader + "bad,1,A,p1,1\nbad,1,B,p2,1\n";
  for (int i = 0; i < 20; ++i) {
    text += "g" + std::to_string(i) + ",2,A,q" + std::to_string(i) + ",1\n";
    text += "g" + std::to_string(i) + ",2,B,r" + std::to_string(i) + ",2\n";
  }
  const ParseResult r = Parse(text);
  CHECK(r.matches.size() == 20);
  CHECK(r.matches_skipped == 1);
  REQUIRE(r.diagnostics.size() == 1);
  CHECK(r.diagnostics[0].find("bad") != std::string::npos);
}

TEST_CASE("output is chronological and ranks are dense") {
  const ParseResult r = Parse(kHeader +
                              "late,20,A,p1,3\n"
                              "late,20,B,p2,7\n"
                              "late,20,C,p3,5\n"
                              "b,9,A,p1,1\n"
                              "b,9,B,p2,2\n"
                              "a,9,A,p1,2\n"
                              "a,9,B,p2,1\n");
  REQUIRE(r.matches.size() == 3);
  CHECK(r.matches[0].match_id == "a");
  CHECK(r.matches[1].match_id == "b");
  CHECK(r.matches[2].match_id == "late");
  CHECK(r.matches[2].observed_ranks == std::vector<int>{1, 3, 2});
}

TEST_CASE("malformed rows are reported with line numbers") {
  std::string text = kHeader;
  for (int i = 0; i < 12; ++i) {
    text += "m" + std::to_string(i) + ",1,A,a" + std::to_string(i) + ",1\n";
    text += "m" + std::to_string(i) + ",1,B,b" + std::to_string(i) + ",2\n";
  }
  text += "m0,1,A,extra,notanumber\n";
  const ParseResult r = Parse(text);
  CHECK(r.matches.size() == 12);
  CHECK(r.rows_skipped == 1);
  REQUIRE(r.diagnostics.size() == 1);
  CHECK(r.diagnostics[0].rfind("line 26:", 0) == 0);
}

TEST_CASE("too many bad rows fail the parse") {
  std::string text = kHeader + "m1,1,A,p1,1\nm1,1,B,p2,2\n";
  text += "x,1,A\n";
  CHECK_THROWS_AS(Parse(text), DataError);
  CHECK_THROWS_AS(Parse("id,when,team,player,rank\nm1,1,A,p1,1\n"), DataError);
  CHECK(Parse(kHeader).matches.empty());
}

TEST_CASE("inconsistent rows inside a match") {
  std::string good;
  for (int i = 0; i < 20; ++i) {
    good += "g" + std::to_string(i) + ",5,A,q" + std::to_string(i) + ",1\n";
    good += "g" + std::to_string(i) + ",5,B,r" + std::to_string(i) + ",2\n";
  }
  ParseResult r = Parse(kHeader + good + "t,1,A,p1,1\nt,2,B,p2,2\n");
  CHECK(r.matches_skipped == 1);
  r = Parse(kHeader + good + "k,1,A,p1,1\nk,1,A,p3,2\nk,1,B,p2,3\n");
  CHECK(r.matches_skipped == 1);
}

TEST_CASE("equal team sizes can be required") {
  const std::string text = kHeader + "m,1,A,p1,1\nm,1,A,p2,1\nm,1,B,p3,2\n";
  CHECK(Parse(text).matches.size() == 1);
  ParseOptions strict;
  strict.require_equal_team_sizes = true;
  strict.max_skip_fraction = 1.0;
  CHECK(Parse(text, strict).matches.empty());
}

TEST_CASE("serialize then parse round-trips random streams") {
  auto rng = testgen::Rng(606);
  for (int trial = 0; trial < 30; ++trial) {
    const int teams = testgen::UniformInt(rng, 2, 6);
    const int size = testgen::UniformInt(rng, 1, 4);
    auto stream = testgen::RandomStream(static_cast<std::uint64_t>(trial), testgen::UniformInt(rng, 1, 60), teams,
                                        size, teams * size + 10);
    std::ostringstream out;
    SerializeCanonical(stream, out);
    const ParseResult r = Parse(out.str());
    REQUIRE(r.matches.size() == stream.size());
    for (std::size_t i = 0; i < stream.size(); ++i) {
      CHECK(r.matches[i].match_id == stream[i].match_id);
      CHECK(r.matches[i].timestamp == stream[i].timestamp);
      CHECK(r.matches[i].observed_ranks == stream[i].observed_ranks);
      REQUIRE(r.matches[i].teams.size() == stream[i].teams.size());
      for (std::size_t t = 0; t < stream[i].teams.size(); ++t) {
        CHECK(r.matches[i].teams[t].key == stream[i].teams[t].key);
        CHECK(r.matches[i].teams[t].members == stream[i].teams[t].members);
      }
    }
  }
}

TEST_CASE("csv quoting") {
  std::ostringstream out;
  csv::WriteRecord(out, {"plain", "with,comma", "say \"hi\"", "two\nlines"});
  CHECK(out.str() == "plain,\"with,comma\",\"say \"\"hi\"\"\",\"two\nlines\"\n");

  std::istringstream in(out.str() + "\"open,x\n");
  csv::Reader reader(in);
  std::vector<std::string> fields;
  REQUIRE(reader.Next(fields) == csv::Reader::Status::kRecord);
  CHECK(fields == std::vector<std::string>{"plain", "with,comma", "say \"hi\"", "two\nlines"});
  CHECK(reader.Next(fields) == csv::Reader::Status::kMalformed);
  CHECK(reader.line() == 3);
  CHECK(reader.Next(fields) == csv::Reader::Status::kEnd);
}

TEST_CASE("player ids with commas survive the canonical format") {
  MatchRecord m{"m,1", Timestamp("1"), {{"A", {"x, jr."}}, {"B", {"\"q\""}}}, {2, 1}};
  std::ostringstream out;
  SerializeCanonical({m}, out);
  const ParseResult r = Parse(out.str());
  REQUIRE(r.matches.size() == 1);
  CHECK(r.matches[0].teams[0].members[0] == "x, jr.");
  CHECK(r.matches[0].teams[1].members[0] == "\"q\"");
}

TEST_CASE("PUBG-style adapter keeps duo teams only") {
  const AdapterSpec spec = Adapter(
      "match_id = match_id\ntimestamp = date\nteam_key = team_id\nplayer_id = player_name\n"
      "team_rank = team_placement\nteam_size_filter = 2\n");
  const std::string raw =
      "date,match_id,player_name,team_id,team_placement\n"
      "2017-11-26T20:59:40,M1,alice,1,1\n"
      "2017-11-26T20:59:40,M1,bob,1,1\n"
      "2017-11-26T20:59:40,M1,carl,2,2\n"
      "2017-11-26T20:59:40,M1,dina,2,2\n"
      "2017-11-26T21:30:00,M2,e1,7,1\n"
      "2017-11-26T21:30:00,M2,e2,7,1\n"
      "2017-11-26T21:30:00,M2,e3,7,1\n"
      "2017-11-26T21:30:00,M2,e4,7,1\n"
      "2017-11-26T21:30:00,M2,f1,8,2\n"
      "2017-11-26T21:30:00,M2,f2,8,2\n";
  AdaptStats stats;
  const std::string canonical = Adapt(raw, spec, &stats);
  CHECK(stats.rows_read == 10);
  CHECK(stats.rows_filtered == 4);
  CHECK(stats.rows_written == 6);
  CHECK(canonical.rfind(std::string(kCanonicalHeader) + "\n", 0) == 0);
  CHECK(canonical.find("e1") == std::string::npos);
  ParseOptions lenient;
  lenient.max_skip_fraction = 1.0;
  const ParseResult r = Parse(canonical, lenient);
  REQUIRE(r.matches.size() == 1);  // M2 is left with a single team
  CHECK(r.matches[0].match_id == "M1");
}

TEST_CASE("adapter size column") {
  const AdapterSpec spec = Adapter(
      "match_id = m\ntimestamp = t\nteam_key = k\nplayer_id = p\nteam_rank = r\n"
      "team_size_filter = 2\nteam_size_column = party_size\n");
  const std::string raw =
      "m,t,k,p,r,party_size\n"
      "A,1,x,p1,1,2\n"
      "A,1,y,p2,2,2\n"
      "B,2,x,p3,1,4\n";
  AdaptStats stats;
  Adapt(raw, spec, &stats);
  CHECK(stats.rows_written == 2);
  CHECK(stats.rows_filtered == 1);
}

TEST_CASE("LOL-style winner flags map to ranks one and two") {
  const AdapterSpec spec = Adapter(
      "match_id = gameId\ntimestamp = creation\nteam_key = side\nplayer_id = summoner\n"
      "team_rank = win\nrank_semantics = winner_flag\n");
  const std::string raw =
      "gameId,creation,side,summoner,win\n"
      "g1,100,blue,s1,true\n"
      "g1,100,red,s2,false\n"
      "g2,200,blue,s3,Fail\n"
      "g2,200,red,s4,Win\n";
  const ParseResult r = Parse(Adapt(raw, spec));
  REQUIRE(r.matches.size() == 2);
  CHECK(r.matches[0].observed_ranks == std::vector<int>{1, 2});
  CHECK(r.matches[1].observed_ranks == std::vector<int>{2, 1});
  CHECK(IsWinnerFlag("1"));
  CHECK(IsWinnerFlag("YES"));
  CHECK_FALSE(IsWinnerFlag("0"));
  CHECK_FALSE(IsWinnerFlag("lose"));
}

TEST_CASE("adapter errors") {
  const AdapterSpec spec = Adapter(
      "match_id = match_id\ntimestamp = date\nteam_key = team_id\nplayer_id = player_name\n"
      "team_rank = team_placement\n");
  CHECK_THROWS_AS(Adapt("match_id,date,team_id,player_name\nM1,1,1,a\n", spec), ConfigError);
  CHECK_THROWS_AS(Adapter("match_id = a\n"), ConfigError);
  CHECK_THROWS_AS(Adapter("match_id = a\ntimestamp = b\nteam_key = c\nplayer_id = d\nteam_rank = e\n"
                          "rank_semantics = elo\n"),
                  ConfigError);

  AdaptStats stats;
  Adapt("match_id,date,team_id,player_name,team_placement\nM1,1,1,a,first\nM1,1,2,b,2\nM1,1\n", spec, &stats);
  CHECK(stats.rows_malformed == 2);
  CHECK(stats.rows_written == 1);
}
