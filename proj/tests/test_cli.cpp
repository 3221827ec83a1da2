#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "rankforge_cli_test";

int Run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + RANKFORGE_BIN + " " + args + " >" + (kWork / "stdout.txt").string() + " 2>" +
                          (kWork / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void Write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string P(const std::string& name) { return (kWork / name).string(); }

struct Workspace {
  Workspace() {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
  }
  ~Workspace() { fs::remove_all(kWork); }
};

}  // namespace

TEST_CASE("synth then run") {
  Workspace ws;
  Write(kWork / "synth.conf", "n_players = 80\nn_matches = 600\nseed = 3\nlatent_team_rule = max\n");
  REQUIRE(Run("synth --config " + P("synth.conf") + " --out " + P("data")) == 0);
  CHECK(fs::exists(kWork / "data" / "matches.csv"));
  CHECK(fs::exists(kWork / "data" / "latent.csv"));

  Write(kWork / "run.conf", "dataset = " + P("data/matches.csv") +
                                "\nsystems = elo,glicko,previousrank\naggregations = sum,max\n"
                                "setups = all,best\nbest_top_k = 10\n");
  REQUIRE(Run("run --config " + P("run.conf") + " --out " + P("out1")) == 0);
  REQUIRE(Run("run --config " + P("run.conf") + " --out " + P("out2"), "RANKFORGE_THREADS=1") == 0);
  int files = 0;
  for (const auto& entry : fs::directory_iterator(kWork / "out1")) {
    ++files;
    CHECK(Slurp(entry.path()) == Slurp(kWork / "out2" / entry.path().filename()));
  }
  CHECK(files == 1 + 10 + 1);

  // Flags win over the file.
  REQUIRE(Run("run --config " + P("run.conf") + " --set systems=trueskill --out " + P("out3")) == 0);
  CHECK(fs::exists(kWork / "out3" / "series_trueskill_max_best.csv"));
  CHECK_FALSE(fs::exists(kWork / "out3" / "series_elo_max_best.csv"));
}

TEST_CASE("ingest") {
  Workspace ws;
  Write(kWork / "adapter.conf",
        "match_id = gameId\ntimestamp = t\nteam_key = side\nplayer_id = name\nteam_rank = win\n"
        "rank_semantics = winner_flag\n");
  Write(kWork / "raw.csv", "gameId,t,side,name,win\ng2,2,red,a,1\ng2,2,blue,b,0\ng1,1,red,c,0\ng1,1,blue,d,1\n");
  REQUIRE(Run("ingest --adapter " + P("adapter.conf") + " --in " + P("raw.csv") + " --out " + P("canon.csv")) == 0);
  CHECK(Slurp(kWork / "canon.csv") ==
        "match_id,timestamp,team_key,player_id,team_rank\n"
        "g1,1,red,c,2\ng1,1,blue,d,1\n"
        "g2,2,red,a,1\ng2,2,blue,b,2\n");

  Write(kWork / "bad_adapter.conf", "match_id = nope\ntimestamp = t\nteam_key = side\nplayer_id = name\nteam_rank = win\n");
  CHECK(Run("ingest --adapter " + P("bad_adapter.conf") + " --in " + P("raw.csv") + " --out " + P("x.csv")) == 1);
  CHECK_FALSE(fs::exists(kWork / "x.csv"));
}

TEST_CASE("exit codes") {
  Workspace ws;
  CHECK(Run("") == 1);
  CHECK(Run("run --out " + P("o")) == 1);  // no dataset configured
  CHECK(Run("frobnicate") == 1);

  Write(kWork / "bad.conf", "dataset = " + P("d.csv") + "\nsystems = elo,glicko9\n");
  CHECK(Run("run --config " + P("bad.conf") + " --out " + P("o")) == 1);
  CHECK(Run("run --config " + P("nowhere.conf") + " --out " + P("o")) == 1);

  Write(kWork / "d.csv", "match_id,timestamp,team_key,player_id,team_rank\n");
  Write(kWork / "ok.conf", "dataset = " + P("d.csv") + "\n");
  CHECK(Run("run --config " + P("ok.conf") + " --out " + P("o")) == 2);
  CHECK_FALSE(fs::exists(kWork / "o" / "summary.csv"));

  Write(kWork / "garbage.csv", "not,a,canonical,file\n1,2,3,4\n");
  CHECK(Run("run --config " + P("ok.conf") + " --dataset " + P("garbage.csv") + " --out " + P("o")) == 2);

  CHECK(Run("--version") == 0);
  CHECK(Slurp(kWork / "stdout.txt").find("1.0.0") != std::string::npos);
}
