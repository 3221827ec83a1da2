// rankforge: ingest raw match logs, generate synthetic streams, and run
// rating-system experiments.
//
//   rankforge ingest --adapter <file> --in <csv> --out <csv>
//   rankforge synth  --config <file> --out <dir>
//   rankforge run    --config <file> --out <dir>
//
// Exit codes: 0 success, 1 configuration error, 2 data error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <fmt/format.h>
#include <omp.h>

#include "CLI11.hpp"
#include "rankforge/experiment.hpp"
#include "rankforge/ingestion.hpp"
#include "rankforge/synth.hpp"

namespace fs = std::filesystem;
using namespace rankforge;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitData = 2;

FlatConfig LoadWithOverrides(const std::string& path, const std::vector<std::string>& sets) {
  FlatConfig config = path.empty() ? FlatConfig{} : FlatConfig::Load(path);
  config.Override(sets);
  return config;
}

// Writes via a sibling temp file so a failed run leaves nothing behind.
void WriteAtomically(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
    out << content;
    if (!out.flush()) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw ConfigError(fmt::format("failed writing '{}'", path.string()));
    }
  }
  fs::rename(tmp, path);
}

int ThreadCap(int configured) {
  int threads = configured > 0 ? configured : omp_get_max_threads();
  if (const char* env = std::getenv("RANKFORGE_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) threads = std::min(threads, cap);
  }
  return std::max(threads, 1);
}

int RunIngest(const std::string& adapter_path, const std::string& in_path, const std::string& out_path) {
  const AdapterSpec adapter = AdapterSpec::FromConfig(FlatConfig::Load(adapter_path));
  std::ifstream in(in_path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open '{}'", in_path));
  std::stringstream canonical;
  const AdaptStats stats = AdaptDataset(in, adapter, canonical);
  const ParseResult parsed = ParseCanonical(canonical);
  if (parsed.matches.empty()) throw DataError("no valid matches after ingestion");
  std::ostringstream out;
  SerializeCanonical(parsed.matches, out);
  WriteAtomically(out_path, out.str());
  for (const std::string& d : parsed.diagnostics) std::cerr << "warning: " << d << '\n';
  std::cerr << fmt::format("ingest: {} rows read, {} malformed, {} filtered, {} matches written, {} skipped\n",
                           stats.rows_read, stats.rows_malformed, stats.rows_filtered, parsed.matches.size(),
                           parsed.matches_skipped);
  return 0;
}

int RunSynth(const FlatConfig& config, const fs::path& out_dir) {
  const SynthConfig synth = SynthConfig::FromConfig(config);
  const SynthData data = Generate(synth);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw ConfigError(fmt::format("cannot create '{}': {}", out_dir.string(), ec.message()));
  std::ostringstream matches, latent;
  SerializeCanonical(data.matches, matches);
  WriteLatent(data, latent);
  WriteAtomically(out_dir / "matches.csv", matches.str());
  WriteAtomically(out_dir / "latent.csv", latent.str());
  std::cerr << fmt::format("synth: {} matches, {} players -> {}\n", data.matches.size(), data.latent.size(),
                           out_dir.string());
  return 0;
}

int RunRun(const FlatConfig& config, const fs::path& out_dir) {
  ExperimentConfig cfg = ExperimentConfig::FromConfig(config);
  cfg.threads = ThreadCap(cfg.threads);
  const ExperimentResult result = RunExperiment(cfg);
  EmitReport(result, out_dir);
  for (const CellResult& cell : result.cells) {
    for (const std::string& w : cell.warnings) {
      std::cerr << fmt::format("warning: {} {} {}: {}\n", SystemName(cell.key.system), cell.key.AggregationLabel(),
                               SetupName(cell.setup), w);
    }
  }
  std::cerr << fmt::format("run: {} matches, {} cells -> {}\n", result.n_matches, result.cells.size(),
                           out_dir.string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Team skill rating experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  std::string adapter, in_path, out_path, config_path, dataset;
  std::vector<std::string> sets;
  int threads = 0;

  auto* ingest = app.add_subcommand("ingest", "Adapt a raw dataset export to canonical CSV");
  ingest->add_option("--adapter", adapter, "Adapter mapping file")->required();
  ingest->add_option("--in", in_path, "Raw CSV")->required();
  ingest->add_option("--out", out_path, "Canonical CSV to write")->required();

  auto* synth = app.add_subcommand("synth", "Generate a synthetic match stream");
  synth->add_option("--config", config_path, "Synth config file");
  synth->add_option("--out", out_path, "Output directory")->required();
  synth->add_option("--set", sets, "Override a config key (key=value)");

  auto* run = app.add_subcommand("run", "Run a configuration matrix");
  run->add_option("--config", config_path, "Experiment config file");
  run->add_option("--out", out_path, "Output directory")->required();
  run->add_option("--dataset", dataset, "Canonical dataset (overrides config)");
  run->add_option("--threads", threads, "Parallel cells (capped by RANKFORGE_THREADS)");
  run->add_option("--set", sets, "Override a config key (key=value)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*ingest) return RunIngest(adapter, in_path, out_path);
    FlatConfig config = LoadWithOverrides(config_path, sets);
    if (*synth) return RunSynth(config, out_path);
    if (!dataset.empty()) config.Set("dataset", dataset);
    if (threads > 0) config.Set("threads", std::to_string(threads));
    return RunRun(config, out_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
}
