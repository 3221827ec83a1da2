#include "rankforge/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>
#include <omp.h>

#include "json.hpp"

namespace rankforge {
namespace {

template <typename T, typename Parse>
std::vector<T> ParseList(const FlatConfig& c, const std::string& key, std::vector<std::string> fallback,
                         Parse parse) {
  std::vector<T> out;
  for (const std::string& tag : c.GetList(key, std::move(fallback))) {
    T value = parse(tag);
    if (std::find(out.begin(), out.end(), value) == out.end()) out.push_back(value);
  }
  return out;
}

template <typename T, typename Name>
std::string JoinNames(const std::vector<T>& values, Name name) {
  std::string out;
  for (const T& v : values) {
    if (!out.empty()) out += ',';
    out += name(v);
  }
  return out;
}

bool HeadToHead(const std::vector<MatchRecord>& matches) {
  return std::all_of(matches.begin(), matches.end(), [](const MatchRecord& m) { return m.team_count() == 2; });
}

}  // namespace

ExperimentConfig ExperimentConfig::FromConfig(const FlatConfig& c) {
  ExperimentConfig cfg;
  cfg.dataset_path = c.Require("dataset");
  if (auto a = c.Get("adapter"); a && !a->empty()) cfg.adapter_path = *a;
  cfg.dataset_name = c.GetString("dataset_name", std::filesystem::path(cfg.dataset_path).stem().string());
  cfg.systems = ParseList<SystemKind>(c, "systems", {"elo", "glicko", "trueskill", "previousrank"}, ParseSystem);
  cfg.aggregations = ParseList<Aggregation>(c, "aggregations", {"sum", "max", "min"}, ParseAggregation);
  cfg.setups = ParseList<SetupKind>(c, "setups", {"all", "best", "frequent"}, ParseSetup);
  cfg.params.k = c.GetDouble("K", cfg.params.k);
  cfg.params.d = c.GetDouble("D", cfg.params.d);
  cfg.params.beta = c.GetDouble("beta", cfg.params.beta);
  cfg.params.tau = c.GetDouble("tau", cfg.params.tau);
  cfg.params.trueskill_mode = ParseTrueSkillMode(c.GetString("trueskill_mode", "standard"));
  cfg.setup.best_top_k = static_cast<int>(c.GetInt("best_top_k", cfg.setup.best_top_k));
  cfg.setup.best_min_games = static_cast<int>(c.GetInt("best_min_games", cfg.setup.best_min_games));
  cfg.setup.frequent_min_games = static_cast<int>(c.GetInt("frequent_min_games", cfg.setup.frequent_min_games));
  cfg.setup.best_window = static_cast<int>(c.GetInt("best_window", cfg.setup.best_window));
  cfg.setup.frequent_window = static_cast<int>(c.GetInt("frequent_window", cfg.setup.frequent_window));
  cfg.setup.bins = static_cast<int>(c.GetInt("bins", cfg.setup.bins));
  cfg.metric = ParseMetric(c.GetString("metric", "auto"));
  cfg.threads = static_cast<int>(c.GetInt("threads", 0));
  cfg.Validate();
  return cfg;
}

void ExperimentConfig::Validate() const {
  if (dataset_path.empty()) throw ConfigError("dataset path is empty");
  if (systems.empty()) throw ConfigError("no rating systems selected");
  if (setups.empty()) throw ConfigError("no setups selected");
  const bool needs_aggregation = std::any_of(systems.begin(), systems.end(),
                                             [](SystemKind s) { return s != SystemKind::kPreviousRank; });
  if (needs_aggregation && aggregations.empty()) throw ConfigError("no aggregation methods selected");
  if (threads < 0) throw ConfigError("threads must be non-negative");
  params.Validate();
  setup.Validate();
}

FlatConfig ExperimentConfig::Resolved() const {
  FlatConfig c;
  c.Set("dataset", dataset_path);
  c.Set("adapter", adapter_path.value_or(""));
  c.Set("dataset_name", dataset_name);
  c.Set("systems", JoinNames(systems, [](SystemKind s) { return std::string(SystemName(s)); }));
  c.Set("aggregations", JoinNames(aggregations, [](Aggregation a) { return std::string(AggregationName(a)); }));
  c.Set("setups", JoinNames(setups, [](SetupKind s) { return std::string(SetupName(s)); }));
  c.Set("K", FormatReal(params.k));
  c.Set("D", FormatReal(params.d));
  c.Set("beta", FormatReal(params.beta));
  c.Set("tau", FormatReal(params.tau));
  c.Set("q", FormatReal(params.q));
  c.Set("trueskill_mode", std::string(TrueSkillModeName(params.trueskill_mode)));
  c.Set("best_top_k", std::to_string(setup.best_top_k));
  c.Set("best_min_games", std::to_string(setup.best_min_games));
  c.Set("frequent_min_games", std::to_string(setup.frequent_min_games));
  c.Set("best_window", std::to_string(setup.best_window));
  c.Set("frequent_window", std::to_string(setup.frequent_window));
  c.Set("bins", std::to_string(setup.bins));
  c.Set("metric", std::string(MetricName(metric)));
  return c;
}

std::string PassKey::AggregationLabel() const {
  return aggregation ? std::string(AggregationName(*aggregation)) : "none";
}

std::vector<PassKey> ExpandPasses(const ExperimentConfig& config) {
  std::vector<PassKey> keys;
  for (SystemKind s : config.systems) {
    if (s == SystemKind::kPreviousRank) {
      keys.push_back({s, std::nullopt});
      continue;
    }
    for (Aggregation a : config.aggregations) keys.push_back({s, a});
  }
  return keys;
}

MetricKind ResolveMetric(MetricKind requested, const std::vector<MatchRecord>& matches) {
  const bool h2h = HeadToHead(matches);
  if (requested == MetricKind::kAuto) return h2h ? MetricKind::kAccuracy : MetricKind::kNdcg;
  if (requested == MetricKind::kAccuracy && !h2h) {
    throw ConfigError("accuracy needs a head-to-head dataset; some matches have more than 2 teams");
  }
  return requested;
}

PassResult ReplayPass(const std::vector<MatchRecord>& matches, const PassKey& key, const SystemParams& params,
                      MetricKind metric, std::size_t history_cap) {
  if (matches.size() > std::numeric_limits<std::uint32_t>::max()) throw DataError("too many matches");
  RatingEngine engine(key.system, key.aggregation.value_or(Aggregation::kSum), params);
  PassResult out;
  out.key = key;
  out.metric.reserve(matches.size());
  for (std::size_t m = 0; m < matches.size(); ++m) {
    const MatchRecord& match = matches[m];
    const PredictionRecord prediction = engine.Process(match);
    if (match.equal_team_sizes()) {
      out.metric.push_back(MatchMetric(prediction, metric));
    } else {
      out.metric.push_back(std::numeric_limits<double>::quiet_NaN());
      ++out.excluded_matches;
    }
    if (history_cap == 0) continue;
    for (const Team& team : match.teams) {
      for (const PlayerId& p : team.members) {
        MatchHistory& h = out.histories[p];
        if (h.size() < history_cap) h.push_back(static_cast<std::uint32_t>(m));
      }
    }
  }
  out.final_store = std::move(engine.store());
  out.counters = engine.counters();
  return out;
}

std::vector<PassResult> RunPassesSerial(const std::vector<MatchRecord>& matches, const std::vector<PassKey>& keys,
                                        const SystemParams& params, MetricKind metric, std::size_t history_cap) {
  std::vector<PassResult> results;
  results.reserve(keys.size());
  for (const PassKey& key : keys) results.push_back(ReplayPass(matches, key, params, metric, history_cap));
  return results;
}

std::vector<PassResult> RunPassesParallel(const std::vector<MatchRecord>& matches,
                                          const std::vector<PassKey>& keys, const SystemParams& params,
                                          MetricKind metric, std::size_t history_cap, int threads) {
  std::vector<PassResult> results(keys.size());
  std::vector<std::exception_ptr> errors(keys.size());
  const int n = static_cast<int>(keys.size());
  const int team = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(team)
  for (int i = 0; i < n; ++i) {
    try {
      results[i] = ReplayPass(matches, keys[i], params, metric, history_cap);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

std::vector<CellResult> EvaluatePass(const PassResult& pass, const std::vector<SetupKind>& setups,
                                     const SetupSpec& spec, bool head_to_head) {
  std::vector<CellResult> cells;
  for (SetupKind setup : setups) {
    CellResult cell;
    cell.key = pass.key;
    cell.setup = setup;
    cell.series.label = fmt::format("{}_{}_{}", SystemName(pass.key.system), pass.key.AggregationLabel(),
                                    SetupName(setup));
    double sum = 0.0;
    std::size_t count = 0;
    if (setup == SetupKind::kAll) {
      std::vector<double> evaluated;
      std::vector<double> index;
      for (std::size_t m = 0; m < pass.metric.size(); ++m) {
        if (std::isnan(pass.metric[m])) continue;
        evaluated.push_back(pass.metric[m]);
        index.push_back(static_cast<double>(m + 1));
        sum += pass.metric[m];
      }
      count = evaluated.size();
      if (head_to_head) {
        cell.series = BinSeries(evaluated, spec.bins);
        cell.series.label = fmt::format("{}_{}_{}", SystemName(pass.key.system), pass.key.AggregationLabel(),
                                        SetupName(setup));
      } else {
        cell.series.x = std::move(index);
        cell.series.y = evaluated;
        cell.series.population.assign(evaluated.size(), 1);
      }
    } else {
      std::vector<PlayerId> selected;
      int window = 0;
      if (setup == SetupKind::kBest) {
        Selection sel = SelectBestPlayers(pass.final_store, pass.key.system, spec);
        if (sel.short_of_target) {
          cell.warnings.push_back(
              fmt::format("only {} players qualified for the best-players set (target {})", sel.players.size(),
                          spec.best_top_k));
        }
        selected = std::move(sel.players);
        window = spec.best_window;
      } else {
        selected = SelectFrequentPlayers(pass.final_store, spec);
        if (selected.empty()) cell.warnings.push_back("no player qualified for the frequent-players set");
        window = spec.frequent_window;
      }
      const WindowedResult windowed = WindowedSeries(pass.metric, pass.histories, selected, window);
      if (windowed.truncated) {
        cell.warnings.push_back(fmt::format("series shorter than the {}-game window", window));
      }
      cell.series.x = windowed.series.x;
      cell.series.y = windowed.series.y;
      cell.series.population = windowed.series.population;
      sum = windowed.value_sum;
      count = windowed.value_count;
    }
    cell.n_matches = count;
    cell.value = count ? sum / static_cast<double>(count) : std::numeric_limits<double>::quiet_NaN();
    cells.push_back(std::move(cell));
  }
  return cells;
}

ParseResult LoadDataset(const ExperimentConfig& config) {
  std::ifstream in(config.dataset_path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open dataset '{}'", config.dataset_path));
  ParseResult parsed;
  if (config.adapter_path) {
    const AdapterSpec adapter = AdapterSpec::FromConfig(FlatConfig::Load(*config.adapter_path));
    std::stringstream canonical;
    AdaptDataset(in, adapter, canonical);
    parsed = ParseCanonical(canonical);
  } else {
    parsed = ParseCanonical(in);
  }
  if (parsed.matches.empty()) throw DataError(fmt::format("dataset '{}' has no valid matches", config.dataset_path));
  return parsed;
}

ExperimentResult RunExperiment(const ExperimentConfig& config, const std::vector<MatchRecord>& matches) {
  config.Validate();
  if (matches.empty()) throw DataError("dataset has no matches");
  ExperimentResult result;
  result.config = config;
  result.metric = ResolveMetric(config.metric, matches);
  result.n_matches = matches.size();

  std::size_t history_cap = 0;
  for (SetupKind s : config.setups) {
    if (s == SetupKind::kBest) history_cap = std::max<std::size_t>(history_cap, config.setup.best_window);
    if (s == SetupKind::kFrequent) history_cap = std::max<std::size_t>(history_cap, config.setup.frequent_window);
  }
  const std::vector<PassKey> keys = ExpandPasses(config);
  result.passes = RunPassesParallel(matches, keys, config.params, result.metric, history_cap, config.threads);

  const bool h2h = HeadToHead(matches);
  // Rows grouped by setup, then system, then aggregation.
  std::vector<std::vector<CellResult>> per_pass;
  for (const PassResult& pass : result.passes) {
    per_pass.push_back(EvaluatePass(pass, config.setups, config.setup, h2h));
  }
  for (std::size_t s = 0; s < config.setups.size(); ++s) {
    for (auto& cells : per_pass) result.cells.push_back(std::move(cells[s]));
  }
  return result;
}

ExperimentResult RunExperiment(const ExperimentConfig& config) {
  ParseResult parsed = LoadDataset(config);
  ExperimentResult result = RunExperiment(config, parsed.matches);
  result.rows_read = parsed.rows_read;
  result.rows_skipped = parsed.rows_skipped;
  result.matches_skipped = parsed.matches_skipped;
  return result;
}

std::string FormatReal(double value) {
  if (std::isnan(value)) return "nan";
  return fmt::format("{:.6g}", value);
}

std::string SeriesFileName(const CellResult& cell) {
  return fmt::format("series_{}_{}_{}.csv", SystemName(cell.key.system), cell.key.AggregationLabel(),
                     SetupName(cell.setup));
}

void EmitReport(const ExperimentResult& result, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw ConfigError(fmt::format("cannot create output directory '{}': {}", out_dir.string(), ec.message()));

  std::vector<fs::path> written;
  auto write_file = [&](const std::string& name, const std::string& content) {
    const fs::path path = out_dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
    written.push_back(path);
    out << content;
    out.close();
    if (!out) throw ConfigError(fmt::format("failed writing '{}'", path.string()));
  };

  const ExperimentConfig& cfg = result.config;
  try {
    std::ostringstream summary;
    summary << "dataset,setup,system,aggregation,metric,value,n_matches\n";
    for (const CellResult& cell : result.cells) {
      summary << cfg.dataset_name << ',' << SetupName(cell.setup) << ',' << SystemName(cell.key.system) << ','
              << cell.key.AggregationLabel() << ',' << MetricName(result.metric) << ',' << FormatReal(cell.value)
              << ',' << cell.n_matches << '\n';
    }
    write_file("summary.csv", summary.str());

    for (const CellResult& cell : result.cells) {
      std::ostringstream series;
      series << "x,y\n";
      for (std::size_t i = 0; i < cell.series.x.size(); ++i) {
        series << FormatReal(cell.series.x[i]) << ',' << FormatReal(cell.series.y[i]) << '\n';
      }
      write_file(SeriesFileName(cell), series.str());
    }

    nlohmann::ordered_json manifest;
    manifest["tool"] = "rankforge";
    manifest["version"] = std::string(kToolVersion);
    manifest["config"] = nlohmann::json(cfg.Resolved().values());
    manifest["metric"] = std::string(MetricName(result.metric));
    manifest["dataset"] = {{"matches", result.n_matches},
                           {"rows_read", result.rows_read},
                           {"rows_skipped", result.rows_skipped},
                           {"matches_skipped", result.matches_skipped}};
    nlohmann::ordered_json passes = nlohmann::ordered_json::array();
    for (const PassResult& pass : result.passes) {
      passes.push_back({{"system", std::string(SystemName(pass.key.system))},
                        {"aggregation", pass.key.AggregationLabel()},
                        {"players", pass.final_store.size()},
                        {"excluded_matches", pass.excluded_matches},
                        {"weight_fallbacks", pass.counters.weight_fallbacks},
                        {"sigma_floors", pass.counters.sigma_floors}});
    }
    manifest["passes"] = std::move(passes);
    nlohmann::ordered_json cells = nlohmann::ordered_json::array();
    for (const CellResult& cell : result.cells) {
      cells.push_back({{"system", std::string(SystemName(cell.key.system))},
                       {"aggregation", cell.key.AggregationLabel()},
                       {"setup", std::string(SetupName(cell.setup))},
                       {"value", FormatReal(cell.value)},
                       {"n_matches", cell.n_matches},
                       {"series_file", SeriesFileName(cell)},
                       {"populations", cell.series.population},
                       {"warnings", cell.warnings}});
    }
    manifest["cells"] = std::move(cells);
    write_file("run_manifest.json", manifest.dump(2) + "\n");
  } catch (...) {
    for (const fs::path& p : written) fs::remove(p, ec);
    throw;
  }
}

}  // namespace rankforge
