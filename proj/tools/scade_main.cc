// Copyright 2026 The scade Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line entry point: one subcommand per pipeline stage plus the
// synthetic harness.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "scade/config.h"
#include "scade/error.h"
#include "scade/evaluation.h"
#include "scade/pipeline.h"
#include "scade/synth.h"

namespace {

namespace fs = std::filesystem;

struct FlagSpec {
  const char* flag;
  const char* setting;
  const char* help;
  bool is_switch = false;
};

const std::vector<FlagSpec>& AllFlags() {
  static const std::vector<FlagSpec> flags = {
      {"--input,-i", "input.path", "telemetry file (JSONL or CSV)"},
      {"--format", "input.format", "jsonl, csv or auto"},
      {"--attributes", "ingest.attributes", "comma-separated payload attribute order"},
      {"--gram-modes", "tokenizer.gram_modes", "comma-separated: unigram, bigram, both"},
      {"--cross-field-pairs", "tokenizer.cross_field_pairs",
       "add unordered attribute-value pairs to bigram passes", true},
      {"--k", "scoring.k", "BM25 term-frequency saturation"},
      {"--b", "scoring.b", "BM25 length normalization"},
      {"--window-days", "threshold.window_days", "calibration window in days"},
      {"--now", "threshold.now", "last day of the detection window (YYYY-MM-DD)"},
      {"--score-store", "threshold.score_store", "JSONL store of scores across runs"},
      {"--history-days", "local.history_days", "days of execution history per payload"},
      {"--trees", "local.trees", "isolation trees"},
      {"--subsample", "local.subsample", "rows sampled per tree"},
      {"--contamination", "local.contamination", "expected anomaly fraction"},
      {"--seed", "local.seed", "forest seed"},
      {"--log-features", "local.log_features", "log1p-scale execution counters"},
      {"--out,-o", "output.dir", "artifact directory"},
      {"--include-bp", "output.include_bp", "write BenignPositive verdicts to alerts"},
      {"--truth", "report.truth", "ground-truth JSONL for precision/recall"},
      {"--threads,-j", "run.threads", "worker threads (0: all cores)"},
  };
  return flags;
}

struct StageCommand {
  CLI::App* app = nullptr;
  std::optional<std::string> config_file;
  bool dry_run = false;
};

void AddFlags(CLI::App* app, std::map<std::string, std::string>& settings,
              const std::vector<std::string>& settings_wanted) {
  for (const auto& spec : AllFlags()) {
    if (std::find(settings_wanted.begin(), settings_wanted.end(), spec.setting) ==
        settings_wanted.end()) {
      continue;
    }
    const std::string key = spec.setting;
    if (spec.is_switch) {
      app->add_flag_function(
          spec.flag, [&settings, key](std::int64_t) { settings[key] = "true"; },
          spec.help);
    } else {
      app->add_option_function<std::string>(
          spec.flag, [&settings, key](const std::string& v) { settings[key] = v; },
          spec.help);
    }
  }
}

StageCommand AddStage(CLI::App& root, const char* name, const char* help,
                      std::map<std::string, std::string>& settings,
                      const std::vector<std::string>& settings_wanted) {
  StageCommand stage;
  stage.app = root.add_subcommand(name, help);
  AddFlags(stage.app, settings, settings_wanted);
  return stage;
}

void PrintJson(const nlohmann::json& j) { std::cout << j.dump(2) << '\n'; }

void WriteFile(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw scade::DataError("cannot write '" + path.string() + "'");
  out << content;
  out.flush();
  if (!out) throw scade::DataError("failed writing '" + path.string() + "'");
}

int Run(int argc, char** argv) {
  CLI::App app{"scade: command-line anomaly detection over process-creation telemetry"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "scade 1.0.0");

  std::map<std::string, std::string> settings;
  const std::vector<std::string> ingest_keys = {"input.path", "input.format",
                                                "ingest.attributes", "output.dir",
                                                "run.threads"};
  const std::vector<std::string> score_keys = {"tokenizer.gram_modes",
                                               "tokenizer.cross_field_pairs",
                                               "scoring.k", "scoring.b",
                                               "output.dir", "run.threads"};
  const std::vector<std::string> threshold_keys = {
      "tokenizer.gram_modes", "threshold.window_days", "threshold.now",
      "threshold.score_store", "output.dir"};
  const std::vector<std::string> localize_keys = {
      "local.history_days", "local.trees",       "local.subsample", "local.contamination",
      "local.seed",         "local.log_features", "output.dir",      "run.threads"};
  const std::vector<std::string> report_keys = {"output.include_bp", "report.truth",
                                                "output.dir"};
  std::vector<std::string> detect_keys;
  for (const auto& spec : AllFlags()) detect_keys.emplace_back(spec.setting);

  struct Named {
    const char* name;
    const char* help;
    const std::vector<std::string>* keys;
  };
  const std::vector<Named> stage_defs = {
      {"detect", "run every stage end to end", &detect_keys},
      {"ingest", "parse telemetry and build payloads", &ingest_keys},
      {"score", "fit corpus models and score payloads", &score_keys},
      {"threshold", "calibrate thresholds and assign severities", &threshold_keys},
      {"localize", "per-asset execution history analysis of flagged payloads",
       &localize_keys},
      {"report", "combine both layers into verdicts", &report_keys},
  };
  std::map<std::string, StageCommand> stages;
  for (const auto& def : stage_defs) {
    StageCommand stage = AddStage(app, def.name, def.help, settings, *def.keys);
    stages[def.name] = stage;
  }
  for (auto& [name, stage] : stages) {
    stage.app->add_option("--config,-c", stage.config_file, "INI configuration file");
    stage.app->add_flag("--dry-run", stage.dry_run,
                        "validate and print the resolved configuration");
  }

  auto* simulate = app.add_subcommand("simulate", "generate a labelled synthetic workload");
  std::optional<std::string> scenario_file;
  std::string simulate_out;
  bool print_scenario = false;
  simulate->add_option("--scenario", scenario_file,
                       "scenario JSON (default: the bundled drill)");
  simulate->add_option("--out,-o", simulate_out, "output directory");
  simulate->add_flag("--print-scenario", print_scenario,
                     "print the scenario JSON and exit");

  auto* evaluate = app.add_subcommand("evaluate", "score verdicts against ground truth");
  std::string verdicts_path;
  std::string truth_path;
  std::optional<std::string> metrics_path;
  evaluate->add_option("--verdicts", verdicts_path, "verdicts JSONL")->required();
  evaluate->add_option("--truth", truth_path, "ground-truth JSONL")->required();
  evaluate->add_option("--out,-o", metrics_path, "write metrics JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : scade::ExitCode(scade::ErrorKind::kConfig);
  }

  if (simulate->parsed()) {
    scade::Scenario scenario = scade::DefaultScenario();
    if (scenario_file) {
      std::ifstream in(*scenario_file);
      if (!in) throw scade::ConfigError("cannot open scenario '" + *scenario_file + "'");
      const auto j = nlohmann::json::parse(in, nullptr, false);
      if (j.is_discarded()) throw scade::ConfigError("scenario is not valid JSON");
      scenario = scade::ScenarioFromJson(j);
    }
    if (print_scenario) {
      PrintJson(scade::ToJson(scenario));
      return 0;
    }
    if (simulate_out.empty()) throw scade::ConfigError("simulate needs --out");
    const auto log = scade::Simulate(scenario);
    fs::create_directories(simulate_out);
    std::ostringstream events, truth;
    scade::WriteEventsJsonl(events, log.events);
    scade::WriteTruthJsonl(truth, log.truth);
    WriteFile(fs::path(simulate_out) / "events.jsonl", events.str());
    WriteFile(fs::path(simulate_out) / "truth.jsonl", truth.str());
    WriteFile(fs::path(simulate_out) / "scenario.json",
              scade::ToJson(scenario).dump(2) + "\n");
    PrintJson({{"events", log.events.size()}, {"attacks", log.truth.size()}});
    return 0;
  }

  if (evaluate->parsed()) {
    std::ifstream verdicts_in(verdicts_path);
    if (!verdicts_in) throw scade::ConfigError("cannot open '" + verdicts_path + "'");
    std::ifstream truth_in(truth_path);
    if (!truth_in) throw scade::ConfigError("cannot open '" + truth_path + "'");
    const auto metrics = scade::Evaluate(scade::ReadVerdictLabels(verdicts_in),
                                         scade::ReadTruthJsonl(truth_in));
    if (metrics_path) {
      WriteFile(*metrics_path, metrics.ToJson().dump(2) + "\n");
    }
    PrintJson(metrics.ToJson());
    return 0;
  }

  for (auto& [name, stage] : stages) {
    if (!stage.app->parsed()) continue;
    std::optional<fs::path> config_file;
    if (stage.config_file) config_file = *stage.config_file;
    const auto env = scade::EnvSettings([](const char* n) { return std::getenv(n); });
    const scade::RunConfig config = scade::ResolveConfig(config_file, env, settings);
    const bool needs_input = name == "detect" || name == "ingest";
    config.Validate(needs_input);
    if (stage.dry_run) {
      PrintJson(config.ToJson());
      return 0;
    }
    if (name == "detect") {
      PrintJson(scade::RunDetect(config).ToJson());
    } else if (name == "ingest") {
      PrintJson(scade::RunIngestStage(config).ToJson());
    } else if (name == "score") {
      scade::RunScoreStage(config);
    } else if (name == "threshold") {
      scade::RunThresholdStage(config);
    } else if (name == "localize") {
      scade::RunLocalizeStage(config);
    } else if (name == "report") {
      PrintJson(scade::RunReportStage(config).ToJson());
    }
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Run(argc, argv);
  } catch (const scade::Error& e) {
    std::cerr << "scade: " << scade::ToString(e.kind()) << ": " << e.what() << '\n';
    return scade::ExitCode(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "scade: internal error: " << e.what() << '\n';
    return scade::ExitCode(scade::ErrorKind::kInternal);
  }
}
