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

#ifndef SCADE_CONFIG_H_
#define SCADE_CONFIG_H_

#include <cstddef>
#include <filesystem>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "scade/event.h"
#include "scade/ingest.h"
#include "scade/local_analysis.h"
#include "scade/scoring.h"
#include "scade/tokenizer.h"

namespace scade {

// Every tunable of a detection run.
struct RunConfig {
  std::filesystem::path input;
  std::optional<InputFormat> format;  // from the file extension when unset
  std::vector<Field> attributes = DefaultAttributeOrder();
  std::vector<GramMode> gram_modes = {GramMode::kUnigram, GramMode::kBigram};
  bool cross_field_pairs = false;
  ScoringParams scoring;
  int window_days = 2;
  std::optional<Day> now;  // latest input day when unset
  std::optional<std::filesystem::path> score_store;
  LocalParams local;
  std::filesystem::path output_dir = "scade-out";
  bool include_bp = true;
  std::optional<std::filesystem::path> truth;
  std::size_t threads = 1;  // 0: hardware concurrency

  // Throws a config error for out-of-range values, and for a missing input
  // file when `require_input` is set.
  void Validate(bool require_input) const;
  nlohmann::json ToJson() const;
  InputFormat ResolvedFormat() const;
};

// Settings use "section.key" names, e.g. "scoring.k".
using Settings = std::map<std::string, std::string>;

// Names of every recognized setting.
const std::vector<std::string>& SettingNames();

// Throws a config error for unknown keys or unparsable values.
void ApplySetting(RunConfig& config, std::string_view key, std::string_view value);

// INI text with [section] headers.
Settings ParseIni(std::istream& in);

// SCADE_<SECTION>_<KEY> variables, e.g. SCADE_SCORING_K.
std::string EnvVarName(std::string_view key);
Settings EnvSettings(const std::function<const char*(const char*)>& getenv_fn);

// defaults < config file < environment < flags.
RunConfig ResolveConfig(const std::optional<std::filesystem::path>& config_file,
                        const Settings& env, const Settings& flags);

}  // namespace scade

#endif  // SCADE_CONFIG_H_
