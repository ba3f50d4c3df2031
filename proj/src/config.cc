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

#include "scade/config.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "scade/error.h"

namespace scade {
namespace {

namespace fs = std::filesystem;

std::string Trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return "";
  const auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

std::vector<std::string> SplitList(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto end = comma == std::string_view::npos ? text.size() : comma;
    auto item = Trim(text.substr(start, end - start));
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void Invalid(std::string_view key, std::string_view value,
                          std::string_view expected) {
  throw ConfigError("invalid value '" + std::string(value) + "' for " +
                    std::string(key) + ": expected " + std::string(expected));
}

double ToDouble(std::string_view key, std::string_view value) {
  const auto text = Trim(value);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(out)) {
    Invalid(key, value, "a number");
  }
  return out;
}

template <typename T>
T ToInteger(std::string_view key, std::string_view value) {
  const auto text = Trim(value);
  T out{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    Invalid(key, value, "an integer");
  }
  return out;
}

bool ToBool(std::string_view key, std::string_view value) {
  auto text = Trim(value);
  std::transform(text.begin(), text.end(), text.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  Invalid(key, value, "true or false");
}

using Setter = void (*)(RunConfig&, std::string_view, std::string_view);

const std::vector<std::pair<std::string, Setter>>& Setters() {
  static const std::vector<std::pair<std::string, Setter>> setters = {
      {"input.path",
       [](RunConfig& c, std::string_view, std::string_view v) { c.input = Trim(v); }},
      {"input.format",
       [](RunConfig& c, std::string_view k, std::string_view v) {
         const auto text = Trim(v);
         if (text.empty() || text == "auto") {
           c.format.reset();
           return;
         }
         const auto f = ParseInputFormat(text);
         if (!f) Invalid(k, v, "jsonl, csv or auto");
         c.format = *f;
       }},
      {"ingest.attributes",
       [](RunConfig& c, std::string_view k, std::string_view v) {
         std::vector<Field> fields;
         for (const auto& name : SplitList(v)) {
           const auto f = ParseField(name);
           if (!f) Invalid(k, name, "a payload attribute name");
           if (std::find(fields.begin(), fields.end(), *f) != fields.end()) {
             Invalid(k, name, "each attribute at most once");
           }
           fields.push_back(*f);
         }
         c.attributes = std::move(fields);
       }},
      {"tokenizer.gram_modes",
       [](RunConfig& c, std::string_view k, std::string_view v) {
         std::vector<GramMode> modes;
         for (const auto& name : SplitList(v)) {
           const auto m = ParseGramMode(name);
           if (!m) Invalid(k, name, "unigram, bigram or both");
           if (std::find(modes.begin(), modes.end(), *m) == modes.end()) {
             modes.push_back(*m);
           }
         }
         c.gram_modes = std::move(modes);
       }},
      {"tokenizer.cross_field_pairs",
       [](RunConfig& c, std::string_view k, std::string_view v) {
         c.cross_field_pairs = ToBool(k, v);
       }},
      {"scoring.k",
       [](RunConfig& c, std::string_view k, std::string_view v) {
         c.scoring.k = ToDouble(k, v);
       }},
      {"scoring.b",
       [](RunConfig& c, std::string_view k, std::string_view v) {
         c.scoring.b = ToDouble(k, v);
       }},
      {"threshold.window_days",
       [](RunConfig& c, std::string_view k, std::string_view v) {
         c.window_days = ToInteger<int>(k, v);
       }},
      {"threshold.now",
       [](RunConfig& c, std::string_view k, std::string_view v) {
         const auto text = Trim(v);
         if (text.empty()) {
           c.now.reset();
           return;
         }
         const auto day = ParseDay(text);
         if (!day) Invalid(k, v, "a YYYY-MM-DD date");
         c.now = *day;
       }},
      {"threshold.score_store",
       [](RunConfig& c, std::string_view, std::string_view v) {
         const auto text = Trim(v);
         if (text.empty()) {
           c.score_store.reset();
         } else {
           c.score_store = text;
         }
       }},
      {"local.history_days",
       [](RunConfig& c, std::string_view k, std::string_view v) {
         c.local.history_days = ToInteger<int>(k, v);
       }},
      {"local.trees",
       [](RunConfig& c, std::string_view k, std::string_view v) {
         c.local.forest.n_trees = ToInteger<std::size_t>(k, v);
       }},
      {"local.subsample",
       [](RunConfig& c, std::string_view k, std::string_view v) {
         c.local.forest.subsample = ToInteger<std::size_t>(k, v);
       }},
      {"local.contamination",
       [](RunConfig& c, std::string_view k, std::string_view v) {
         c.local.forest.contamination = ToDouble(k, v);
       }},
      {"local.seed",
       [](RunConfig& c, std::string_view k, std::string_view v) {
         c.local.forest.seed = ToInteger<std::uint64_t>(k, v);
       }},
      {"local.log_features",
       [](RunConfig& c, std::string_view k, std::string_view v) {
         c.local.log_features = ToBool(k, v);
       }},
      {"output.dir",
       [](RunConfig& c, std::string_view, std::string_view v) { c.output_dir = Trim(v); }},
      {"output.include_bp",
       [](RunConfig& c, std::string_view k, std::string_view v) {
         c.include_bp = ToBool(k, v);
       }},
      {"report.truth",
       [](RunConfig& c, std::string_view, std::string_view v) {
         const auto text = Trim(v);
         if (text.empty()) {
           c.truth.reset();
         } else {
           c.truth = text;
         }
       }},
      {"run.threads",
       [](RunConfig& c, std::string_view k, std::string_view v) {
         c.threads = ToInteger<std::size_t>(k, v);
       }},
  };
  return setters;
}

}  // namespace

void RunConfig::Validate(bool require_input) const {
  if (attributes.empty()) throw ConfigError("ingest.attributes must not be empty");
  if (gram_modes.empty()) throw ConfigError("tokenizer.gram_modes must not be empty");
  scoring.Validate();
  if (window_days < 1) throw ConfigError("threshold.window_days must be >= 1");
  local.Validate();
  if (output_dir.empty()) throw ConfigError("output.dir must not be empty");
  if (require_input) {
    if (input.empty()) throw ConfigError("no input file given");
    if (!fs::is_regular_file(input)) {
      throw ConfigError("input file '" + input.string() + "' does not exist");
    }
    ResolvedFormat();
  }
  if (score_store && fs::exists(*score_store) && !fs::is_regular_file(*score_store)) {
    throw ConfigError("score store '" + score_store->string() + "' is not a file");
  }
  if (truth && !fs::is_regular_file(*truth)) {
    throw ConfigError("ground-truth file '" + truth->string() + "' does not exist");
  }
}

InputFormat RunConfig::ResolvedFormat() const {
  if (format) return *format;
  const auto ext = input.extension().string();
  if (ext == ".jsonl" || ext == ".json" || ext == ".ndjson") return InputFormat::kJsonl;
  if (ext == ".csv") return InputFormat::kCsv;
  throw ConfigError("cannot infer input format from '" + input.string() +
                    "'; set input.format to jsonl or csv");
}

nlohmann::json RunConfig::ToJson() const {
  std::vector<std::string> attribute_names;
  for (const Field f : attributes) attribute_names.emplace_back(FieldName(f));
  std::vector<std::string> gram_names;
  for (const GramMode g : gram_modes) gram_names.emplace_back(ToString(g));
  std::string format_name = "auto";
  if (format) format_name = *format == InputFormat::kCsv ? "csv" : "jsonl";
  return {
      {"input", {{"path", input.string()}, {"format", format_name}}},
      {"ingest", {{"attributes", attribute_names}}},
      {"tokenizer",
       {{"gram_modes", gram_names}, {"cross_field_pairs", cross_field_pairs}}},
      {"scoring", {{"k", scoring.k}, {"b", scoring.b}}},
      {"threshold",
       {{"window_days", window_days},
        {"now", now ? nlohmann::json(FormatDay(*now)) : nlohmann::json(nullptr)},
        {"score_store", score_store ? nlohmann::json(score_store->string())
                                    : nlohmann::json(nullptr)}}},
      {"local",
       {{"history_days", local.history_days},
        {"trees", local.forest.n_trees},
        {"subsample", local.forest.subsample},
        {"contamination", local.forest.contamination},
        {"seed", local.forest.seed},
        {"log_features", local.log_features}}},
      {"output", {{"dir", output_dir.string()}, {"include_bp", include_bp}}},
      {"report",
       {{"truth", truth ? nlohmann::json(truth->string()) : nlohmann::json(nullptr)}}},
      {"run", {{"threads", threads}}},
  };
}

const std::vector<std::string>& SettingNames() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, setter] : Setters()) out.push_back(name);
    return out;
  }();
  return names;
}

void ApplySetting(RunConfig& config, std::string_view key, std::string_view value) {
  for (const auto& [name, setter] : Setters()) {
    if (name == key) {
      setter(config, key, value);
      return;
    }
  }
  throw ConfigError("unknown setting '" + std::string(key) + "'");
}

Settings ParseIni(std::istream& in) {
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_config(in);
  } catch (const CLI::Error& e) {
    throw ConfigError(std::string("config file: ") + e.what());
  }
  Settings out;
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    if (item.parents.empty()) {
      throw ConfigError("config key '" + item.name + "' is outside a [section]");
    }
    std::string value;
    for (std::size_t i = 0; i < item.inputs.size(); ++i) {
      if (i > 0) value += ',';
      value += item.inputs[i];
    }
    out[item.fullname()] = value;
  }
  return out;
}

std::string EnvVarName(std::string_view key) {
  std::string out = "SCADE_";
  for (const char c : key) {
    out.push_back(c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return out;
}

Settings EnvSettings(const std::function<const char*(const char*)>& getenv_fn) {
  Settings out;
  for (const auto& key : SettingNames()) {
    if (const char* value = getenv_fn(EnvVarName(key).c_str())) out[key] = value;
  }
  return out;
}

RunConfig ResolveConfig(const std::optional<std::filesystem::path>& config_file,
                        const Settings& env, const Settings& flags) {
  RunConfig config;
  if (config_file) {
    std::ifstream in(*config_file);
    if (!in) {
      throw ConfigError("cannot open config file '" + config_file->string() + "'");
    }
    for (const auto& [key, value] : ParseIni(in)) ApplySetting(config, key, value);
  }
  for (const auto& [key, value] : env) ApplySetting(config, key, value);
  for (const auto& [key, value] : flags) ApplySetting(config, key, value);
  return config;
}

}  // namespace scade
