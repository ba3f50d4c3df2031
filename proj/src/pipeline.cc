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

#include "scade/pipeline.h"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <tuple>
#include <utility>

#include "scade/error.h"
#include "scade/ingest.h"
#include "scade/local_analysis.h"
#include "scade/parallel.h"
#include "scade/scoring.h"
#include "scade/synth.h"
#include "scade/threshold.h"
#include "scade/tokenizer.h"

namespace scade {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::size_t kStoredAttributions = 10;
constexpr std::size_t kReportedAttributions = 5;

struct StoredPayload {
  ProcessEvent event;  // normalized
  PayloadItem payload;
};

fs::path ArtifactPath(const RunConfig& config, std::string_view name) {
  return config.output_dir / std::string(name);
}

std::ofstream OpenOutput(const RunConfig& config, std::string_view name) {
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec) {
    throw DataError("cannot create output directory '" +
                    config.output_dir.string() + "': " + ec.message());
  }
  const auto path = ArtifactPath(config, name);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  return out;
}

void Finish(std::ofstream& out, std::string_view name) {
  out.flush();
  if (!out) throw DataError("failed writing " + std::string(name));
}

std::ifstream OpenArtifact(const RunConfig& config, std::string_view name,
                           std::string_view producer) {
  const auto path = ArtifactPath(config, name);
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("missing artifact '" + path.string() + "'; run the " +
                      std::string(producer) + " stage first");
  }
  return in;
}

void ForEachJsonLine(std::istream& in, std::string_view name,
                     const std::function<void(const json&)>& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw DataError(std::string(name) + " line " + std::to_string(line_no) +
                      " is not a JSON object");
    }
    try {
      fn(j);
    } catch (const json::exception& e) {
      throw DataError(std::string(name) + " line " + std::to_string(line_no) +
                      ": " + e.what());
    }
  }
}

json ReadJsonArtifact(const RunConfig& config, std::string_view name,
                      std::string_view producer) {
  auto in = OpenArtifact(config, name, producer);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw DataError(std::string(name) + " is not valid JSON");
  return j;
}

Day ParseDayField(const json& j, const char* key) {
  const auto day = ParseDay(j.at(key).get<std::string>());
  if (!day) throw DataError(std::string("invalid day in field ") + key);
  return *day;
}

json PayloadToJson(const StoredPayload& p) {
  const ProcessEvent& e = p.event;
  return {{"event_ref", e.ref.value},
          {"timestamp", FormatTimestamp(e.timestamp)},
          {"day", FormatDay(p.payload.day)},
          {"event_id", e.event_id},
          {"account_domain", e.account_domain},
          {"account_name", e.account_name},
          {"device_id", e.device_id},
          {"parent_process_name", e.parent_process_name},
          {"process_name", e.process_name},
          {"command_line", e.command_line},
          {"file_path", e.file_path},
          {"text", p.payload.text},
          {"fields", p.payload.fields}};
}

std::vector<StoredPayload> ReadPayloads(const RunConfig& config) {
  auto in = OpenArtifact(config, artifacts::kPayloads, "ingest");
  std::vector<StoredPayload> out;
  ForEachJsonLine(in, artifacts::kPayloads, [&](const json& j) {
    StoredPayload p;
    ProcessEvent& e = p.event;
    e.ref = EventRef{j.at("event_ref").get<std::uint64_t>()};
    const auto ts = ParseTimestamp(j.at("timestamp").get<std::string>());
    if (!ts) throw DataError("invalid timestamp in payload artifact");
    e.timestamp = *ts;
    e.event_id = j.at("event_id").get<int>();
    e.account_domain = j.at("account_domain").get<std::string>();
    e.account_name = j.at("account_name").get<std::string>();
    e.device_id = j.at("device_id").get<std::string>();
    e.parent_process_name = j.at("parent_process_name").get<std::string>();
    e.process_name = j.at("process_name").get<std::string>();
    e.command_line = j.at("command_line").get<std::string>();
    e.file_path = j.at("file_path").get<std::string>();
    p.payload.event_ref = e.ref;
    p.payload.day = ParseDayField(j, "day");
    p.payload.text = j.at("text").get<std::string>();
    p.payload.fields = j.at("fields").get<std::vector<std::string>>();
    out.push_back(std::move(p));
  });
  if (out.empty()) throw DataError("payload artifact is empty");
  return out;
}

std::vector<ModelTag> ConfiguredTags(const RunConfig& config) {
  std::vector<ModelTag> tags;
  for (const GramMode gram : config.gram_modes) {
    tags.push_back({ScoreModel::kBm25, gram});
    tags.push_back({ScoreModel::kLogEntropy, gram});
  }
  std::sort(tags.begin(), tags.end());
  return tags;
}

ModelTag ParseTag(const std::string& text) {
  const auto tag = ModelTag::Parse(text);
  if (!tag) throw DataError("unknown model tag '" + text + "'");
  return *tag;
}

std::string FingerprintText(const ProcessEvent& e, const std::string& text) {
  return FormatTimestamp(e.timestamp) + "|" + e.device_id + "|" + text;
}

struct ScoredPayload {
  std::map<ModelTag, double> scores;
  std::vector<GramAttribution> attributions;
};

std::map<EventRef, ScoredPayload> ReadScores(const RunConfig& config) {
  auto in = OpenArtifact(config, artifacts::kScores, "score");
  std::map<EventRef, ScoredPayload> out;
  ForEachJsonLine(in, artifacts::kScores, [&](const json& j) {
    ScoredPayload s;
    for (const auto& [tag, value] : j.at("scores").items()) {
      s.scores[ParseTag(tag)] = value.get<double>();
    }
    for (const auto& a : j.at("top_attributions")) {
      const auto gram = ParseGramMode(a.at("gram_mode").get<std::string>());
      if (!gram) throw DataError("unknown gram mode in score artifact");
      s.attributions.push_back(
          {*gram, TokenAttribution{a.at("token").get<std::string>(),
                                   a.at("bm25").get<double>(),
                                   a.at("log_entropy").get<double>()}});
    }
    out[EventRef{j.at("event_ref").get<std::uint64_t>()}] = std::move(s);
  });
  return out;
}

std::vector<GlobalAssessment> ReadSeverities(const RunConfig& config) {
  auto in = OpenArtifact(config, artifacts::kSeverities, "threshold");
  std::vector<GlobalAssessment> out;
  ForEachJsonLine(in, artifacts::kSeverities, [&](const json& j) {
    GlobalAssessment g;
    g.event_ref = EventRef{j.at("event_ref").get<std::uint64_t>()};
    for (const auto& [tag, value] : j.at("severities").items()) {
      const auto severity = ParseSeverity(value.get<std::string>());
      if (!severity) throw DataError("unknown severity in severity artifact");
      g.severities[ParseTag(tag)] = *severity;
    }
    for (const auto& [tag, value] : j.at("scores").items()) {
      g.scores[ParseTag(tag)] = value.get<double>();
    }
    for (const auto& [tag, value] : j.at("standardized").items()) {
      g.standardized[ParseTag(tag)] = value.get<double>();
    }
    out.push_back(std::move(g));
  });
  return out;
}

bool AttributionBefore(const GramAttribution& a, const GramAttribution& b) {
  const double ca = a.attribution.combined();
  const double cb = b.attribution.combined();
  if (ca != cb) return ca > cb;
  if (a.attribution.token != b.attribution.token) {
    return a.attribution.token < b.attribution.token;
  }
  return a.gram < b.gram;
}

}  // namespace

namespace artifacts {
std::string CorpusModelFile(GramMode gram) {
  return "model_" + std::string(ToString(gram)) + ".json";
}
}  // namespace artifacts

nlohmann::json IngestSummary::ToJson() const {
  return {{"records", records},
          {"skipped", skipped},
          {"filtered_out", filtered_out},
          {"payloads", payloads},
          {"diagnostics", diagnostics}};
}

nlohmann::json RunSummary::ToJson() const {
  json j = {{"now", now},
            {"window_start", window_start},
            {"classified", classified},
            {"flagged", flagged},
            {"true_positive", counts.true_positive},
            {"benign_positive", counts.benign_positive},
            {"legitimate", counts.legitimate},
            {"low_confidence", counts.low_confidence}};
  if (metrics) j["metrics"] = metrics->ToJson();
  return j;
}

IngestSummary RunIngestStage(const RunConfig& config) {
  config.Validate(/*require_input=*/true);
  std::ifstream in(config.input, std::ios::binary);
  if (!in) throw ConfigError("cannot open input '" + config.input.string() + "'");
  const ParseResult parsed = ParseEvents(in, config.ResolvedFormat(), config.threads);
  const auto events = FilterProcessCreation(parsed.events);

  IngestSummary summary;
  summary.records = parsed.records;
  summary.skipped = parsed.skipped;
  summary.filtered_out = parsed.events.size() - events.size();
  summary.payloads = events.size();
  summary.diagnostics = parsed.diagnostics;
  if (events.empty()) throw DataError("input contains no process-creation events");

  std::vector<StoredPayload> payloads(events.size());
  ParallelFor(events.size(), config.threads, [&](std::size_t i) {
    payloads[i].event = Normalize(events[i]);
    payloads[i].payload = BuildPayload(payloads[i].event, config.attributes);
  });

  auto out = OpenOutput(config, artifacts::kPayloads);
  for (const auto& p : payloads) out << PayloadToJson(p).dump() << '\n';
  Finish(out, artifacts::kPayloads);
  auto summary_out = OpenOutput(config, artifacts::kIngestSummary);
  summary_out << summary.ToJson().dump(2) << '\n';
  Finish(summary_out, artifacts::kIngestSummary);
  return summary;
}

void RunScoreStage(const RunConfig& config) {
  config.Validate(/*require_input=*/false);
  const auto payloads = ReadPayloads(config);
  const TokenizeOptions options{config.cross_field_pairs};

  std::vector<std::map<ModelTag, double>> scores(payloads.size());
  std::vector<std::vector<GramAttribution>> attributions(payloads.size());
  for (const GramMode gram : config.gram_modes) {
    std::vector<TokenizedDoc> docs(payloads.size());
    ParallelFor(payloads.size(), config.threads, [&](std::size_t i) {
      docs[i] = Tokenize(payloads[i].payload, gram, options);
    });
    const CorpusModel model = BuildCorpusModel(docs, config.threads);
    const auto name = artifacts::CorpusModelFile(gram);
    auto model_out = OpenOutput(config, name);
    model_out << model.ToJson().dump() << '\n';
    Finish(model_out, name);

    const auto records =
        ScoreCorpus(docs, model, config.scoring, gram, config.threads);
    for (std::size_t i = 0; i < records.size(); ++i) {
      scores[i][{ScoreModel::kBm25, gram}] = records[i].bm25_score;
      scores[i][{ScoreModel::kLogEntropy, gram}] = records[i].log_entropy_score;
      for (auto& a : records[i].TopAttributions(kStoredAttributions)) {
        attributions[i].push_back({gram, std::move(a)});
      }
    }
  }

  auto out = OpenOutput(config, artifacts::kScores);
  for (std::size_t i = 0; i < payloads.size(); ++i) {
    auto& attr = attributions[i];
    std::sort(attr.begin(), attr.end(), AttributionBefore);
    if (attr.size() > kStoredAttributions) attr.resize(kStoredAttributions);
    json score_map = json::object();
    for (const auto& [tag, value] : scores[i]) score_map[tag.ToString()] = value;
    json attr_list = json::array();
    for (const auto& a : attr) {
      attr_list.push_back({{"token", a.attribution.token},
                           {"gram_mode", ToString(a.gram)},
                           {"bm25", a.attribution.bm25},
                           {"log_entropy", a.attribution.log_entropy}});
    }
    out << json{{"event_ref", payloads[i].event.ref.value},
                {"scores", std::move(score_map)},
                {"top_attributions", std::move(attr_list)}}
               .dump()
        << '\n';
  }
  Finish(out, artifacts::kScores);
}

void RunThresholdStage(const RunConfig& config) {
  config.Validate(/*require_input=*/false);
  const auto payloads = ReadPayloads(config);
  const auto scores = ReadScores(config);
  const auto tags = ConfiguredTags(config);

  ScoreStore store;
  if (config.score_store && fs::exists(*config.score_store)) {
    std::ifstream in(*config.score_store, std::ios::binary);
    if (!in) throw DataError("cannot read score store '" + config.score_store->string() + "'");
    store = ScoreStore::Read(in);
  }
  Day latest = payloads.front().payload.day;
  for (const auto& p : payloads) {
    latest = std::max(latest, p.payload.day);
    const auto it = scores.find(p.event.ref);
    if (it == scores.end()) {
      throw DataError("no scores for payload " + std::to_string(p.event.ref.value));
    }
    const auto fingerprint = Fingerprint(FingerprintText(p.event, p.payload.text));
    for (const auto& tag : tags) {
      const auto s = it->second.scores.find(tag);
      if (s == it->second.scores.end()) {
        throw DataError("score artifact lacks model " + tag.ToString() +
                        "; rerun the score stage with the same gram modes");
      }
      store.Upsert({tag, p.payload.day, fingerprint, s->second});
    }
  }
  const Day now = config.now.value_or(latest);
  const Day window_start = now - std::chrono::days(config.window_days - 1);

  std::map<ModelTag, ThresholdModel> models;
  for (const auto& tag : tags) {
    models[tag] = Recalibrate(store, tag, now, config.window_days);
  }

  std::map<ModelTag, std::array<std::size_t, 3>> tier_counts;
  auto out = OpenOutput(config, artifacts::kSeverities);
  std::size_t classified = 0;
  for (const auto& p : payloads) {
    if (p.payload.day < window_start || p.payload.day > now) continue;
    ++classified;
    const auto& s = scores.at(p.event.ref).scores;
    json severities = json::object();
    json score_map = json::object();
    json standardized = json::object();
    for (const auto& tag : tags) {
      const double score = s.at(tag);
      const Severity severity = Classify(score, models[tag]);
      ++tier_counts[tag][static_cast<std::size_t>(severity)];
      severities[tag.ToString()] = ToString(severity);
      score_map[tag.ToString()] = score;
      standardized[tag.ToString()] = models[tag].Standardize(score);
    }
    out << json{{"event_ref", p.event.ref.value},
                {"day", FormatDay(p.payload.day)},
                {"severities", std::move(severities)},
                {"scores", std::move(score_map)},
                {"standardized", std::move(standardized)}}
               .dump()
        << '\n';
  }
  Finish(out, artifacts::kSeverities);

  json model_list = json::array();
  for (const auto& tag : tags) {
    json m = models[tag].ToJson();
    const auto& c = tier_counts[tag];
    m["counts"] = {{"high", c[2]}, {"medium", c[1]}, {"low", c[0]}};
    model_list.push_back(std::move(m));
  }
  auto thresholds = OpenOutput(config, artifacts::kThresholds);
  thresholds << json{{"now", FormatDay(now)},
                     {"window_start", FormatDay(window_start)},
                     {"window_days", config.window_days},
                     {"classified", classified},
                     {"models", std::move(model_list)}}
                    .dump(2)
             << '\n';
  Finish(thresholds, artifacts::kThresholds);

  if (config.score_store) {
    if (config.score_store->has_parent_path()) {
      std::error_code ec;
      fs::create_directories(config.score_store->parent_path(), ec);
    }
    std::ofstream store_out(*config.score_store, std::ios::binary | std::ios::trunc);
    if (!store_out) {
      throw DataError("cannot write score store '" + config.score_store->string() + "'");
    }
    store.Write(store_out);
  }
}

void RunLocalizeStage(const RunConfig& config) {
  config.Validate(/*require_input=*/false);
  const auto payloads = ReadPayloads(config);
  const auto assessments = ReadSeverities(config);
  const auto flagged = FilterFlagged(assessments);

  std::vector<ProcessEvent> events;
  events.reserve(payloads.size());
  for (const auto& p : payloads) events.push_back(p.event);
  const EventStore store(events);
  const LocalAnalysis analysis = AnalyzeLocal(flagged, store, config.local, config.threads);

  auto stats_out = OpenOutput(config, artifacts::kExecStats);
  WriteStatsCsv(stats_out, analysis.stats);
  Finish(stats_out, artifacts::kExecStats);

  auto local_out = OpenOutput(config, artifacts::kLocal);
  for (const auto& [ref, result] : analysis.results) {
    json j = {{"event_ref", ref.value},
              {"decision", ToString(result.status)},
              {"score", result.score ? json(*result.score) : json(nullptr)}};
    if (const auto g = analysis.stats.group_of.find(ref);
        g != analysis.stats.group_of.end()) {
      j["group"] = analysis.stats.groups[g->second].representative.value;
    }
    if (!result.reason.empty()) j["reason"] = result.reason;
    local_out << j.dump() << '\n';
  }
  Finish(local_out, artifacts::kLocal);

  json model = {{"flagged", flagged.size()},
                {"groups", analysis.stats.groups.size()},
                {"fitted", analysis.forest.has_value()}};
  if (analysis.forest) {
    const auto& f = *analysis.forest;
    model["training_rows"] = f.training_scores().size();
    model["trees"] = f.tree_count();
    model["subsample"] = f.subsample_size();
    model["depth_limit"] = f.depth_limit();
    model["contamination"] = f.params().contamination;
    model["seed"] = f.params().seed;
    model["cutoff"] = f.cutoff();
  }
  auto model_out = OpenOutput(config, artifacts::kLocalModel);
  model_out << model.dump(2) << '\n';
  Finish(model_out, artifacts::kLocalModel);
}

RunSummary RunReportStage(const RunConfig& config) {
  config.Validate(/*require_input=*/false);
  auto assessments = ReadSeverities(config);
  const auto scores = ReadScores(config);
  const json thresholds = ReadJsonArtifact(config, artifacts::kThresholds, "threshold");

  std::map<EventRef, LocalResult> local;
  {
    auto in = OpenArtifact(config, artifacts::kLocal, "localize");
    ForEachJsonLine(in, artifacts::kLocal, [&](const json& j) {
      const auto status = ParseLocalStatus(j.at("decision").get<std::string>());
      if (!status) throw DataError("unknown local decision");
      LocalResult r;
      r.status = *status;
      if (!j.at("score").is_null()) r.score = j.at("score").get<double>();
      r.reason = j.value("reason", "");
      local[EventRef{j.at("event_ref").get<std::uint64_t>()}] = std::move(r);
    });
  }
  for (auto& a : assessments) {
    if (const auto it = scores.find(a.event_ref); it != scores.end()) {
      a.top_attributions = it->second.attributions;
    }
  }
  const auto verdicts = Finalize(assessments, local);

  auto verdicts_out = OpenOutput(config, artifacts::kVerdicts);
  auto alerts_out = OpenOutput(config, artifacts::kAlerts);
  std::vector<VerdictLabel> labels;
  for (const auto& v : verdicts) {
    const std::string line = VerdictToJson(v, kReportedAttributions).dump();
    verdicts_out << line << '\n';
    if (v.classification == Classification::kTruePositive ||
        (config.include_bp && v.classification == Classification::kBenignPositive)) {
      alerts_out << line << '\n';
    }
    labels.push_back({v.event_ref, v.classification});
  }
  Finish(verdicts_out, artifacts::kVerdicts);
  Finish(alerts_out, artifacts::kAlerts);

  RunSummary summary;
  summary.now = thresholds.at("now").get<std::string>();
  summary.window_start = thresholds.at("window_start").get<std::string>();
  summary.classified = verdicts.size();
  summary.flagged = local.size();
  summary.counts = CountVerdicts(verdicts);
  if (config.truth) {
    std::ifstream in(*config.truth, std::ios::binary);
    if (!in) throw ConfigError("cannot open ground truth '" + config.truth->string() + "'");
    const auto truth = ReadTruthJsonl(in);
    summary.metrics = Evaluate(labels, truth);
  }
  json j = summary.ToJson();
  j["thresholds"] = thresholds.at("models");
  j["parameters"] = config.ToJson();
  // Paths vary between runs; keep the summary reproducible.
  j["parameters"].erase("input");
  j["parameters"].erase("output");
  j["parameters"]["report"].erase("truth");
  j["parameters"]["threshold"].erase("score_store");
  auto summary_out = OpenOutput(config, artifacts::kSummary);
  summary_out << j.dump(2) << '\n';
  Finish(summary_out, artifacts::kSummary);
  return summary;
}

RunSummary RunDetect(const RunConfig& config) {
  config.Validate(/*require_input=*/true);
  RunIngestStage(config);
  RunScoreStage(config);
  RunThresholdStage(config);
  RunLocalizeStage(config);
  return RunReportStage(config);
}

}  // namespace scade
