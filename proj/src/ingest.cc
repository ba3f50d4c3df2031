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

#include "scade/ingest.h"

#include <array>
#include <charconv>
#include <unordered_map>
#include <variant>

#include "json.hpp"
#include "scade/error.h"
#include "scade/parallel.h"

namespace scade {
namespace {

using json = nlohmann::json;

constexpr std::size_t kMaxDiagnostics = 20;

// Either an event or the reason the record was rejected.
using RecordOutcome = std::variant<ProcessEvent, std::string>;

bool IsBlank(std::string_view text) {
  return text.find_first_not_of(" \t\r\n\v\f") == std::string_view::npos;
}

// Shared validation for both formats once raw values are extracted.
std::optional<std::string> CheckRequired(const ProcessEvent& event) {
  if (IsBlank(event.device_id)) return "missing device_id";
  if (IsBlank(event.command_line)) return "missing command_line";
  return std::nullopt;
}

RecordOutcome ParseJsonRecord(std::string_view line, EventRef ref) {
  json record = json::parse(line.begin(), line.end(), nullptr, false);
  if (record.is_discarded()) return std::string("invalid JSON");
  if (!record.is_object()) return std::string("record is not an object");

  ProcessEvent event;
  event.ref = ref;

  const auto ts = record.find("timestamp");
  if (ts == record.end() || !ts->is_string()) return std::string("missing timestamp");
  const auto parsed_ts = ParseTimestamp(ts->get_ref<const std::string&>());
  if (!parsed_ts) return std::string("invalid timestamp");
  event.timestamp = *parsed_ts;

  const auto id = record.find("event_id");
  if (id == record.end() || !id->is_number_integer()) {
    return std::string("missing or non-integer event_id");
  }
  event.event_id = id->get<int>();

  for (const Field field : DefaultAttributeOrder()) {
    const auto it = record.find(std::string(FieldName(field)));
    if (it == record.end() || it->is_null()) continue;
    if (!it->is_string()) {
      return "field " + std::string(FieldName(field)) + " is not a string";
    }
    FieldValue(event, field) = it->get<std::string>();
  }
  if (auto problem = CheckRequired(event)) return *problem;
  return event;
}

// Splits RFC-4180 CSV text into records. Quoted fields may span lines.
// A record with an unterminated quote is returned with `ok == false`.
struct CsvRecord {
  std::vector<std::string> fields;
  bool ok = true;
};

std::vector<CsvRecord> SplitCsv(std::string_view text) {
  std::vector<CsvRecord> records;
  CsvRecord current;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  bool record_has_content = false;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    if (record_has_content || current.fields.size() > 1 ||
        !current.fields.front().empty()) {
      records.push_back(std::move(current));
    }
    current = CsvRecord{};
    record_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !field.empty()) current.ok = false;
        in_quotes = true;
        field_started = true;
        record_has_content = true;
        break;
      case ',':
        end_field();
        record_has_content = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        field.push_back(c);
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(c);
        field_started = true;
        record_has_content = true;
        break;
    }
  }
  if (in_quotes) current.ok = false;
  if (record_has_content || !field.empty() || !current.fields.empty()) {
    end_record();
  }
  return records;
}

struct CsvColumns {
  std::optional<std::size_t> timestamp;
  std::optional<std::size_t> event_id;
  std::array<std::optional<std::size_t>, 7> fields;
  std::size_t width = 0;
};

CsvColumns ResolveHeader(const CsvRecord& header) {
  CsvColumns columns;
  columns.width = header.fields.size();
  for (std::size_t i = 0; i < header.fields.size(); ++i) {
    std::string name = NormalizeText(header.fields[i]);
    if (name == "timestamp") {
      columns.timestamp = i;
    } else if (name == "event_id") {
      columns.event_id = i;
    } else if (auto field = ParseField(name)) {
      columns.fields[static_cast<std::size_t>(*field)] = i;
    }
  }
  if (!columns.timestamp || !columns.event_id ||
      !columns.fields[static_cast<std::size_t>(Field::kDeviceId)] ||
      !columns.fields[static_cast<std::size_t>(Field::kCommandLine)]) {
    throw DataError(
        "CSV header must name timestamp, event_id, device_id and command_line");
  }
  return columns;
}

RecordOutcome ParseCsvRecord(const CsvRecord& record, const CsvColumns& columns,
                             EventRef ref) {
  if (!record.ok) return std::string("unterminated or misplaced quote");
  if (record.fields.size() != columns.width) {
    return "expected " + std::to_string(columns.width) + " columns, got " +
           std::to_string(record.fields.size());
  }
  ProcessEvent event;
  event.ref = ref;
  const auto ts = ParseTimestamp(record.fields[*columns.timestamp]);
  if (!ts) return std::string("invalid timestamp");
  event.timestamp = *ts;

  const std::string& id_text = record.fields[*columns.event_id];
  int id = 0;
  const auto [ptr, ec] =
      std::from_chars(id_text.data(), id_text.data() + id_text.size(), id);
  if (ec != std::errc() || ptr != id_text.data() + id_text.size()) {
    return std::string("missing or non-integer event_id");
  }
  event.event_id = id;

  for (const Field field : DefaultAttributeOrder()) {
    if (const auto col = columns.fields[static_cast<std::size_t>(field)]) {
      FieldValue(event, field) = record.fields[*col];
    }
  }
  if (auto problem = CheckRequired(event)) return *problem;
  return event;
}

ParseResult Collect(std::vector<RecordOutcome>& outcomes,
                    const std::vector<EventRef>& refs) {
  ParseResult result;
  result.records = outcomes.size();
  result.events.reserve(outcomes.size());
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (auto* event = std::get_if<ProcessEvent>(&outcomes[i])) {
      result.events.push_back(std::move(*event));
      continue;
    }
    ++result.skipped;
    if (result.diagnostics.size() < kMaxDiagnostics) {
      result.diagnostics.push_back("record " + std::to_string(refs[i].value) +
                                   ": " + std::get<std::string>(outcomes[i]));
    }
  }
  if (result.skipped * 2 > result.records) {
    throw DataError("corpus quality: " + std::to_string(result.skipped) +
                    " of " + std::to_string(result.records) +
                    " records are malformed (wrong input format?)");
  }
  return result;
}

std::string ReadAll(std::istream& source) {
  if (!source) throw DataError("input stream is not readable");
  std::string text{std::istreambuf_iterator<char>(source),
                   std::istreambuf_iterator<char>()};
  if (source.bad()) throw DataError("I/O error while reading input");
  return text;
}

}  // namespace

std::optional<InputFormat> ParseInputFormat(std::string_view name) {
  if (name == "jsonl") return InputFormat::kJsonl;
  if (name == "csv") return InputFormat::kCsv;
  return std::nullopt;
}

ParseResult ParseEvents(std::istream& source, InputFormat format,
                        std::size_t threads) {
  const std::string text = ReadAll(source);
  std::vector<RecordOutcome> outcomes;
  std::vector<EventRef> refs;

  if (format == InputFormat::kJsonl) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    std::uint64_t line_no = 0;
    while (start < text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string::npos) end = text.size();
      ++line_no;
      std::string_view line(text.data() + start, end - start);
      if (!IsBlank(line)) {
        lines.push_back(line);
        refs.push_back(EventRef{line_no});
      }
      start = end + 1;
    }
    outcomes.resize(lines.size(), RecordOutcome{std::string()});
    ParallelFor(lines.size(), threads, [&](std::size_t i) {
      outcomes[i] = ParseJsonRecord(lines[i], refs[i]);
    });
    return Collect(outcomes, refs);
  }

  std::vector<CsvRecord> records = SplitCsv(text);
  if (records.empty()) return ParseResult{};
  const CsvColumns columns = ResolveHeader(records.front());
  const std::size_t n = records.size() - 1;
  refs.resize(n);
  for (std::size_t i = 0; i < n; ++i) refs[i] = EventRef{i + 1};
  outcomes.resize(n, RecordOutcome{std::string()});
  ParallelFor(n, threads, [&](std::size_t i) {
    outcomes[i] = ParseCsvRecord(records[i + 1], columns, refs[i]);
  });
  return Collect(outcomes, refs);
}

std::vector<ProcessEvent> FilterProcessCreation(
    std::span<const ProcessEvent> events) {
  std::vector<ProcessEvent> out;
  for (const auto& event : events) {
    if (event.event_id == kProcessCreationEventId) out.push_back(event);
  }
  return out;
}

std::string NormalizeText(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
        c == '\f') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    if (text.substr(i, 3) == kBigramSeparator ||
        text.substr(i, 3) == kFieldPairSeparator) {
      out.append("\xEF\xBF\xBD");
      i += 2;
      continue;
    }
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    out.push_back(c);
  }
  return out;
}

ProcessEvent Normalize(const ProcessEvent& event) {
  ProcessEvent out = event;
  for (const Field field : DefaultAttributeOrder()) {
    std::string& value = FieldValue(out, field);
    value = NormalizeText(value);
  }
  return out;
}

PayloadItem BuildPayload(const ProcessEvent& event,
                         std::span<const Field> attribute_order) {
  if (attribute_order.empty()) {
    throw ConfigError("payload attribute order must not be empty");
  }
  PayloadItem item;
  item.event_ref = event.ref;
  item.day = event.day();
  for (const Field field : attribute_order) {
    const std::string& value = FieldValue(event, field);
    if (value.empty()) continue;
    if (!item.text.empty()) item.text.push_back(' ');
    item.text += value;
    item.fields.push_back(value);
  }
  if (item.text.empty()) {
    throw DataError("payload construction: every selected attribute is empty "
                    "for record " + std::to_string(event.ref.value));
  }
  return item;
}

std::string CommandKey(const ProcessEvent& event) {
  if (event.process_name.empty()) return event.command_line;
  return event.process_name + ' ' + event.command_line;
}

}  // namespace scade
