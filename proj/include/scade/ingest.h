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

#ifndef SCADE_INGEST_H_
#define SCADE_INGEST_H_

#include <cstddef>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scade/event.h"

namespace scade {

enum class InputFormat { kJsonl, kCsv };

std::optional<InputFormat> ParseInputFormat(std::string_view name);

struct ParseResult {
  std::vector<ProcessEvent> events;
  std::size_t records = 0;  // non-blank records seen
  std::size_t skipped = 0;  // malformed records
  // First few malformed-record diagnostics, "record N: reason".
  std::vector<std::string> diagnostics;
};

// Parses one record per line (JSONL) or an RFC-4180 CSV with header.
// Malformed records are counted and skipped. Throws a data error when the
// stream is unreadable or more than half of the records are malformed.
ParseResult ParseEvents(std::istream& source, InputFormat format,
                        std::size_t threads = 1);

std::vector<ProcessEvent> FilterProcessCreation(
    std::span<const ProcessEvent> events);

// Lowercases (ASCII), collapses whitespace runs, trims. Reserved token
// separators are replaced with U+FFFD. Idempotent.
std::string NormalizeText(std::string_view text);
ProcessEvent Normalize(const ProcessEvent& event);

struct PayloadItem {
  EventRef event_ref;
  std::string text;
  Day day{};
  // Non-empty attribute values in payload order.
  std::vector<std::string> fields;

  friend bool operator==(const PayloadItem&, const PayloadItem&) = default;
};

// Joins the selected attribute values with single spaces, skipping empty
// ones. Throws a data error if every selected attribute is empty.
PayloadItem BuildPayload(const ProcessEvent& event,
                         std::span<const Field> attribute_order);

// Command identity used by local analysis: "process_name command_line".
std::string CommandKey(const ProcessEvent& event);

// Reserved separators (UTF-8) that cannot appear in normalized text.
inline constexpr std::string_view kBigramSeparator = "\xE2\x90\x9E";     // U+241E
inline constexpr std::string_view kFieldPairSeparator = "\xE2\x90\x9F";  // U+241F

}  // namespace scade

#endif  // SCADE_INGEST_H_
