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

#ifndef SCADE_EVENT_H_
#define SCADE_EVENT_H_

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scade {

using Timestamp =
    std::chrono::time_point<std::chrono::system_clock, std::chrono::microseconds>;
using Day = std::chrono::sys_days;

// Identifies a telemetry record by its 1-based position in the source input.
struct EventRef {
  std::uint64_t value = 0;

  friend auto operator<=>(const EventRef&, const EventRef&) = default;
};

inline constexpr int kProcessCreationEventId = 4688;

struct ProcessEvent {
  EventRef ref;
  Timestamp timestamp{};
  int event_id = 0;
  std::string account_name;
  std::string account_domain;
  std::string device_id;
  std::string parent_process_name;
  std::string process_name;
  std::string command_line;
  std::string file_path;

  Day day() const { return std::chrono::floor<std::chrono::days>(timestamp); }

  friend bool operator==(const ProcessEvent&, const ProcessEvent&) = default;
};

// String attributes of a ProcessEvent that may feed a payload.
enum class Field {
  kAccountDomain,
  kAccountName,
  kDeviceId,
  kParentProcessName,
  kProcessName,
  kCommandLine,
  kFilePath,
};

std::string_view FieldName(Field field);
std::optional<Field> ParseField(std::string_view name);
const std::string& FieldValue(const ProcessEvent& event, Field field);
std::string& FieldValue(ProcessEvent& event, Field field);

// account_domain, account_name, device_id, parent_process_name,
// process_name, command_line, file_path.
const std::vector<Field>& DefaultAttributeOrder();

// ISO-8601 instant: "YYYY-MM-DD[T| ]HH:MM:SS[.ffffff][Z|+HH:MM|-HH:MM]".
// A missing offset means UTC.
std::optional<Timestamp> ParseTimestamp(std::string_view text);
std::string FormatTimestamp(Timestamp ts);

std::optional<Day> ParseDay(std::string_view text);  // "YYYY-MM-DD"
std::string FormatDay(Day day);

}  // namespace scade

#endif  // SCADE_EVENT_H_
