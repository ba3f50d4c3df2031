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

#include "scade/event.h"

#include <array>
#include <cstdio>

namespace scade {
namespace {

constexpr std::array<std::string_view, 7> kFieldNames = {
    "account_domain", "account_name", "device_id",  "parent_process_name",
    "process_name",   "command_line", "file_path",
};

// Reads exactly `width` digits at text[pos].
std::optional<int> ReadDigits(std::string_view text, std::size_t pos,
                              std::size_t width) {
  if (pos + width > text.size()) return std::nullopt;
  int value = 0;
  for (std::size_t i = pos; i < pos + width; ++i) {
    const char c = text[i];
    if (c < '0' || c > '9') return std::nullopt;
    value = value * 10 + (c - '0');
  }
  return value;
}

std::optional<Day> ParseDate(std::string_view text) {
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  const auto y = ReadDigits(text, 0, 4);
  const auto m = ReadDigits(text, 5, 2);
  const auto d = ReadDigits(text, 8, 2);
  if (!y || !m || !d) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{*y},
                                        std::chrono::month{unsigned(*m)},
                                        std::chrono::day{unsigned(*d)}};
  if (!ymd.ok()) return std::nullopt;
  return Day{ymd};
}

}  // namespace

std::string_view FieldName(Field field) {
  return kFieldNames[static_cast<std::size_t>(field)];
}

std::optional<Field> ParseField(std::string_view name) {
  for (std::size_t i = 0; i < kFieldNames.size(); ++i) {
    if (kFieldNames[i] == name) return static_cast<Field>(i);
  }
  return std::nullopt;
}

const std::string& FieldValue(const ProcessEvent& event, Field field) {
  switch (field) {
    case Field::kAccountDomain:
      return event.account_domain;
    case Field::kAccountName:
      return event.account_name;
    case Field::kDeviceId:
      return event.device_id;
    case Field::kParentProcessName:
      return event.parent_process_name;
    case Field::kProcessName:
      return event.process_name;
    case Field::kCommandLine:
      return event.command_line;
    case Field::kFilePath:
      return event.file_path;
  }
  return event.command_line;
}

std::string& FieldValue(ProcessEvent& event, Field field) {
  return const_cast<std::string&>(
      FieldValue(static_cast<const ProcessEvent&>(event), field));
}

const std::vector<Field>& DefaultAttributeOrder() {
  static const std::vector<Field> kOrder = {
      Field::kAccountDomain,     Field::kAccountName, Field::kDeviceId,
      Field::kParentProcessName, Field::kProcessName, Field::kCommandLine,
      Field::kFilePath,
  };
  return kOrder;
}

std::optional<Timestamp> ParseTimestamp(std::string_view text) {
  using namespace std::chrono;
  const auto date = ParseDate(text);
  if (!date) return std::nullopt;
  if (text.size() == 10) return Timestamp{*date};
  if (text.size() < 19 || (text[10] != 'T' && text[10] != 't' && text[10] != ' ') ||
      text[13] != ':' || text[16] != ':') {
    return std::nullopt;
  }
  const auto hh = ReadDigits(text, 11, 2);
  const auto mm = ReadDigits(text, 14, 2);
  const auto ss = ReadDigits(text, 17, 2);
  if (!hh || !mm || !ss || *hh > 23 || *mm > 59 || *ss > 60) return std::nullopt;
  Timestamp ts = Timestamp{*date} + hours{*hh} + minutes{*mm} + seconds{*ss};

  std::size_t pos = 19;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    std::int64_t micros = 0;
    int digits = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      if (digits < 6) {
        micros = micros * 10 + (text[pos] - '0');
        ++digits;
      }
      ++pos;
    }
    if (digits == 0) return std::nullopt;
    for (; digits < 6; ++digits) micros *= 10;
    ts += microseconds{micros};
  }
  if (pos == text.size()) return ts;
  if ((text[pos] == 'Z' || text[pos] == 'z') && pos + 1 == text.size()) return ts;
  if (text[pos] == '+' || text[pos] == '-') {
    const int sign = text[pos] == '+' ? 1 : -1;
    const auto oh = ReadDigits(text, pos + 1, 2);
    std::optional<int> om;
    std::size_t end = pos + 3;
    if (end < text.size() && text[end] == ':') {
      om = ReadDigits(text, end + 1, 2);
      end += 3;
    } else {
      om = ReadDigits(text, end, 2);
      end += 2;
    }
    if (!oh || !om || end != text.size() || *oh > 23 || *om > 59) {
      return std::nullopt;
    }
    return ts - sign * (hours{*oh} + minutes{*om});
  }
  return std::nullopt;
}

std::string FormatTimestamp(Timestamp ts) {
  using namespace std::chrono;
  const Day day = floor<days>(ts);
  const year_month_day ymd{day};
  auto rest = ts - Timestamp{day};
  const auto h = duration_cast<hours>(rest);
  rest -= h;
  const auto m = duration_cast<minutes>(rest);
  rest -= m;
  const auto s = duration_cast<seconds>(rest);
  rest -= s;
  const auto us = duration_cast<microseconds>(rest).count();
  char buf[48];
  if (us == 0) {
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ",
                  int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day()),
                  int(h.count()), int(m.count()), int(s.count()));
  } else {
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02d.%06dZ",
                  int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day()),
                  int(h.count()), int(m.count()), int(s.count()), int(us));
  }
  return buf;
}

std::optional<Day> ParseDay(std::string_view text) {
  if (text.size() != 10) return std::nullopt;
  return ParseDate(text);
}

std::string FormatDay(Day day) {
  const std::chrono::year_month_day ymd{day};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()));
  return buf;
}

}  // namespace scade
