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

#ifndef SCADE_TESTS_TEST_UTIL_H_
#define SCADE_TESTS_TEST_UTIL_H_

#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>

#include "scade/event.h"

namespace scade::testing {

// A fresh directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("scade-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(std::string_view name) const {
    return path_ / std::string(name);
  }

 private:
  std::filesystem::path path_;
};

inline std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline void WriteFile(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

inline Day MakeDay(int y, unsigned m, unsigned d) {
  return Day(std::chrono::year(y) / std::chrono::month(m) / std::chrono::day(d));
}

// A normalized process-creation event at `hour` on `day`.
inline ProcessEvent MakeEvent(std::uint64_t ref, Day day, std::string device,
                              std::string user, std::string process,
                              std::string command, int hour = 12) {
  ProcessEvent e;
  e.ref = EventRef{ref};
  e.timestamp = Timestamp(day) + std::chrono::hours(hour);
  e.event_id = kProcessCreationEventId;
  e.account_domain = "corp";
  e.account_name = std::move(user);
  e.device_id = std::move(device);
  e.parent_process_name = "cmd.exe";
  e.process_name = std::move(process);
  e.command_line = std::move(command);
  return e;
}

}  // namespace scade::testing

#endif  // SCADE_TESTS_TEST_UTIL_H_
