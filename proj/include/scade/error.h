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

#ifndef SCADE_ERROR_H_
#define SCADE_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace scade {

// Error categories; each maps to a distinct process exit code.
enum class ErrorKind {
  kConfig,       // invalid parameters, missing inputs
  kData,         // unreadable or inconsistent data
  kCalibration,  // threshold calibration impossible
  kInternal,
};

int ExitCode(ErrorKind kind);
std::string_view ToString(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error ConfigError(const std::string& message) {
  return Error(ErrorKind::kConfig, message);
}
inline Error DataError(const std::string& message) {
  return Error(ErrorKind::kData, message);
}
inline Error CalibrationError(const std::string& message) {
  return Error(ErrorKind::kCalibration, message);
}
inline Error InternalError(const std::string& message) {
  return Error(ErrorKind::kInternal, message);
}

}  // namespace scade

#endif  // SCADE_ERROR_H_
