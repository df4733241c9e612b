/*
 * Copyright 2026 The Uplift Policy Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef UPLIFT_ERROR_H_
#define UPLIFT_ERROR_H_

#include <stdexcept>
#include <string>

namespace uplift {

// Error categories map one-to-one onto CLI exit codes.
enum class ErrorKind {
  kSchema,   // missing or malformed column roles
  kParse,    // unreadable cell values
  kData,     // data violates a contract (positivity, unseen arm, ...)
  kConfig,   // invalid configuration or arguments
  kRuntime,  // estimation failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error SchemaError(const std::string& m) {
  return Error(ErrorKind::kSchema, m);
}
inline Error ParseError(const std::string& m) {
  return Error(ErrorKind::kParse, m);
}
inline Error DataError(const std::string& m) {
  return Error(ErrorKind::kData, m);
}
inline Error ConfigError(const std::string& m) {
  return Error(ErrorKind::kConfig, m);
}
inline Error RuntimeError(const std::string& m) {
  return Error(ErrorKind::kRuntime, m);
}

}  // namespace uplift

#endif  // UPLIFT_ERROR_H_
