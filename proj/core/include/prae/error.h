// Copyright 2026 The prae Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PRAE_ERROR_H_
#define PRAE_ERROR_H_

#include <stdexcept>
#include <string>

namespace prae {

// Broad failure classes. The CLI maps them onto process exit codes.
enum class ErrorKind {
  kConfig,       // invalid spec, flags, shapes requested by the user
  kDimension,    // tensor shape mismatch inside the engine
  kNumeric,      // NaN/Inf, degenerate variance, non-convergence
  kProtocol,     // API misuse such as backward without forward
  kIo,           // file missing, truncated, corrupt, bad format
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorKind::kConfig, what) {}
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what)
      : Error(ErrorKind::kDimension, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what)
      : Error(ErrorKind::kNumeric, what) {}
};

// Auction did not terminate within its bid budget.
class ConvergenceError : public NumericError {
 public:
  explicit ConvergenceError(const std::string& what) : NumericError(what) {}
};

class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& what)
      : Error(ErrorKind::kProtocol, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::kIo, what) {}
};

class ChecksumError : public IoError {
 public:
  explicit ChecksumError(const std::string& what) : IoError(what) {}
};

// Exit codes: 0 success, 2 config error, 3 numeric failure, 4 I/O.
int exit_code_for(ErrorKind kind);

}  // namespace prae

#endif  // PRAE_ERROR_H_
