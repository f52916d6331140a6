// Copyright 2026 The DGT Authors. All rights reserved.
//
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

#ifndef DGT_ERROR_HPP_
#define DGT_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dgt {

enum class ErrorCode {
  kDomain = 1,
  kTopology,
  kConfig,
  kDivergence,
  kPrecondition,
  kUnsupported,
  kSingular,
  kNoConvergence,
  kProtocol,
  kIo,
};

// Base class of every exception thrown by the library. The code is what the
// C API forwards to callers.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what)
      : Error(ErrorCode::kDomain, what) {}
};

class TopologyError : public Error {
 public:
  explicit TopologyError(const std::string& what)
      : Error(ErrorCode::kTopology, what) {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what)
      : Error(ErrorCode::kPrecondition, what) {}
};

class UnsupportedError : public Error {
 public:
  explicit UnsupportedError(const std::string& what)
      : Error(ErrorCode::kUnsupported, what) {}
};

class SingularError : public Error {
 public:
  explicit SingularError(const std::string& what)
      : Error(ErrorCode::kSingular, what) {}
};

class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& what)
      : Error(ErrorCode::kProtocol, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::kIo, what) {}
};

// Raised when an iterate becomes non-finite or the NE residual blows up.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t iteration, const std::string& what)
      : Error(ErrorCode::kDivergence,
              what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

class NoConvergenceError : public Error {
 public:
  NoConvergenceError(double last_residual, const std::string& what)
      : Error(ErrorCode::kNoConvergence, what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

// Line is 1-based; 0 means the error is not tied to a particular line.
class ConfigError : public Error {
 public:
  ConfigError(int line, const std::string& what)
      : Error(ErrorCode::kConfig, line > 0 ? "line " + std::to_string(line) +
                                                 ": " + what
                                           : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace dgt

#endif  // DGT_ERROR_HPP_
