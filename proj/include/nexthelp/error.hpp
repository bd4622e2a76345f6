// Copyright 2026 The nexthelp Authors.
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

#ifndef NEXTHELP_ERROR_HPP_
#define NEXTHELP_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nexthelp {

// Coarse failure categories. They map one-to-one onto the C API status codes.
enum class ErrorKind {
  kInvalidArgument,
  kParse,
  kData,
  kIo,
  kInference,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// A syntax error tied to a line of some text input (1-based, 0 if unknown).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error(ErrorKind::kParse, line == 0 ? message
                                           : "line " + std::to_string(line) +
                                                 ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace nexthelp

#endif  // NEXTHELP_ERROR_HPP_
