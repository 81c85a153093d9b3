// Copyright 2026 The mpst Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MPST_ERRORS_H_
#define MPST_ERRORS_H_

#include <stdexcept>
#include <string>

namespace mpst {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, int line, int column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " +
              message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class SelfMessageError : public Error {
 public:
  using Error::Error;
};

class UnguardedRecursionError : public Error {
 public:
  using Error::Error;
};

class DuplicateRoleError : public Error {
 public:
  using Error::Error;
};

class NotSessionTypeError : public Error {
 public:
  using Error::Error;
};

class BudgetExceededError : public Error {
 public:
  using Error::Error;
};

}  // namespace mpst

#endif  // MPST_ERRORS_H_
