// Copyright 2026 The PANN Authors. All Rights Reserved.
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

#ifndef PANN_ERRORS_H_
#define PANN_ERRORS_H_

#include <stdexcept>
#include <string>

namespace pann {

// Root of every error the library throws on bad input.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value does not fit the representable interval.
class RangeError : public Error {
 public:
  using Error::Error;
};

// A caller broke a documented precondition (width mismatch, negative
// repetition count, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// A power budget admits no configuration.
class InfeasibleBudget : public Error {
 public:
  using Error::Error;
};

// Input that cannot be quantized meaningfully, e.g. an all-zero vector.
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

// Malformed file contents. The message carries the offending field path.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed but semantically inconsistent data.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace pann

#endif  // PANN_ERRORS_H_
