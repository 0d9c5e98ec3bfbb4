// Copyright 2026 the dogopt authors
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

#ifndef DOGOPT_ERRORS_HPP_
#define DOGOPT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace dogopt {

/// Base class for every error raised by the library. The `code()` string is
/// stable and machine-readable; `what()` carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

#define DOGOPT_DEFINE_ERROR(NAME)                            \
  class NAME : public Error {                                \
   public:                                                   \
    explicit NAME(const std::string& message)                \
        : Error(#NAME, message) {}                           \
  }

// Graph construction and validation.
DOGOPT_DEFINE_ERROR(ParseError);
DOGOPT_DEFINE_ERROR(CycleError);
DOGOPT_DEFINE_ERROR(ArityError);
DOGOPT_DEFINE_ERROR(SchemaError);
DOGOPT_DEFINE_ERROR(UnknownAttribute);
DOGOPT_DEFINE_ERROR(Inconsistent);

// Stage derivation and profiles.
DOGOPT_DEFINE_ERROR(OrderViolation);
DOGOPT_DEFINE_ERROR(MissingTarget);
DOGOPT_DEFINE_ERROR(MissingStat);
DOGOPT_DEFINE_ERROR(NegativeValue);
DOGOPT_DEFINE_ERROR(IdMismatch);

// Path enumeration and cache optimization.
DOGOPT_DEFINE_ERROR(PathExplosion);
DOGOPT_DEFINE_ERROR(InfeasibleW);
DOGOPT_DEFINE_ERROR(InfeasibleBudget);
DOGOPT_DEFINE_ERROR(DomainError);
DOGOPT_DEFINE_ERROR(TooLarge);

// Reordering.
DOGOPT_DEFINE_ERROR(NotAdjacent);
DOGOPT_DEFINE_ERROR(Underdetermined);
DOGOPT_DEFINE_ERROR(SingularFit);
DOGOPT_DEFINE_ERROR(MissingModel);

// Pruning.
DOGOPT_DEFINE_ERROR(WouldBreakKey);

// Execution.
DOGOPT_DEFINE_ERROR(TypeError);
DOGOPT_DEFINE_ERROR(KeyError);
DOGOPT_DEFINE_ERROR(SchemaMismatch);

#undef DOGOPT_DEFINE_ERROR

}  // namespace dogopt

#endif  // DOGOPT_ERRORS_HPP_
