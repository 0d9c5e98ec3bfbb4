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

#ifndef DOGOPT_VALUE_HPP_
#define DOGOPT_VALUE_HPP_

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "dogopt/errors.hpp"

namespace dogopt {

class Value;
using ValueList = std::vector<Value>;

/// Dynamically typed cell value. Null appears only as the absent side of an
/// outer join; arithmetic on it raises TypeError.
class Value {
 public:
  using Storage =
      std::variant<std::monostate, bool, int64_t, double, std::string, ValueList>;

  Value() : storage_(std::monostate{}) {}
  Value(bool b) : storage_(b) {}                        // NOLINT
  Value(int64_t i) : storage_(i) {}                     // NOLINT
  Value(int i) : storage_(static_cast<int64_t>(i)) {}   // NOLINT
  Value(double d) : storage_(d) {}                      // NOLINT
  Value(std::string s) : storage_(std::move(s)) {}      // NOLINT
  Value(const char* s) : storage_(std::string(s)) {}    // NOLINT
  Value(ValueList l) : storage_(std::move(l)) {}        // NOLINT

  static Value null() { return Value(); }

  bool is_null() const { return std::holds_alternative<std::monostate>(storage_); }
  bool is_bool() const { return std::holds_alternative<bool>(storage_); }
  bool is_int() const { return std::holds_alternative<int64_t>(storage_); }
  bool is_real() const { return std::holds_alternative<double>(storage_); }
  bool is_number() const { return is_int() || is_real(); }
  bool is_string() const { return std::holds_alternative<std::string>(storage_); }
  bool is_list() const { return std::holds_alternative<ValueList>(storage_); }

  bool as_bool() const;
  int64_t as_int() const;
  double as_real() const;  // promotes int to double
  const std::string& as_string() const;
  const ValueList& as_list() const;

  /// Rank used by the canonical ordering: null < bool < int < real < string < list.
  int type_rank() const { return static_cast<int>(storage_.index()); }
  const char* type_name() const;

  const Storage& storage() const { return storage_; }

  std::string to_string() const;

  friend bool operator==(const Value& a, const Value& b) {
    return a.storage_ == b.storage_;
  }
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }

 private:
  Storage storage_;
};

/// Total order over values: type rank first, then value. This is the fixed
/// canonical ordering used for row sorting and multiset comparison.
int compare_values(const Value& a, const Value& b);

inline bool value_less(const Value& a, const Value& b) {
  return compare_values(a, b) < 0;
}

}  // namespace dogopt

#endif  // DOGOPT_VALUE_HPP_
