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

#include "dogopt/value.hpp"

#include <cmath>
#include <sstream>

namespace dogopt {

bool Value::as_bool() const {
  if (!is_bool()) throw TypeError("expected bool, got " + std::string(type_name()));
  return std::get<bool>(storage_);
}

int64_t Value::as_int() const {
  if (!is_int()) throw TypeError("expected int, got " + std::string(type_name()));
  return std::get<int64_t>(storage_);
}

double Value::as_real() const {
  if (is_int()) return static_cast<double>(std::get<int64_t>(storage_));
  if (is_real()) return std::get<double>(storage_);
  throw TypeError("expected number, got " + std::string(type_name()));
}

const std::string& Value::as_string() const {
  if (!is_string()) throw TypeError("expected string, got " + std::string(type_name()));
  return std::get<std::string>(storage_);
}

const ValueList& Value::as_list() const {
  if (!is_list()) throw TypeError("expected list, got " + std::string(type_name()));
  return std::get<ValueList>(storage_);
}

const char* Value::type_name() const {
  switch (storage_.index()) {
    case 0: return "null";
    case 1: return "bool";
    case 2: return "int";
    case 3: return "real";
    case 4: return "string";
    case 5: return "list";
  }
  return "?";
}

std::string Value::to_string() const {
  std::ostringstream os;
  switch (storage_.index()) {
    case 0: os << "null"; break;
    case 1: os << (std::get<bool>(storage_) ? "true" : "false"); break;
    case 2: os << std::get<int64_t>(storage_); break;
    case 3: os << std::get<double>(storage_); break;
    case 4: os << '"' << std::get<std::string>(storage_) << '"'; break;
    case 5: {
      os << '[';
      const auto& items = std::get<ValueList>(storage_);
      for (size_t i = 0; i < items.size(); ++i) {
        if (i) os << ',';
        os << items[i].to_string();
      }
      os << ']';
      break;
    }
  }
  return os.str();
}

int compare_values(const Value& a, const Value& b) {
  if (a.type_rank() != b.type_rank()) return a.type_rank() < b.type_rank() ? -1 : 1;
  switch (a.type_rank()) {
    case 0:
      return 0;
    case 1: {
      bool x = std::get<bool>(a.storage()), y = std::get<bool>(b.storage());
      return x == y ? 0 : (x < y ? -1 : 1);
    }
    case 2: {
      int64_t x = std::get<int64_t>(a.storage()), y = std::get<int64_t>(b.storage());
      return x == y ? 0 : (x < y ? -1 : 1);
    }
    case 3: {
      double x = std::get<double>(a.storage()), y = std::get<double>(b.storage());
      if (x == y) return 0;
      return x < y ? -1 : 1;
    }
    case 4: {
      const auto& x = std::get<std::string>(a.storage());
      const auto& y = std::get<std::string>(b.storage());
      int c = x.compare(y);
      return c == 0 ? 0 : (c < 0 ? -1 : 1);
    }
    case 5: {
      const auto& x = std::get<ValueList>(a.storage());
      const auto& y = std::get<ValueList>(b.storage());
      size_t n = std::min(x.size(), y.size());
      for (size_t i = 0; i < n; ++i) {
        int c = compare_values(x[i], y[i]);
        if (c != 0) return c;
      }
      if (x.size() == y.size()) return 0;
      return x.size() < y.size() ? -1 : 1;
    }
  }
  return 0;
}

}  // namespace dogopt
