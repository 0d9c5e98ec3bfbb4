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

#include "dogopt/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dogopt/errors.hpp"

namespace dogopt {

using nlohmann::json;

int compare_rows(const Row& a, const Row& b) {
  size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    int c = compare_values(a[i], b[i]);
    if (c != 0) return c;
  }
  if (a.size() == b.size()) return 0;
  return a.size() < b.size() ? -1 : 1;
}

void canonical_sort(Dataset& ds) {
  std::sort(ds.rows.begin(), ds.rows.end(),
            [](const Row& a, const Row& b) { return compare_rows(a, b) < 0; });
}

Dataset project_to_schema(const Dataset& ds, const Schema& schema) {
  std::vector<size_t> indices;
  indices.reserve(schema.size());
  for (const auto& attr : schema) {
    auto it = std::find(ds.schema.begin(), ds.schema.end(), attr);
    if (it == ds.schema.end()) {
      throw SchemaMismatch("input data lacks attribute '" + attr + "'");
    }
    indices.push_back(static_cast<size_t>(it - ds.schema.begin()));
  }
  Dataset out;
  out.schema = schema;
  out.rows.reserve(ds.rows.size());
  for (const auto& row : ds.rows) {
    Row r;
    r.reserve(indices.size());
    for (size_t i : indices) r.push_back(row[i]);
    out.rows.push_back(std::move(r));
  }
  canonical_sort(out);
  return out;
}

json value_to_json(const Value& v) {
  switch (v.type_rank()) {
    case 0: return json(nullptr);
    case 1: return json(std::get<bool>(v.storage()));
    case 2: return json(std::get<int64_t>(v.storage()));
    case 3: return json(std::get<double>(v.storage()));
    case 4: return json(std::get<std::string>(v.storage()));
    case 5: {
      json arr = json::array();
      for (const auto& item : v.as_list()) arr.push_back(value_to_json(item));
      return arr;
    }
  }
  return json(nullptr);
}

Value value_from_json(const json& j) {
  if (j.is_null()) return Value::null();
  if (j.is_boolean()) return Value(j.get<bool>());
  if (j.is_number_integer()) return Value(j.get<int64_t>());
  if (j.is_number_unsigned()) return Value(static_cast<int64_t>(j.get<uint64_t>()));
  if (j.is_number_float()) return Value(j.get<double>());
  if (j.is_string()) return Value(j.get<std::string>());
  if (j.is_array()) {
    ValueList items;
    for (const auto& item : j) items.push_back(value_from_json(item));
    return Value(std::move(items));
  }
  throw TypeError("JSON objects cannot nest inside cell values");
}

json dataset_to_json(const Dataset& ds) {
  json rows = json::array();
  for (const auto& row : ds.rows) {
    json obj = json::object();
    for (size_t i = 0; i < ds.schema.size(); ++i) obj[ds.schema[i]] = value_to_json(row[i]);
    rows.push_back(obj);
  }
  return rows;
}

Dataset dataset_from_json(const json& rows) {
  if (!rows.is_array()) throw ParseError("dataset JSON must be a list of row objects");
  Dataset ds;
  bool first = true;
  for (const auto& obj : rows) {
    if (!obj.is_object()) throw ParseError("dataset rows must be JSON objects");
    if (first) {
      for (auto it = obj.begin(); it != obj.end(); ++it) ds.schema.push_back(it.key());
      std::sort(ds.schema.begin(), ds.schema.end());
      first = false;
    }
    Row row;
    row.reserve(ds.schema.size());
    for (const auto& attr : ds.schema) {
      if (!obj.contains(attr)) {
        throw SchemaMismatch("row is missing attribute '" + attr + "'");
      }
      row.push_back(value_from_json(obj.at(attr)));
    }
    if (obj.size() != ds.schema.size()) {
      throw SchemaMismatch("row carries attributes outside the dataset schema");
    }
    ds.rows.push_back(std::move(row));
  }
  canonical_sort(ds);
  return ds;
}

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

Value parse_csv_cell(const std::string& text) {
  if (text.empty()) return Value::null();
  if (text == "true") return Value(true);
  if (text == "false") return Value(false);
  {
    size_t pos = 0;
    bool neg = text[0] == '-';
    if (neg) pos = 1;
    bool all_digits = pos < text.size();
    for (size_t i = pos; i < text.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
        all_digits = false;
        break;
      }
    }
    if (all_digits) {
      try {
        return Value(static_cast<int64_t>(std::stoll(text)));
      } catch (const std::exception&) {
        return Value(text);  // out of int64 range, keep as string
      }
    }
  }
  try {
    size_t used = 0;
    double d = std::stod(text, &used);
    if (used == text.size()) return Value(d);
  } catch (const std::exception&) {
  }
  return Value(text);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  cells.push_back(cell);
  return cells;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

std::string csv_cell(const Value& v) {
  switch (v.type_rank()) {
    case 0: return "";
    case 1: return std::get<bool>(v.storage()) ? "true" : "false";
    case 2: return std::to_string(std::get<int64_t>(v.storage()));
    case 3: {
      std::ostringstream os;
      os << std::get<double>(v.storage());
      return os.str();
    }
    case 4: return csv_escape(std::get<std::string>(v.storage()));
    default: throw TypeError("lists cannot be stored in CSV cells");
  }
}

}  // namespace

Dataset load_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dataset file '" + path + "'");
  if (ends_with(path, ".csv")) {
    Dataset ds;
    std::string line;
    if (!std::getline(in, line)) throw ParseError("CSV file '" + path + "' has no header");
    for (const auto& name : split_csv_line(line)) {
      if (name.empty()) throw ParseError("CSV header in '" + path + "' has an empty column name");
      ds.schema.push_back(name);
    }
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto cells = split_csv_line(line);
      if (cells.size() != ds.schema.size()) {
        throw SchemaMismatch("CSV row in '" + path + "' has " + std::to_string(cells.size()) +
                             " cells, header has " + std::to_string(ds.schema.size()));
      }
      Row row;
      row.reserve(cells.size());
      for (const auto& c : cells) row.push_back(parse_csv_cell(c));
      ds.rows.push_back(std::move(row));
    }
    canonical_sort(ds);
    return ds;
  }
  if (ends_with(path, ".ndjson") || ends_with(path, ".jsonl") || ends_with(path, ".json")) {
    json rows = json::array();
    std::string line;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        rows.push_back(json::parse(line));
      } catch (const json::exception& e) {
        throw ParseError("bad JSON row in '" + path + "': " + e.what());
      }
    }
    return dataset_from_json(rows);
  }
  throw ParseError("unknown dataset extension on '" + path + "' (expected .csv/.ndjson/.jsonl)");
}

void store_dataset_file(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write dataset file '" + path + "'");
  if (ends_with(path, ".csv")) {
    for (size_t i = 0; i < ds.schema.size(); ++i) {
      if (i) out << ',';
      out << csv_escape(ds.schema[i]);
    }
    out << '\n';
    for (const auto& row : ds.rows) {
      for (size_t i = 0; i < row.size(); ++i) {
        if (i) out << ',';
        out << csv_cell(row[i]);
      }
      out << '\n';
    }
    return;
  }
  for (const auto& row : ds.rows) {
    json obj = json::object();
    for (size_t i = 0; i < ds.schema.size(); ++i) obj[ds.schema[i]] = value_to_json(row[i]);
    out << obj.dump() << '\n';
  }
}

}  // namespace dogopt
