// Copyright 2026 The soupline Authors
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

#ifndef SOUPLINE_CURVE_HPP
#define SOUPLINE_CURVE_HPP

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "soupline/errors.hpp"

namespace soupline {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kSchemaVersion = "1";

// Shortest text that parses back to the exact same double.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // prefer a shorter form when it round-trips
  for (int prec = 1; prec < 17; ++prec) {
    char probe[40];
    std::snprintf(probe, sizeof(probe), "%.*g", prec, v);
    if (std::strtod(probe, nullptr) == v) return probe;
  }
  return buf;
}

// A sampled curve: rows sorted by x, metadata as flat key=value strings.
// CSV layout: '#'-prefixed key=value comment lines, then an `x,y` header,
// then one row per line. Negative y values are only legal when the meta
// flag allows_negative_y is set (Chernoff-style floors).
struct CurveData {
  std::string x_name = "x";
  std::string y_name = "y";
  std::vector<std::pair<double, double>> rows;
  std::map<std::string, std::string> meta;

  void validate() const {
    double prev_x = -std::numeric_limits<double>::infinity();
    const bool allow_negative = meta.count("allows_negative_y") != 0 &&
                                meta.at("allows_negative_y") == "true";
    for (const auto& [x, y] : rows) {
      if (!std::isfinite(x) || !std::isfinite(y)) {
        throw DomainError("CurveData: all values must be finite");
      }
      if (x < prev_x) throw DomainError("CurveData: rows must be sorted by x");
      if (y < 0.0 && !allow_negative) {
        throw DomainError("CurveData: negative y requires the allows_negative_y flag");
      }
      prev_x = x;
    }
  }

  std::string to_csv() const {
    validate();
    std::ostringstream out;
    out << "# x_name=" << x_name << "\n";
    out << "# y_name=" << y_name << "\n";
    for (const auto& [k, v] : meta) out << "# " << k << "=" << v << "\n";
    out << "x,y\n";
    for (const auto& [x, y] : rows) {
      out << format_double(x) << "," << format_double(y) << "\n";
    }
    return out.str();
  }

  nlohmann::json to_json() const {
    validate();
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["x_name"] = x_name;
    j["y_name"] = y_name;
    j["meta"] = meta;
    auto rows_json = nlohmann::json::array();
    for (const auto& [x, y] : rows) rows_json.push_back({x, y});
    j["rows"] = std::move(rows_json);
    return j;
  }

  static CurveData from_csv(const std::string& text) {
    CurveData c;
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (line[0] == '#') {
        std::string body = line.substr(1);
        if (!body.empty() && body[0] == ' ') body.erase(0, 1);
        const auto eq = body.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = body.substr(0, eq);
        const std::string value = body.substr(eq + 1);
        if (key == "x_name") {
          c.x_name = value;
        } else if (key == "y_name") {
          c.y_name = value;
        } else {
          c.meta[key] = value;
        }
        continue;
      }
      if (!header_seen) {
        if (line != "x,y") throw IoError("CurveData: malformed CSV header: " + line);
        header_seen = true;
        continue;
      }
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw IoError("CurveData: malformed CSV row: " + line);
      c.rows.emplace_back(std::strtod(line.substr(0, comma).c_str(), nullptr),
                          std::strtod(line.substr(comma + 1).c_str(), nullptr));
    }
    if (!header_seen) throw IoError("CurveData: CSV is missing the x,y header");
    return c;
  }

  static CurveData from_json(const nlohmann::json& j) {
    CurveData c;
    c.x_name = j.at("x_name").get<std::string>();
    c.y_name = j.at("y_name").get<std::string>();
    c.meta = j.at("meta").get<std::map<std::string, std::string>>();
    for (const auto& row : j.at("rows")) {
      c.rows.emplace_back(row.at(0).get<double>(), row.at(1).get<double>());
    }
    return c;
  }

  static CurveData from_json_text(const std::string& text) {
    return from_json(nlohmann::json::parse(text));
  }
};

}  // namespace soupline

#endif  // SOUPLINE_CURVE_HPP
