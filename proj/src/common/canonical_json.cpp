// Copyright 2026 The Harness Authors
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

#include "harness/common/canonical_json.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace harness {
namespace {

std::string format_float(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("canonical json: non-finite number");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  std::string out(buf);
  if (out == "-0.000000") out = "0.000000";
  return out;
}

std::string escape_string(const std::string& s) {
  // nlohmann's escaping is already deterministic; reuse it for strings.
  return json(s).dump(-1, ' ', false, json::error_handler_t::replace);
}

void write(const json& v, std::string& out, int indent, int depth) {
  auto newline = [&](int d) {
    if (indent < 0) return;
    out.push_back('\n');
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (v.type()) {
    case json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      // nlohmann::json objects are std::map backed, so iteration is sorted.
      out.push_back('{');
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out.push_back(',');
        first = false;
        newline(depth + 1);
        out += escape_string(it.key());
        out += indent < 0 ? ":" : ": ";
        write(it.value(), out, indent, depth + 1);
      }
      newline(depth);
      out.push_back('}');
      return;
    }
    case json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out.push_back('[');
      bool first = true;
      for (const auto& item : v) {
        if (!first) out.push_back(',');
        first = false;
        newline(depth + 1);
        write(item, out, indent, depth + 1);
      }
      newline(depth);
      out.push_back(']');
      return;
    }
    case json::value_t::number_float:
      out += format_float(v.get<double>());
      return;
    case json::value_t::string:
      out += escape_string(v.get_ref<const std::string&>());
      return;
    default:
      out += v.dump();
      return;
  }
}

}  // namespace

std::string canonical_dump(const json& value) {
  std::string out;
  write(value, out, -1, 0);
  return out;
}

std::string canonical_dump_pretty(const json& value) {
  std::string out;
  write(value, out, 2, 0);
  out.push_back('\n');
  return out;
}

double round6(double value) {
  double r = std::round(value * 1e6) / 1e6;
  return r == 0.0 ? 0.0 : r;
}

}  // namespace harness
