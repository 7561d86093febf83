// Copyright 2026 The n3h-dse Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Record-per-line text format shared by network descriptors, the device
// database, architecture configs and exploration configs:
//
//   # comment
//   <tag> key=value key=value ...
//
// Keys are unique within a record. Values contain no whitespace.

#pragma once

#include <charconv>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "n3h/common.hpp"

namespace n3h::text {

struct Record {
  std::string tag;
  std::size_t line = 0;
  std::vector<std::pair<std::string, std::string>> fields;

  std::optional<std::string_view> find(std::string_view key) const {
    for (const auto& [k, v] : fields)
      if (k == key) return std::string_view(v);
    return std::nullopt;
  }

  bool has(std::string_view key) const { return find(key).has_value(); }

  std::string where() const { return "line " + std::to_string(line) + " (" + tag + ")"; }

  std::string_view require(std::string_view key) const {
    auto v = find(key);
    if (!v) throw input_error(where() + ": missing field '" + std::string(key) + "'");
    return *v;
  }

  std::int64_t get_int(std::string_view key) const { return parse_int(key, require(key)); }

  std::int64_t get_int_or(std::string_view key, std::int64_t fallback) const {
    auto v = find(key);
    return v ? parse_int(key, *v) : fallback;
  }

  double get_double(std::string_view key) const { return parse_double(key, require(key)); }

  double get_double_or(std::string_view key, double fallback) const {
    auto v = find(key);
    return v ? parse_double(key, *v) : fallback;
  }

  bool get_bool_or(std::string_view key, bool fallback) const {
    auto v = find(key);
    if (!v) return fallback;
    if (*v == "1" || *v == "true") return true;
    if (*v == "0" || *v == "false") return false;
    throw input_error(where() + ": field '" + std::string(key) + "' is not a boolean: '" + std::string(*v) + "'");
  }

  std::string get_string_or(std::string_view key, std::string fallback) const {
    auto v = find(key);
    return v ? std::string(*v) : std::move(fallback);
  }

 private:
  std::int64_t parse_int(std::string_view key, std::string_view v) const {
    std::int64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
      throw input_error(where() + ": field '" + std::string(key) + "' is not an integer: '" + std::string(v) + "'");
    return out;
  }

  double parse_double(std::string_view key, std::string_view v) const {
    // from_chars for double is not available on every supported libstdc++.
    std::string s(v);
    std::size_t used = 0;
    double out = 0;
    try {
      out = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty())
      throw input_error(where() + ": field '" + std::string(key) + "' is not a number: '" + s + "'");
    return out;
  }
};

inline std::vector<Record> parse(std::string_view text) {
  std::vector<Record> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    std::istringstream in{std::string(line)};
    std::string tok;
    Record rec;
    rec.line = line_no;
    while (in >> tok) {
      if (rec.tag.empty()) {
        if (tok.find('=') != std::string::npos)
          throw input_error("line " + std::to_string(line_no) + ": record must start with a tag, got '" + tok + "'");
        rec.tag = tok;
        continue;
      }
      auto eq = tok.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == tok.size())
        throw input_error("line " + std::to_string(line_no) + ": expected key=value, got '" + tok + "'");
      std::string key = tok.substr(0, eq);
      if (rec.has(key)) throw input_error("line " + std::to_string(line_no) + ": duplicate field '" + key + "'");
      rec.fields.emplace_back(std::move(key), tok.substr(eq + 1));
    }
    if (!rec.tag.empty()) out.push_back(std::move(rec));
    if (eol == text.size()) break;
  }
  return out;
}

/// Shortest decimal form that reads back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

class RecordWriter {
 public:
  explicit RecordWriter(std::string tag) { out_ << tag; }

  RecordWriter& add(std::string_view key, std::int64_t v) {
    out_ << ' ' << key << '=' << v;
    return *this;
  }
  RecordWriter& add(std::string_view key, int v) { return add(key, static_cast<std::int64_t>(v)); }
  RecordWriter& add(std::string_view key, std::size_t v) { return add(key, static_cast<std::int64_t>(v)); }
  RecordWriter& add(std::string_view key, bool v) {
    out_ << ' ' << key << '=' << (v ? 1 : 0);
    return *this;
  }
  RecordWriter& add(std::string_view key, double v) {
    out_ << ' ' << key << '=' << format_double(v);
    return *this;
  }
  RecordWriter& add(std::string_view key, std::string_view v) {
    out_ << ' ' << key << '=' << v;
    return *this;
  }
  RecordWriter& add(std::string_view key, const char* v) { return add(key, std::string_view(v)); }

  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

}  // namespace n3h::text
