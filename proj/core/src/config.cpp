// Copyright 2026 The diarize-forge Authors.
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

#include "dforge/config.hpp"

#include <cerrno>
#include <charconv>
#include <cstdlib>

#include "dforge/error.hpp"

namespace dforge {

namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<double> ToDouble(const std::string& s) {
  if (s.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE) return std::nullopt;
  return v;
}

}  // namespace

void ConfigSection::Set(const std::string& key, ConfigEntry entry) {
  auto [it, inserted] = entries_.emplace(key, entry);
  if (!inserted) {
    throw LineError(ErrorCode::kConfigError, entry.line,
                    "field '" + key + "' repeated in [" + name_ + "] (first on line " +
                        std::to_string(it->second.line) + ")");
  }
}

void ConfigSection::Fail(const std::string& key, const std::string& message) const {
  auto it = entries_.find(key);
  const std::size_t line = it == entries_.end() ? line_ : it->second.line;
  throw LineError(ErrorCode::kConfigError, line,
                  "field '" + key + "' in [" + name_ + "]: " + message);
}

const ConfigEntry& ConfigSection::Require(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) Fail(key, "required field is missing");
  used_.insert(key);
  return it->second;
}

std::string ConfigSection::GetString(const std::string& key) const {
  return Require(key).value;
}

std::string ConfigSection::GetString(const std::string& key, const std::string& fallback) const {
  return Has(key) ? GetString(key) : fallback;
}

double ConfigSection::GetDouble(const std::string& key, std::optional<double> fallback,
                                double lo, double hi) const {
  if (!Has(key) && fallback) return *fallback;
  const std::string& text = Require(key).value;
  const auto v = ToDouble(text);
  if (!v) Fail(key, "expected a number, got '" + text + "'");
  if (!(*v >= lo && *v <= hi)) {
    Fail(key, text + " is outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return *v;
}

int ConfigSection::GetInt(const std::string& key, std::optional<int> fallback, int lo,
                          int hi) const {
  if (!Has(key) && fallback) return *fallback;
  const std::string& text = Require(key).value;
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    Fail(key, "expected an integer, got '" + text + "'");
  }
  if (v < lo || v > hi) {
    Fail(key, text + " is outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return v;
}

std::uint64_t ConfigSection::GetSeed(const std::string& key, std::uint64_t fallback) const {
  if (!Has(key)) return fallback;
  const std::string& text = Require(key).value;
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    Fail(key, "expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

bool ConfigSection::GetBool(const std::string& key, bool fallback) const {
  if (!Has(key)) return fallback;
  const std::string& text = Require(key).value;
  if (text == "true" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "no" || text == "0") return false;
  Fail(key, "expected true or false, got '" + text + "'");
}

std::vector<std::string> ConfigSection::GetList(const std::string& key) const {
  const std::string& text = Require(key).value;
  std::vector<std::string> out;
  std::string_view rest = text;
  while (true) {
    const auto comma = rest.find(',');
    const std::string_view item = Trim(rest.substr(0, comma));
    if (item.empty()) Fail(key, "empty item in list '" + text + "'");
    out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

std::vector<double> ConfigSection::GetDoubleList(const std::string& key) const {
  std::vector<double> out;
  for (const std::string& item : GetList(key)) {
    const auto v = ToDouble(item);
    if (!v) Fail(key, "expected a number, got '" + item + "'");
    out.push_back(*v);
  }
  return out;
}

void ConfigSection::RejectUnknown() const {
  for (const auto& [key, entry] : entries_) {
    if (!used_.count(key)) {
      throw LineError(ErrorCode::kConfigError, entry.line,
                      "unknown field '" + key + "' in [" + name_ + "]");
    }
  }
}

const ConfigSection* Config::Find(const std::string& name) const {
  for (const ConfigSection& s : sections) {
    if (s.name() == name) return &s;
  }
  return nullptr;
}

Config ParseConfig(std::string_view text) {
  Config config;
  ConfigSection top("", 0);
  ConfigSection* current = &top;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view raw = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    const std::string_view line = Trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        throw LineError(ErrorCode::kConfigError, line_no, "unterminated section header");
      }
      const std::string name(Trim(line.substr(1, line.size() - 2)));
      if (name.empty()) throw LineError(ErrorCode::kConfigError, line_no, "empty section name");
      if (config.Find(name)) {
        throw LineError(ErrorCode::kConfigError, line_no, "section [" + name + "] repeated");
      }
      config.sections.emplace_back(name, line_no);
      current = &config.sections.back();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw LineError(ErrorCode::kConfigError, line_no, "expected 'key = value'");
    }
    const std::string key(Trim(line.substr(0, eq)));
    if (key.empty()) throw LineError(ErrorCode::kConfigError, line_no, "missing key");
    current->Set(key, {std::string(Trim(line.substr(eq + 1))), line_no});
  }

  if (!top.Has("version")) {
    throw LineError(ErrorCode::kConfigError, 1, "missing top-level 'version = 1'");
  }
  config.version = top.GetInt("version", std::nullopt, kConfigVersion, kConfigVersion);
  top.RejectUnknown();
  return config;
}

}  // namespace dforge
