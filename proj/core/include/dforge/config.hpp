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

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace dforge {

// Plain-text configuration:
//
//   version = 1
//   [pipeline]
//   threads = 4
//   [stage.ref]
//   type = synth
//
// '#' and ';' start comment lines. Keys before the first section belong to
// the unnamed top-level section.
struct ConfigEntry {
  std::string value;
  std::size_t line = 0;
};

class ConfigSection {
 public:
  ConfigSection() = default;
  ConfigSection(std::string name, std::size_t line) : name_(std::move(name)), line_(line) {}

  const std::string& name() const { return name_; }
  std::size_t line() const { return line_; }
  const std::map<std::string, ConfigEntry>& entries() const { return entries_; }
  void Set(const std::string& key, ConfigEntry entry);
  bool Has(const std::string& key) const { return entries_.count(key) != 0; }

  // Typed getters throw ConfigError naming the line and field. Getters
  // without a default require the key.
  std::string GetString(const std::string& key) const;
  std::string GetString(const std::string& key, const std::string& fallback) const;
  double GetDouble(const std::string& key, std::optional<double> fallback = std::nullopt,
                   double lo = -1e300, double hi = 1e300) const;
  int GetInt(const std::string& key, std::optional<int> fallback = std::nullopt,
             int lo = -2147483647, int hi = 2147483647) const;
  std::uint64_t GetSeed(const std::string& key, std::uint64_t fallback) const;
  bool GetBool(const std::string& key, bool fallback) const;
  // Comma-separated values; empty items are rejected.
  std::vector<std::string> GetList(const std::string& key) const;
  std::vector<double> GetDoubleList(const std::string& key) const;

  // Throws for the first key no getter has asked for.
  void RejectUnknown() const;
  // ConfigError pointing at the key's line (the header line when absent).
  [[noreturn]] void Fail(const std::string& key, const std::string& message) const;

 private:
  const ConfigEntry& Require(const std::string& key) const;

  std::string name_;
  std::size_t line_ = 0;
  std::map<std::string, ConfigEntry> entries_;
  mutable std::set<std::string> used_;
};

struct Config {
  int version = 0;
  std::vector<ConfigSection> sections;  // in file order, top-level excluded

  const ConfigSection* Find(const std::string& name) const;
};

inline constexpr int kConfigVersion = 1;

// Requires "version = 1" at top level.
Config ParseConfig(std::string_view text);

}  // namespace dforge
