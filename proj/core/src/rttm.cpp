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

#include "dforge/rttm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "dforge/error.hpp"

namespace dforge {
namespace {

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

bool ParseDouble(std::string_view s, double& value) {
  // std::from_chars for double is not available on every toolchain we
  // target, so go through strtod on a bounded copy.
  std::string copy(s);
  char* end = nullptr;
  value = std::strtod(copy.c_str(), &end);
  return end == copy.c_str() + copy.size() && !copy.empty() &&
         std::isfinite(value);
}

template <typename Fn>
void ForEachLine(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    ++line_no;
    fn(line_no, text.substr(pos, nl - pos));
    pos = nl + 1;
  }
}

long long ToMillis(double seconds) { return std::llround(seconds * 1000.0); }

void AppendMillis(std::string& out, long long ms) {
  out += std::to_string(ms / 1000);
  out += '.';
  const long long frac = ms % 1000;
  if (frac < 100) out += '0';
  if (frac < 10) out += '0';
  out += std::to_string(frac);
}

}  // namespace

std::vector<Annotation> ParseRttm(std::string_view text) {
  std::map<std::string, std::vector<Turn>> grouped;
  ForEachLine(text, [&](std::size_t line_no, std::string_view line) {
    auto fields = SplitFields(line);
    if (fields.empty() || fields[0].starts_with(";;")) return;
    if (fields.size() < 10) {
      throw LineError(ErrorCode::kMalformedLine, line_no,
                      "expected at least 10 fields, got " +
                          std::to_string(fields.size()));
    }
    if (fields[0] != "SPEAKER") {
      throw LineError(ErrorCode::kMalformedLine, line_no,
                      "unsupported record type '" + std::string(fields[0]) + "'");
    }
    Turn turn;
    turn.recording_id = std::string(fields[1]);
    turn.speaker = std::string(fields[7]);
    if (!ParseDouble(fields[3], turn.onset) ||
        !ParseDouble(fields[4], turn.duration)) {
      throw LineError(ErrorCode::kMalformedLine, line_no,
                      "non-numeric onset or duration");
    }
    if (turn.onset < 0.0) {
      throw LineError(ErrorCode::kMalformedLine, line_no, "negative onset");
    }
    if (!(turn.duration > 0.0)) {
      throw LineError(ErrorCode::kNonPositiveDuration, line_no,
                      "duration must be positive");
    }
    grouped[turn.recording_id].push_back(std::move(turn));
  });
  std::vector<Annotation> out;
  out.reserve(grouped.size());
  for (auto& [rec, turns] : grouped) out.emplace_back(rec, std::move(turns));
  return out;
}

std::string WriteRttm(const std::vector<Annotation>& annotations) {
  struct Row {
    const std::string* rec;
    long long onset_ms;
    long long offset_ms;
    const std::string* speaker;
  };
  std::vector<Row> rows;
  for (const Annotation& annotation : annotations) {
    for (const Turn& turn : annotation.turns()) {
      const long long on = ToMillis(turn.onset);
      const long long off = ToMillis(turn.offset());
      // Sub-millisecond turns vanish at the output resolution.
      if (off <= on) continue;
      rows.push_back({&annotation.recording_id(), on, off, &turn.speaker});
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (*a.rec != *b.rec) return *a.rec < *b.rec;
    if (a.onset_ms != b.onset_ms) return a.onset_ms < b.onset_ms;
    return *a.speaker < *b.speaker;
  });
  std::string out;
  for (const Row& row : rows) {
    out += "SPEAKER ";
    out += *row.rec;
    out += " 1 ";
    AppendMillis(out, row.onset_ms);
    out += ' ';
    AppendMillis(out, row.offset_ms - row.onset_ms);
    out += " <NA> <NA> ";
    out += *row.speaker;
    out += " <NA> <NA>\n";
  }
  return out;
}

std::string WriteRttm(const Annotation& annotation) {
  return WriteRttm(std::vector<Annotation>{annotation});
}

Uem ParseUem(std::string_view text) {
  std::map<std::string, std::vector<Interval>> grouped;
  ForEachLine(text, [&](std::size_t line_no, std::string_view line) {
    auto fields = SplitFields(line);
    if (fields.empty() || fields[0].starts_with(";;")) return;
    if (fields.size() < 4) {
      throw LineError(ErrorCode::kMalformedLine, line_no,
                      "expected 4 fields in UEM line");
    }
    Interval iv;
    if (!ParseDouble(fields[2], iv.start) || !ParseDouble(fields[3], iv.end)) {
      throw LineError(ErrorCode::kMalformedLine, line_no,
                      "non-numeric UEM bounds");
    }
    if (!(iv.end > iv.start)) {
      throw LineError(ErrorCode::kNonPositiveDuration, line_no,
                      "UEM interval end must exceed start");
    }
    grouped[std::string(fields[0])].push_back(iv);
  });
  Uem uem;
  for (auto& [rec, ivs] : grouped) uem.emplace(rec, Timeline(std::move(ivs)));
  return uem;
}

std::string WriteUem(const Uem& uem) {
  std::string out;
  for (const auto& [rec, timeline] : uem) {
    for (const Interval& iv : timeline.intervals()) {
      out += rec;
      out += " 1 ";
      AppendMillis(out, ToMillis(iv.start));
      out += ' ';
      AppendMillis(out, ToMillis(iv.end));
      out += '\n';
    }
  }
  return out;
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteTextFile(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kFileNotFound, "cannot write '" + path + "'");
  out << text;
}

std::vector<Annotation> ReadRttmFile(const std::string& path) {
  return ParseRttm(ReadTextFile(path));
}

void WriteRttmFile(const std::string& path,
                   const std::vector<Annotation>& annotations) {
  WriteTextFile(path, WriteRttm(annotations));
}

Uem ReadUemFile(const std::string& path) { return ParseUem(ReadTextFile(path)); }

}  // namespace dforge
