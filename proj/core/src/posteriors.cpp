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

#include "dforge/posteriors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>

#include "dforge/error.hpp"

namespace dforge {

void PosteriorMatrix::Validate() const {
  if (!(frame_shift > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "frame_shift must be positive");
  }
  if (static_cast<Eigen::Index>(speaker_ids.size()) != values.rows()) {
    throw Error(ErrorCode::kLengthMismatch, "one speaker id per posterior row required");
  }
  if (values.size() > 0 && (values.minCoeff() < 0.0 || values.maxCoeff() > 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "posteriors must lie in [0, 1]");
  }
}

std::size_t BinaryStream::CountActive() const {
  return static_cast<std::size_t>(std::count(values.begin(), values.end(), 1));
}

namespace {

std::string Header(const PosteriorMatrix& p) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), " %ld %ld %.17g\n", static_cast<long>(p.num_speakers()),
                static_cast<long>(p.num_frames()), p.frame_shift);
  return "POST " + p.recording_id + buf;
}

}  // namespace

PosteriorMatrix ParsePosteriors(std::string_view data, const std::string& speaker_prefix) {
  const std::size_t nl = data.find('\n');
  const std::string header(data.substr(0, nl));
  std::istringstream hs(header);
  std::string tag, rec;
  long s_count = -1, t_count = -1;
  double shift = 0.0;
  if (!(hs >> tag >> rec >> s_count >> t_count >> shift) || tag != "POST" ||
      s_count < 0 || t_count < 0) {
    throw LineError(ErrorCode::kFormatError, 1,
                    "expected 'POST <rec> <S> <T> <frame_shift_s>'");
  }
  PosteriorMatrix out;
  out.recording_id = rec;
  out.frame_shift = shift;
  out.values.resize(s_count, t_count);
  for (long s = 0; s < s_count; ++s) out.speaker_ids.push_back(speaker_prefix + std::to_string(s));
  const std::string body(nl == std::string_view::npos ? std::string_view() : data.substr(nl + 1));

  bool parsed_text = true;
  {
    std::istringstream lines(body);
    std::string line;
    long row = 0;
    while (std::getline(lines, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      if (row >= s_count) {
        parsed_text = false;
        break;
      }
      const char* p = line.c_str();
      long col = 0;
      for (;;) {
        while (*p == ' ' || *p == '\t' || *p == '\r') ++p;
        if (*p == '\0') break;
        char* end = nullptr;
        const double v = std::strtod(p, &end);
        if (end == p || col >= t_count || !std::isfinite(v)) {
          parsed_text = false;
          break;
        }
        out.values(row, col++) = v;
        p = end;
      }
      if (!parsed_text || col != t_count || line.size() != std::strlen(line.c_str())) {
        parsed_text = false;
        break;
      }
      ++row;
    }
    if (row != s_count) parsed_text = false;
  }

  if (!parsed_text) {
    const std::size_t need = static_cast<std::size_t>(s_count * t_count) * sizeof(float);
    if (body.size() != need) {
      throw Error(ErrorCode::kFormatError,
                  "posterior body of '" + rec + "' is neither text nor float32 data");
    }
    for (long s = 0; s < s_count; ++s) {
      for (long t = 0; t < t_count; ++t) {
        std::uint32_t bits = 0;
        const std::size_t off = static_cast<std::size_t>((s * t_count + t) * 4);
        for (int b = 0; b < 4; ++b) {
          bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(body[off + b])) << (8 * b);
        }
        out.values(s, t) = std::bit_cast<float>(bits);
      }
    }
  }
  try {
    out.Validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kFormatError, e.what());
  }
  return out;
}

std::string WritePosteriorsText(const PosteriorMatrix& posteriors) {
  std::string out = Header(posteriors);
  char buf[32];
  for (Eigen::Index s = 0; s < posteriors.num_speakers(); ++s) {
    for (Eigen::Index t = 0; t < posteriors.num_frames(); ++t) {
      std::snprintf(buf, sizeof(buf), "%.17g", posteriors.values(s, t));
      if (t > 0) out += ' ';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::string WritePosteriorsBinary(const PosteriorMatrix& posteriors) {
  std::string out = Header(posteriors);
  for (Eigen::Index s = 0; s < posteriors.num_speakers(); ++s) {
    for (Eigen::Index t = 0; t < posteriors.num_frames(); ++t) {
      const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(posteriors.values(s, t)));
      for (int b = 0; b < 4; ++b) out += static_cast<char>((bits >> (8 * b)) & 0xff);
    }
  }
  return out;
}

}  // namespace dforge
