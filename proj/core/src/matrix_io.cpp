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

#include "dforge/matrix_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <sstream>

#include "dforge/error.hpp"

namespace dforge {
namespace {

// Line-oriented reader over a text buffer.
class LineReader {
 public:
  explicit LineReader(std::string_view data) : data_(data) {}

  bool Next(std::string_view& line) {
    while (pos_ < data_.size()) {
      std::size_t nl = data_.find('\n', pos_);
      if (nl == std::string_view::npos) nl = data_.size();
      line = data_.substr(pos_, nl - pos_);
      pos_ = nl + 1;
      ++line_no_;
      if (line.find_first_not_of(" \t\r") != std::string_view::npos) return true;
    }
    return false;
  }

  std::string_view Rest() const {
    return pos_ < data_.size() ? data_.substr(pos_) : std::string_view();
  }
  std::size_t line_no() const { return line_no_; }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

std::vector<double> ParseNumbers(std::string_view line, std::size_t line_no) {
  std::vector<double> out;
  std::string copy(line);
  const char* p = copy.c_str();
  for (;;) {
    while (*p == ' ' || *p == '\t' || *p == '\r') ++p;
    if (*p == '\0') break;
    char* end = nullptr;
    const double v = std::strtod(p, &end);
    if (end == p || !std::isfinite(v)) {
      throw LineError(ErrorCode::kFormatError, line_no, "expected a number");
    }
    out.push_back(v);
    p = end;
  }
  return out;
}

std::vector<std::string> Tokens(std::string_view line) {
  std::istringstream ss{std::string(line)};
  std::vector<std::string> out;
  for (std::string tok; ss >> tok;) out.push_back(tok);
  return out;
}

long ParseCount(const std::string& s, std::size_t line_no) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0' || v < 0) {
    throw LineError(ErrorCode::kFormatError, line_no, "bad count '" + s + "'");
  }
  return v;
}

double ParseReal(const std::string& s, std::size_t line_no) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || !std::isfinite(v)) {
    throw LineError(ErrorCode::kFormatError, line_no, "bad number '" + s + "'");
  }
  return v;
}

void AppendRow(std::string& out, const double* values, Eigen::Index n) {
  char buf[32];
  for (Eigen::Index i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", values[i]);
    if (i > 0) out += ' ';
    out += buf;
  }
  out += '\n';
}

void AppendMatrix(std::string& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const Eigen::RowVectorXd row = m.row(r);
    AppendRow(out, row.data(), row.size());
  }
}

void ExpectSection(LineReader& reader, const char* name) {
  std::string_view line;
  if (!reader.Next(line) || Tokens(line) != std::vector<std::string>{name}) {
    throw LineError(ErrorCode::kFormatError, reader.line_no(),
                    std::string("expected section ") + name);
  }
}

Eigen::MatrixXd ReadMatrix(LineReader& reader, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  std::string_view line;
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!reader.Next(line)) {
      throw LineError(ErrorCode::kFormatError, reader.line_no(), "truncated matrix");
    }
    const auto values = ParseNumbers(line, reader.line_no());
    if (static_cast<Eigen::Index>(values.size()) != cols) {
      throw LineError(ErrorCode::kFormatError, reader.line_no(),
                      "expected " + std::to_string(cols) + " values");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = values[static_cast<std::size_t>(c)];
  }
  return m;
}

bool UniformWindows(const EmbeddingSequence& seq) {
  for (std::size_t t = 0; t < seq.windows.size(); ++t) {
    const double start = static_cast<double>(t) * seq.hop;
    if (std::abs(seq.windows[t].start - start) > kTimeEpsilon ||
        std::abs(seq.windows[t].end - (start + seq.window)) > kTimeEpsilon) {
      return false;
    }
  }
  return true;
}

std::string EmbeddingHeader(const EmbeddingSequence& seq) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), " %ld %ld %.17g %.17g\n",
                static_cast<long>(seq.size()), static_cast<long>(seq.dim()),
                seq.window, seq.hop);
  return "ARK2 " + seq.recording_id + buf;
}

}  // namespace

EmbeddingSequence ParseEmbeddings(std::string_view data) {
  LineReader reader(data);
  std::string_view line;
  if (!reader.Next(line)) throw Error(ErrorCode::kFormatError, "empty embedding file");
  const auto head = Tokens(line);
  if (head.size() != 6 || head[0] != "ARK2") {
    throw LineError(ErrorCode::kFormatError, reader.line_no(),
                    "expected 'ARK2 <rec> <T> <D> <window_s> <hop_s>'");
  }
  EmbeddingSequence seq;
  seq.recording_id = head[1];
  const long t_count = ParseCount(head[2], 1);
  const long d = ParseCount(head[3], 1);
  seq.window = ParseReal(head[4], 1);
  seq.hop = ParseReal(head[5], 1);
  seq.vectors.resize(t_count, d);

  const std::string_view body = reader.Rest();
  bool parsed_text = false;
  try {
    LineReader text(body);
    for (long t = 0; t < t_count; ++t) {
      if (!text.Next(line)) throw Error(ErrorCode::kFormatError, "truncated");
      const auto values = ParseNumbers(line, text.line_no() + 1);
      const double start = static_cast<double>(t) * seq.hop;
      if (static_cast<long>(values.size()) == d) {
        seq.windows.push_back({start, start + seq.window});
        for (long c = 0; c < d; ++c) seq.vectors(t, c) = values[static_cast<std::size_t>(c)];
      } else if (static_cast<long>(values.size()) == d + 2) {
        seq.windows.push_back({values[0], values[1]});
        for (long c = 0; c < d; ++c) seq.vectors(t, c) = values[static_cast<std::size_t>(c + 2)];
      } else {
        throw Error(ErrorCode::kFormatError, "wrong value count");
      }
    }
    if (text.Next(line)) throw Error(ErrorCode::kFormatError, "trailing data");
    parsed_text = true;
  } catch (const Error&) {
    seq.windows.clear();
  }

  if (!parsed_text) {
    const std::size_t need = static_cast<std::size_t>(t_count * d) * sizeof(float);
    if (body.size() != need) {
      throw Error(ErrorCode::kFormatError,
                  "embedding body is neither " + std::to_string(t_count) +
                      " text rows nor " + std::to_string(need) + " float32 bytes");
    }
    for (long t = 0; t < t_count; ++t) {
      const double start = static_cast<double>(t) * seq.hop;
      seq.windows.push_back({start, start + seq.window});
      for (long c = 0; c < d; ++c) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b) {
          bits |= static_cast<std::uint32_t>(
                      static_cast<unsigned char>(body[static_cast<std::size_t>((t * d + c) * 4 + b)]))
                  << (8 * b);
        }
        seq.vectors(t, c) = std::bit_cast<float>(bits);
      }
    }
  }
  seq.Validate();
  return seq;
}

std::string WriteEmbeddingsText(const EmbeddingSequence& seq) {
  std::string out = EmbeddingHeader(seq);
  const bool uniform = UniformWindows(seq);
  for (Eigen::Index t = 0; t < seq.size(); ++t) {
    Eigen::RowVectorXd row = seq.vectors.row(t);
    if (!uniform) {
      Eigen::RowVectorXd ext(row.size() + 2);
      ext << seq.windows[static_cast<std::size_t>(t)].start,
          seq.windows[static_cast<std::size_t>(t)].end, row;
      row = ext;
    }
    AppendRow(out, row.data(), row.size());
  }
  return out;
}

std::string WriteEmbeddingsBinary(const EmbeddingSequence& seq) {
  if (!UniformWindows(seq)) {
    throw Error(ErrorCode::kInvalidArgument,
                "binary embedding files require uniform windows");
  }
  std::string out = EmbeddingHeader(seq);
  for (Eigen::Index t = 0; t < seq.size(); ++t) {
    for (Eigen::Index c = 0; c < seq.dim(); ++c) {
      const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(seq.vectors(t, c)));
      for (int b = 0; b < 4; ++b) out += static_cast<char>((bits >> (8 * b)) & 0xff);
    }
  }
  return out;
}

PldaModel ParsePlda(std::string_view text) {
  LineReader reader(text);
  std::string_view line;
  if (!reader.Next(line)) throw Error(ErrorCode::kFormatError, "empty PLDA file");
  const auto head = Tokens(line);
  if (head.size() != 2 || head[0] != "PLDA") {
    throw LineError(ErrorCode::kFormatError, reader.line_no(), "expected 'PLDA <D>'");
  }
  const long d = ParseCount(head[1], reader.line_no());
  PldaModel model;
  ExpectSection(reader, "MEAN");
  model.mean = ReadMatrix(reader, 1, d).row(0).transpose();
  ExpectSection(reader, "BETWEEN");
  model.between_class = ReadMatrix(reader, d, d);
  ExpectSection(reader, "WITHIN");
  model.within_class = ReadMatrix(reader, d, d);
  try {
    model.Validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kFormatError, e.what());
  }
  return model;
}

std::string WritePlda(const PldaModel& model) {
  std::string out = "PLDA " + std::to_string(model.dim()) + "\nMEAN\n";
  AppendRow(out, model.mean.data(), model.mean.size());
  out += "BETWEEN\n";
  AppendMatrix(out, model.between_class);
  out += "WITHIN\n";
  AppendMatrix(out, model.within_class);
  return out;
}

Preprocessor ParsePreprocessor(std::string_view text) {
  LineReader reader(text);
  std::string_view line;
  if (!reader.Next(line)) throw Error(ErrorCode::kFormatError, "empty transform file");
  const auto head = Tokens(line);
  if (head.size() != 3 || head[0] != "TRANSFORM") {
    throw LineError(ErrorCode::kFormatError, reader.line_no(),
                    "expected 'TRANSFORM <D> <D_out>'");
  }
  const long d = ParseCount(head[1], reader.line_no());
  const long d_out = ParseCount(head[2], reader.line_no());
  Preprocessor pre;
  ExpectSection(reader, "CENTER");
  pre.center = ReadMatrix(reader, 1, d).row(0).transpose();
  ExpectSection(reader, "WHITENER");
  pre.whitener = ReadMatrix(reader, d, d);
  ExpectSection(reader, "LDA");
  pre.lda_projection = ReadMatrix(reader, d_out, d);
  return pre;
}

std::string WritePreprocessor(const Preprocessor& pre) {
  std::string out = "TRANSFORM " + std::to_string(pre.input_dim()) + " " +
                    std::to_string(pre.output_dim()) + "\nCENTER\n";
  AppendRow(out, pre.center.data(), pre.center.size());
  out += "WHITENER\n";
  AppendMatrix(out, pre.whitener);
  out += "LDA\n";
  AppendMatrix(out, pre.lda_projection);
  return out;
}

}  // namespace dforge
