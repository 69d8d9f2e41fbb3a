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

#include <string>
#include <string_view>
#include <vector>

#include "dforge/timeline.hpp"

namespace dforge {

// Reads SPEAKER lines ("SPEAKER <rec> <chan> <onset> <dur> <NA> <NA> <spk>
// <NA> <NA>"). Blank lines and ";;" comments are skipped. Annotations come
// back sorted by recording id.
std::vector<Annotation> ParseRttm(std::string_view text);

// Canonical form: millisecond fixed-point times, turns sorted by
// (recording, onset, speaker).
std::string WriteRttm(const std::vector<Annotation>& annotations);
std::string WriteRttm(const Annotation& annotation);

// "<rec> <chan> <start> <end>" per line.
Uem ParseUem(std::string_view text);
std::string WriteUem(const Uem& uem);

std::vector<Annotation> ReadRttmFile(const std::string& path);
void WriteRttmFile(const std::string& path,
                   const std::vector<Annotation>& annotations);
Uem ReadUemFile(const std::string& path);

std::string ReadTextFile(const std::string& path);
void WriteTextFile(const std::string& path, std::string_view text);

}  // namespace dforge
