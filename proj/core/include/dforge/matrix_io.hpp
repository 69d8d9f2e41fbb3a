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

#include "dforge/plda.hpp"
#include "dforge/preprocess.hpp"
#include "dforge/vbx.hpp"

namespace dforge {

// Embedding files: header "ARK2 <rec> <T> <D> <window_s> <hop_s>" followed
// by either T text lines of D decimals or T*D little-endian float32 values.
// Window t is implied as [t * hop, t * hop + window). A text line may also
// carry D + 2 values, the first two being the window start and end.
EmbeddingSequence ParseEmbeddings(std::string_view data);
std::string WriteEmbeddingsText(const EmbeddingSequence& seq);
std::string WriteEmbeddingsBinary(const EmbeddingSequence& seq);

// "PLDA <D>" then MEAN (1 line), BETWEEN (D lines) and WITHIN (D lines).
PldaModel ParsePlda(std::string_view text);
std::string WritePlda(const PldaModel& model);

// "TRANSFORM <D> <D'>" then CENTER (1 line), WHITENER (D lines) and LDA
// (D' lines).
Preprocessor ParsePreprocessor(std::string_view text);
std::string WritePreprocessor(const Preprocessor& pre);

}  // namespace dforge
