// Copyright (c) 2026 The pardec Authors
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

#ifndef PARDEC_MASKING_H_
#define PARDEC_MASKING_H_

#include <string>
#include <variant>
#include <vector>

#include "pardec/ctc.h"
#include "pardec/types.h"
#include "pardec/vocab.h"

namespace pardec {

struct FixedToken {
  TokenId id = 0;
  double confidence = 1.0;
};

struct MaskSlot {
  TokenSeq original_tokens;  // gCTC tokens hidden behind the slot
};

using MaskedItem = std::variant<FixedToken, MaskSlot>;

struct MaskedSequence {
  std::vector<MaskedItem> items;

  int NumSlots() const;
  // Fixed tokens and slot originals concatenated in order; equals the gCTC
  // token sequence the mask was computed from.
  TokenSeq Reconstruct() const;
  // Indices (into the gCTC sequence) of the masked tokens.
  std::vector<int> MaskedIndices() const;
  // Slots render as "#".
  std::string Render(const Vocabulary& v) const;
};

enum class MaskMerge {
  kMergeConsecutive,  // one slot per run of masked tokens
  kPerToken,          // one slot per masked token (Mask-CTC style)
};

// Token i is masked iff confidences[i] < p_thres.
MaskedSequence MaskByConfidence(
    const GreedyDecodeResult& g, double p_thres,
    MaskMerge merge = MaskMerge::kMergeConsecutive);

struct Segment {
  int index = 0;           // 0-based position among the slots
  TokenSeq left_context;   // all gCTC tokens strictly before the slot
  TokenId end_token = 0;   // first fixed token after the slot, or eos
  TokenSeq original_tokens;
  bool is_final = false;
};

// Requires a merged sequence: two adjacent slots throw Error.
std::vector<Segment> BuildSegments(const MaskedSequence& m,
                                   const Vocabulary& v);

}  // namespace pardec

#endif  // PARDEC_MASKING_H_
