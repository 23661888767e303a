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

#include "pardec/masking.h"

namespace pardec {

int MaskedSequence::NumSlots() const {
  int n = 0;
  for (const auto& item : items) n += std::holds_alternative<MaskSlot>(item);
  return n;
}

TokenSeq MaskedSequence::Reconstruct() const {
  TokenSeq out;
  for (const auto& item : items) {
    if (const auto* f = std::get_if<FixedToken>(&item)) {
      out.push_back(f->id);
    } else {
      const auto& orig = std::get<MaskSlot>(item).original_tokens;
      out.insert(out.end(), orig.begin(), orig.end());
    }
  }
  return out;
}

std::vector<int> MaskedSequence::MaskedIndices() const {
  std::vector<int> out;
  int pos = 0;
  for (const auto& item : items) {
    if (std::holds_alternative<FixedToken>(item)) {
      ++pos;
      continue;
    }
    for (size_t k = 0; k < std::get<MaskSlot>(item).original_tokens.size();
         ++k) {
      out.push_back(pos++);
    }
  }
  return out;
}

std::string MaskedSequence::Render(const Vocabulary& v) const {
  std::string out;
  for (const auto& item : items) {
    if (const auto* f = std::get_if<FixedToken>(&item)) {
      out += v.token(f->id);
    } else {
      out += kMaskSymbol;
    }
  }
  return out;
}

MaskedSequence MaskByConfidence(const GreedyDecodeResult& g, double p_thres,
                                MaskMerge merge) {
  if (!(p_thres >= 0.0 && p_thres <= 1.0)) {
    throw Error("p_thres must lie in [0, 1]");
  }
  if (g.confidences.size() != g.tokens.size()) {
    throw Error("greedy result has mismatched confidences");
  }
  MaskedSequence m;
  bool prev_masked = false;
  for (size_t i = 0; i < g.tokens.size(); ++i) {
    const bool masked = g.confidences[i] < p_thres;
    if (!masked) {
      m.items.emplace_back(FixedToken{g.tokens[i], g.confidences[i]});
    } else if (prev_masked && merge == MaskMerge::kMergeConsecutive) {
      std::get<MaskSlot>(m.items.back()).original_tokens.push_back(
          g.tokens[i]);
    } else {
      m.items.emplace_back(MaskSlot{{g.tokens[i]}});
    }
    prev_masked = masked;
  }
  return m;
}

std::vector<Segment> BuildSegments(const MaskedSequence& m,
                                   const Vocabulary& v) {
  std::vector<Segment> segments;
  TokenSeq context;
  for (size_t i = 0; i < m.items.size(); ++i) {
    if (const auto* f = std::get_if<FixedToken>(&m.items[i])) {
      context.push_back(f->id);
      continue;
    }
    const auto& slot = std::get<MaskSlot>(m.items[i]);
    if (slot.original_tokens.empty()) throw Error("empty mask slot");
    Segment seg;
    seg.index = static_cast<int>(segments.size());
    seg.left_context = context;
    seg.original_tokens = slot.original_tokens;
    if (i + 1 == m.items.size()) {
      seg.is_final = true;
      seg.end_token = v.eos_id();
    } else if (const auto* next = std::get_if<FixedToken>(&m.items[i + 1])) {
      seg.end_token = next->id;
    } else {
      throw Error("adjacent mask slots; merge before building segments");
    }
    segments.push_back(std::move(seg));
    context.insert(context.end(), slot.original_tokens.begin(),
                   slot.original_tokens.end());
  }
  return segments;
}

}  // namespace pardec
