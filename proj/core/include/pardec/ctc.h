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

#ifndef PARDEC_CTC_H_
#define PARDEC_CTC_H_

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pardec/types.h"
#include "pardec/vocab.h"

namespace pardec {

// Probabilities below this are clamped before taking logs.
inline constexpr double kProbFloor = 1e-12;

// T x V matrix of per-frame label posteriors, stored row-major in linear
// probability space.
class CtcPosterior {
 public:
  CtcPosterior() = default;
  CtcPosterior(std::string utterance_id, int num_frames, int vocab_size);
  CtcPosterior(std::string utterance_id,
               const std::vector<std::vector<double>>& rows);

  const std::string& utterance_id() const { return utterance_id_; }
  void set_utterance_id(std::string id) { utterance_id_ = std::move(id); }

  int num_frames() const { return num_frames_; }
  int vocab_size() const { return vocab_size_; }

  double at(int t, TokenId k) const {
    return data_[static_cast<size_t>(t) * vocab_size_ + k];
  }
  double& at(int t, TokenId k) {
    return data_[static_cast<size_t>(t) * vocab_size_ + k];
  }
  std::span<const double> frame(int t) const {
    return {data_.data() + static_cast<size_t>(t) * vocab_size_,
            static_cast<size_t>(vocab_size_)};
  }
  std::span<double> frame(int t) {
    return {data_.data() + static_cast<size_t>(t) * vocab_size_,
            static_cast<size_t>(vocab_size_)};
  }

  // Throws Error unless T >= 1, V == v.size(), every entry is in [0, 1] and
  // every row sums to 1 within 1e-6.
  void Validate(const Vocabulary& v) const;

 private:
  std::string utterance_id_;
  int num_frames_ = 0;
  int vocab_size_ = 0;
  std::vector<double> data_;
};

struct FrameSpan {
  int first = 0;  // inclusive
  int last = 0;   // inclusive
  friend bool operator==(const FrameSpan&, const FrameSpan&) = default;
};

struct GreedyDecodeResult {
  TokenSeq tokens;
  std::vector<double> confidences;
  std::vector<FrameSpan> frame_spans;
};

enum class ConfidenceRule {
  kMaxOverSpan,
  kMeanOverSpan,
};

// Per-frame argmax (ties go to the lowest id), collapse repeats, drop blanks.
GreedyDecodeResult GreedyCtcDecode(
    const CtcPosterior& p, const Vocabulary& v,
    ConfidenceRule rule = ConfidenceRule::kMaxOverSpan);

// Incremental CTC prefix probabilities for one prefix: the log mass of
// alignments over frames [0, t] whose collapse equals the prefix and whose
// last frame is non-blank (`nonblank`) or blank (`blank`).
struct CtcPrefixState {
  TokenSeq prefix;
  std::vector<double> nonblank;
  std::vector<double> blank;
  // log P(collapsed output starts with prefix); 0 for the empty prefix.
  double prefix_score = 0.0;
};

// Forward prefix recursion of hybrid CTC/attention decoding, evaluated in
// log space over a floored copy of the posterior.
class CtcPrefixScorer {
 public:
  CtcPrefixScorer(const CtcPosterior& p, const Vocabulary& v);

  int num_frames() const { return num_frames_; }
  const Vocabulary& vocab() const { return vocab_; }

  CtcPrefixState Initial() const;

  // log P(collapse begins with state.prefix + c). For c == eos this is the
  // log mass of alignments whose collapse equals state.prefix exactly.
  double Score(const CtcPrefixState& state, TokenId c) const;

  // Scores c and returns the state of prefix + c (c must not be eos).
  CtcPrefixState Extend(const CtcPrefixState& state, TokenId c,
                        double* score = nullptr) const;

  CtcPrefixState StateFor(const TokenSeq& prefix) const;

 private:
  void CheckToken(TokenId c, bool allow_eos) const;
  double LogProb(int t, TokenId k) const {
    return log_probs_[static_cast<size_t>(t) * vocab_size_ + k];
  }

  const Vocabulary& vocab_;
  int num_frames_;
  int vocab_size_;
  std::vector<double> log_probs_;
};

// log P(collapse begins with prefix + c) for each candidate c; kLogZero when
// the prefix cannot fit into the available frames. Candidates may include
// eos (exact-match mass) but not blank, mask or sos.
std::vector<double> CtcPrefixScore(const CtcPosterior& p, const Vocabulary& v,
                                   const TokenSeq& prefix,
                                   std::span<const TokenId> candidates);

// Exhaustive reference for CtcPrefixScore over all V^T alignment paths.
// Uses the raw (unfloored) posterior. Throws Error when V^T > 1e6.
std::vector<double> BruteForceCtcPrefix(const CtcPosterior& p,
                                        const Vocabulary& v,
                                        const TokenSeq& prefix,
                                        std::span<const TokenId> candidates);

// Standard CTC collapse of an alignment path.
TokenSeq CollapseAlignment(std::span<const TokenId> path, TokenId blank_id);

double LogAdd(double a, double b);

}  // namespace pardec

#endif  // PARDEC_CTC_H_
