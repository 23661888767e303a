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

#ifndef PARDEC_BEAM_H_
#define PARDEC_BEAM_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pardec/ctc.h"
#include "pardec/masking.h"
#include "pardec/scorer.h"
#include "pardec/types.h"
#include "pardec/vocab.h"

namespace pardec {

enum class DecodeMode { kAr, kGctc, kPar, kNar };

std::string_view ToString(DecodeMode mode);
DecodeMode ParseDecodeMode(std::string_view name);

// Candidate ordering inside top-k: higher score, then lower parent beam
// index, then lower token id. It is the only rule implemented.
enum class TieBreak { kScoreBeamToken };

struct DecodeConfig {
  DecodeMode mode = DecodeMode::kPar;
  int beam_size = 10;
  double p_thres = 0.95;
  int max_iteration = 5;
  double ctc_weight = 0.0;
  int nar_iterations = 10;
  TieBreak tie_break = TieBreak::kScoreBeamToken;
  bool sequential_refine = false;
  bool use_cache = true;
  ConfidenceRule confidence_rule = ConfidenceRule::kMaxOverSpan;

  // AR: B=10, ctc_weight=0.3. PAR: B=10, ctc_weight=0, p_thres=0.95,
  // max_iteration=5. NAR: p_thres=0.95, nar_iterations=10.
  static DecodeConfig Defaults(DecodeMode mode);

  // Throws Error on B < 1, max_iteration < 1, nar_iterations < 1, a weight
  // or threshold outside [0, 1], or a nonzero ctc_weight in PAR mode.
  void Validate() const;
};

struct Hypothesis {
  TokenSeq tokens;  // starts with sos
  double score = 0.0;
  bool ended = false;
  bool is_dummy = false;
  int iteration = 0;  // step at which the last token was appended

  static Hypothesis Dummy();
};

// Live state of one segment-level search: S x B hypotheses in row-major
// order (row = s * B + b), plus the ended lists and end tokens.
struct BeamState {
  int num_segments = 0;
  int beam_size = 0;
  std::vector<Hypothesis> live;
  std::vector<std::vector<Hypothesis>> ended;
  TokenSeq end_tokens;
  int iteration = 0;
  ScorerCache cache;

  Hypothesis& at(int s, int b) { return live[s * beam_size + b]; }
  const Hypothesis& at(int s, int b) const { return live[s * beam_size + b]; }
  bool AllDummy() const;
};

struct SegmentSearchResult {
  std::vector<TokenSeq> fills;   // excludes left context and end token
  std::vector<double> scores;    // includes the end-token step
  std::vector<bool> fallback;    // true when no hypothesis ended
  std::vector<int> end_iterations;  // iteration the chosen fill ended in
  int decoder_calls = 0;
  int64_t scored_rows = 0;
};

// Batched beam search over every masked segment at once. Each iteration is
// a single ScoreBatch call over all S x B rows, dummies included.
SegmentSearchResult SegmentBeamSearch(const std::vector<Segment>& segments,
                                      const EncoderOutput& x,
                                      const Scorer& scorer,
                                      const DecodeConfig& cfg);

struct DecodeReport {
  std::string id;
  DecodeMode mode = DecodeMode::kPar;
  std::string transcript;
  int num_frames = 0;
  int decoder_calls = 0;
  int64_t scored_rows = 0;
  int slots = 0;
  std::vector<int> fill_lengths;
  int fallbacks = 0;
  bool truncated = false;
  int64_t elapsed_ns = 0;

  nlohmann::json ToJson() const;
  static DecodeReport FromJson(const nlohmann::json& j);
};

struct DecodeResult {
  TokenSeq tokens;
  double score = 0.0;
  DecodeReport report;
};

// Left-to-right hybrid CTC/attention beam search from sos to eos. A step's
// candidate score is (1 - w) * attention + w * (ctc(prefix + c) -
// ctc(prefix)). Outputs are capped at T tokens. The search stops once no
// live hypothesis can outscore the best finished one.
DecodeResult ArBeamSearch(const EncoderOutput& x, const CtcPosterior& p,
                          const Scorer& scorer, const DecodeConfig& cfg);

// Greedy CTC, confidence masking, segment search and splicing.
DecodeResult ParDecode(const CtcPosterior& p, const Scorer& scorer,
                       const DecodeConfig& cfg, const Vocabulary& v);

// Mask-predict style fill: exactly one token per masked gCTC token. Each
// round scores every open position given the current left context and
// commits the most confident ceil(N / iterations) of them.
DecodeResult NarMaskFill(const MaskedSequence& m, const EncoderOutput& x,
                         const Scorer& scorer, int iterations);

// Dispatches on cfg.mode.
DecodeResult Decode(const CtcPosterior& p, const Scorer& scorer,
                    const DecodeConfig& cfg, const Vocabulary& v);

}  // namespace pardec

#endif  // PARDEC_BEAM_H_
