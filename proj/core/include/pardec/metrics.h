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

#ifndef PARDEC_METRICS_H_
#define PARDEC_METRICS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pardec/beam.h"
#include "pardec/types.h"

namespace pardec {

// Seconds of synthetic audio per posterior frame.
inline constexpr double kFrameShiftSeconds = 0.04;

struct ErrorBreakdown {
  int64_t substitutions = 0;
  int64_t insertions = 0;
  int64_t deletions = 0;
  int64_t reference_length = 0;

  int64_t errors() const { return substitutions + insertions + deletions; }
  // Unset when the reference is empty.
  std::optional<double> rate() const;

  ErrorBreakdown& operator+=(const ErrorBreakdown& o);
};

// Unit-cost Levenshtein alignment. When several alignments are minimal the
// backtrace prefers a substitution (or match) over insert+delete.
ErrorBreakdown EditDistance(const TokenSeq& ref, const TokenSeq& hyp);

struct BenchRow {
  std::string mode;
  int utterances = 0;
  double mean_rtf = 0.0;
  double std_rtf = 0.0;
  double mean_decoder_calls = 0.0;
  double error_rate = 0.0;
  std::optional<double> speedup_vs_ar;       // ar_mean_rtf / mean_rtf
  std::optional<double> call_speedup_vs_ar;  // ar_mean_calls / mean_calls
};

// Real-time factor of one report against T * kFrameShiftSeconds of audio.
double RealTimeFactor(const DecodeReport& r);

// Per-mode aggregation in first-seen mode order. `refs` maps utterance id to
// reference text; every report id must be present (Error otherwise).
// Error rates are token-level over the concatenated corpus; RTF std is the
// population standard deviation.
std::vector<BenchRow> AggregateBench(
    const std::vector<DecodeReport>& reports,
    const std::map<std::string, std::string>& refs, const Vocabulary& v);

std::string BenchCsv(const std::vector<BenchRow>& rows);
std::string BenchMarkdown(const std::vector<BenchRow>& rows);

// Deterministic stand-in for wall-clock time: a fixed cost per frame of
// greedy CTC work, per batched decoder call and per scored row.
struct CostModel {
  int64_t ns_per_frame = 2'000;
  int64_t ns_per_call = 500'000;
  int64_t ns_per_row = 20'000;

  int64_t ElapsedNs(const DecodeReport& r) const;
};

}  // namespace pardec

#endif  // PARDEC_METRICS_H_
