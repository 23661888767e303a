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

#ifndef PARDEC_SYNTH_H_
#define PARDEC_SYNTH_H_

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pardec/ctc.h"
#include "pardec/rng.h"
#include "pardec/types.h"
#include "pardec/vocab.h"

namespace pardec {

enum class SynthErrorKind {
  kSubstitute,     // argmax flips to a wrong token
  kLowConfidence,  // argmax kept, span maximum pulled down
  kDeleteToken,    // token frames become blank-dominant
};

std::string_view ToString(SynthErrorKind kind);
SynthErrorKind ParseSynthErrorKind(std::string_view name);

// Applies to reference positions [begin, end).
//   kLowConfidence: confidence = 1 - 0.5 * strength, strength in (0, 1].
//   kSubstitute:    wrong-token probability = 0.6 + 0.39 * strength.
//   kDeleteToken:   blank probability = 0.6 + 0.39 * strength.
struct SynthError {
  int begin = 0;
  int end = 0;
  SynthErrorKind kind = SynthErrorKind::kLowConfidence;
  double strength = 0.5;
};

nlohmann::json ToJson(const SynthError& e);
SynthError SynthErrorFromJson(const nlohmann::json& j);

// Clean tokens have confidence in [0.9992, 0.9999].
inline constexpr double kCleanConfidenceLo = 0.9992;
inline constexpr double kCleanConfidenceHi = 0.9999;

// Builds a posterior with `frames_per_token` frames per reference token: the
// token frames followed by one blank separator frame. Outside the error
// ranges GreedyCtcDecode reproduces the reference. Throws Error on
// overlapping or out-of-range errors, frames_per_token < 2, or non-user ids.
CtcPosterior SynthPosterior(const std::string& utterance_id,
                            const TokenSeq& reference, const Vocabulary& v,
                            int frames_per_token,
                            const std::vector<SynthError>& errors, Rng rng);

}  // namespace pardec

#endif  // PARDEC_SYNTH_H_
