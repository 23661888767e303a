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

#include "pardec/synth.h"

#include <algorithm>
#include <numeric>

namespace pardec {

std::string_view ToString(SynthErrorKind kind) {
  switch (kind) {
    case SynthErrorKind::kSubstitute:
      return "substitute";
    case SynthErrorKind::kLowConfidence:
      return "low_confidence";
    case SynthErrorKind::kDeleteToken:
      return "delete_token";
  }
  return "?";
}

SynthErrorKind ParseSynthErrorKind(std::string_view name) {
  if (name == "substitute") return SynthErrorKind::kSubstitute;
  if (name == "low_confidence") return SynthErrorKind::kLowConfidence;
  if (name == "delete_token") return SynthErrorKind::kDeleteToken;
  throw Error("unknown error kind '" + std::string(name) + "'");
}

nlohmann::json ToJson(const SynthError& e) {
  return {{"begin", e.begin},
          {"end", e.end},
          {"kind", ToString(e.kind)},
          {"strength", e.strength}};
}

SynthError SynthErrorFromJson(const nlohmann::json& j) {
  SynthError e;
  e.begin = j.at("begin").get<int>();
  e.end = j.at("end").get<int>();
  e.kind = ParseSynthErrorKind(j.at("kind").get<std::string>());
  e.strength = j.value("strength", 0.5);
  return e;
}

namespace {

// Writes one frame: `main` gets main_p; of the remainder, 70% goes to
// `second` (if any), 20% to blank (if blank is neither), and the rest is
// spread evenly over the remaining user tokens. The row sums to 1 exactly
// up to rounding, with any residue folded into `main`.
void FillFrame(std::span<double> row, const Vocabulary& v,
               const TokenSeq& users, TokenId main, double main_p,
               TokenId second) {
  std::fill(row.begin(), row.end(), 0.0);
  const double rem = 1.0 - main_p;
  double second_share = second >= 0 ? 0.7 * rem : 0.0;
  double blank_share =
      (main != v.blank_id() && second != v.blank_id()) ? 0.2 * rem : 0.0;
  double others = rem - second_share - blank_share;

  int n_others = 0;
  for (TokenId u : users) n_others += (u != main && u != second);
  if (n_others == 0) {
    if (second >= 0) {
      second_share += others;
    } else if (main != v.blank_id()) {
      blank_share += others;
    }
    others = 0.0;
  }
  if (second >= 0) row[second] = second_share;
  if (main != v.blank_id() && second != v.blank_id()) {
    row[v.blank_id()] = blank_share;
  }
  if (n_others > 0) {
    const double each = others / n_others;
    for (TokenId u : users) {
      if (u != main && u != second) row[u] = each;
    }
  }
  double sum = 0.0;
  for (size_t k = 0; k < row.size(); ++k) {
    if (static_cast<TokenId>(k) != main) sum += row[k];
  }
  row[main] = 1.0 - sum;
}

TokenId PickOther(Rng& rng, const TokenSeq& users, TokenId avoid) {
  if (users.size() < 2) return -1;
  TokenId pick = avoid;
  while (pick == avoid) {
    pick = users[rng.UniformInt(0, static_cast<int>(users.size()) - 1)];
  }
  return pick;
}

}  // namespace

CtcPosterior SynthPosterior(const std::string& utterance_id,
                            const TokenSeq& reference, const Vocabulary& v,
                            int frames_per_token,
                            const std::vector<SynthError>& errors, Rng rng) {
  if (frames_per_token < 2) throw Error("frames_per_token must be >= 2");
  for (TokenId t : reference) {
    if (!v.IsUserToken(t)) throw Error("reference has non-user token");
  }
  const int len = static_cast<int>(reference.size());
  std::vector<const SynthError*> at(static_cast<size_t>(len), nullptr);
  for (const auto& e : errors) {
    if (e.begin < 0 || e.end > len || e.begin >= e.end) {
      throw Error("error range [" + std::to_string(e.begin) + ", " +
                  std::to_string(e.end) + ") outside reference of length " +
                  std::to_string(len));
    }
    if (!(e.strength > 0.0 && e.strength <= 1.0)) {
      throw Error("error strength must lie in (0, 1]");
    }
    for (int i = e.begin; i < e.end; ++i) {
      if (at[i] != nullptr) throw Error("overlapping error ranges");
      at[i] = &e;
    }
  }

  const TokenSeq users = v.UserTokens();
  const int num_frames = std::max(1, len * frames_per_token);
  CtcPosterior post(utterance_id, num_frames, v.size());
  if (len == 0) {
    FillFrame(post.frame(0), v, users, v.blank_id(),
              rng.Uniform(kCleanConfidenceLo, kCleanConfidenceHi), -1);
    return post;
  }

  int t = 0;
  for (int i = 0; i < len; ++i) {
    const TokenId y = reference[i];
    const SynthError* e = at[i];
    const SynthErrorKind kind =
        e != nullptr ? e->kind : SynthErrorKind::kLowConfidence;
    const TokenId wrong = PickOther(rng, users, y);
    for (int f = 0; f + 1 < frames_per_token; ++f, ++t) {
      auto row = post.frame(t);
      const double clean = rng.Uniform(kCleanConfidenceLo, kCleanConfidenceHi);
      if (e == nullptr) {
        FillFrame(row, v, users, y, clean, -1);
      } else if (kind == SynthErrorKind::kLowConfidence) {
        // Every frame of the span sits at or below the target so the span
        // maximum equals it.
        const double target = 1.0 - 0.5 * e->strength;
        const double p = f == 0 ? target : target * rng.Uniform(0.97, 1.0);
        FillFrame(row, v, users, y, p, wrong);
      } else if (kind == SynthErrorKind::kSubstitute) {
        if (wrong < 0) throw Error("substitution needs >= 2 user tokens");
        FillFrame(row, v, users, wrong, 0.6 + 0.39 * e->strength, y);
      } else {
        FillFrame(row, v, users, v.blank_id(), 0.6 + 0.39 * e->strength, y);
      }
    }
    FillFrame(post.frame(t), v, users, v.blank_id(),
              rng.Uniform(kCleanConfidenceLo, kCleanConfidenceHi), -1);
    ++t;
  }
  return post;
}

}  // namespace pardec
