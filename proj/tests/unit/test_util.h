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

// Test-only generators and exhaustive reference searches. Nothing here calls
// into the beam engines.

#ifndef PARDEC_TESTS_TEST_UTIL_H_
#define PARDEC_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "pardec/ctc.h"
#include "pardec/masking.h"
#include "pardec/rng.h"
#include "pardec/scorer.h"
#include "pardec/vocab.h"

namespace pardec::testing {

inline Vocabulary LetterVocab(int n) {
  std::vector<std::string> toks;
  for (int i = 0; i < n; ++i) toks.push_back(std::string(1, char('a' + i)));
  return BuildVocabulary(toks);
}

// Strictly positive random posterior over blank + user tokens; the mask,
// sos and eos columns stay zero.
inline CtcPosterior RandomPosterior(const Vocabulary& v, int frames, Rng& rng,
                                    const std::string& id = "rand") {
  CtcPosterior p(id, frames, v.size());
  TokenSeq labels{v.blank_id()};
  for (TokenId u : v.UserTokens()) labels.push_back(u);
  for (int t = 0; t < frames; ++t) {
    double sum = 0.0;
    for (TokenId k : labels) {
      p.at(t, k) = 0.05 + rng.Uniform();
      sum += p.at(t, k);
    }
    for (TokenId k : labels) p.at(t, k) /= sum;
  }
  return p;
}

// Log-probability of `next` after `prefix`, one scorer row at a time.
inline double RowLogProb(const Scorer& scorer, const TokenSeq& prefix,
                         TokenId next, const EncoderOutput& x) {
  const std::vector<TokenSeq> batch{prefix};
  return scorer.ScoreBatch(batch, x).row(0)[next];
}

struct ExhaustiveFill {
  TokenSeq fill;
  double score = kLogZero;
  bool found = false;
};

// Enumerates every fill of length 0..max_iteration-1 over the segment's fill
// alphabet (user tokens other than the end token), scores it with the end
// token appended, and keeps the best by (score, shorter, lexicographic).
inline ExhaustiveFill BruteForceSegment(const Segment& seg,
                                        const Scorer& scorer,
                                        const EncoderOutput& x,
                                        int max_iteration) {
  const Vocabulary& v = scorer.vocab();
  TokenSeq alphabet;
  for (TokenId u : v.UserTokens()) {
    if (u != seg.end_token) alphabet.push_back(u);
  }
  TokenSeq base{v.sos_id()};
  base.insert(base.end(), seg.left_context.begin(), seg.left_context.end());

  ExhaustiveFill best;
  std::function<void(TokenSeq&, double)> walk = [&](TokenSeq& fill,
                                                    double score) {
    TokenSeq prefix = base;
    prefix.insert(prefix.end(), fill.begin(), fill.end());
    const double total =
        score + RowLogProb(scorer, prefix, seg.end_token, x);
    const bool better =
        !best.found || total > best.score ||
        (total == best.score &&
         (fill.size() < best.fill.size() ||
          (fill.size() == best.fill.size() && fill < best.fill)));
    if (total != kLogZero && better) {
      best = {fill, total, true};
    }
    if (static_cast<int>(fill.size()) + 1 >= max_iteration) return;
    for (TokenId c : alphabet) {
      const double step = RowLogProb(scorer, prefix, c, x);
      fill.push_back(c);
      walk(fill, score + step);
      fill.pop_back();
    }
  };
  TokenSeq fill;
  walk(fill, 0.0);
  return best;
}

// Best eos-terminated output of length <= max_len under cumulative
// attention score; ties go to the shorter, then lexicographically smaller.
inline std::pair<TokenSeq, double> BruteForceAr(const Scorer& scorer,
                                                const EncoderOutput& x,
                                                int max_len) {
  const Vocabulary& v = scorer.vocab();
  const TokenSeq users = v.UserTokens();
  TokenSeq best_seq;
  double best = kLogZero;
  bool found = false;
  std::function<void(TokenSeq&, double)> walk = [&](TokenSeq& prefix,
                                                    double score) {
    const double total = score + RowLogProb(scorer, prefix, v.eos_id(), x);
    TokenSeq out(prefix.begin() + 1, prefix.end());
    if (!found || total > best ||
        (total == best && (out.size() < best_seq.size() ||
                           (out.size() == best_seq.size() && out < best_seq)))) {
      best = total;
      best_seq = out;
      found = true;
    }
    if (static_cast<int>(out.size()) >= max_len) return;
    for (TokenId c : users) {
      const double step = RowLogProb(scorer, prefix, c, x);
      prefix.push_back(c);
      walk(prefix, score + step);
      prefix.pop_back();
    }
  };
  TokenSeq prefix{v.sos_id()};
  walk(prefix, 0.0);
  return {best_seq, best};
}

// Random corpus of short strings over the vocabulary's user tokens.
inline std::vector<TokenSeq> RandomTokenCorpus(const Vocabulary& v, Rng& rng,
                                               int sentences, int max_len) {
  const TokenSeq users = v.UserTokens();
  std::vector<TokenSeq> out;
  for (int i = 0; i < sentences; ++i) {
    TokenSeq s;
    const int len = rng.UniformInt(1, max_len);
    for (int k = 0; k < len; ++k) {
      s.push_back(users[rng.UniformInt(0, static_cast<int>(users.size()) - 1)]);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace pardec::testing

#endif  // PARDEC_TESTS_TEST_UTIL_H_
