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

#include "pardec/ctc.h"

#include <algorithm>
#include <cmath>

namespace pardec {

double LogAdd(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

CtcPosterior::CtcPosterior(std::string utterance_id, int num_frames,
                           int vocab_size)
    : utterance_id_(std::move(utterance_id)),
      num_frames_(num_frames),
      vocab_size_(vocab_size),
      data_(static_cast<size_t>(std::max(num_frames, 0)) *
                static_cast<size_t>(std::max(vocab_size, 0)),
            0.0) {
  if (num_frames < 0 || vocab_size < 0) {
    throw Error("negative posterior dimensions");
  }
}

CtcPosterior::CtcPosterior(std::string utterance_id,
                           const std::vector<std::vector<double>>& rows)
    : CtcPosterior(std::move(utterance_id), static_cast<int>(rows.size()),
                   rows.empty() ? 0 : static_cast<int>(rows[0].size())) {
  for (int t = 0; t < num_frames_; ++t) {
    if (static_cast<int>(rows[t].size()) != vocab_size_) {
      throw Error("ragged posterior: frame " + std::to_string(t) + " has " +
                  std::to_string(rows[t].size()) + " columns, expected " +
                  std::to_string(vocab_size_));
    }
    std::copy(rows[t].begin(), rows[t].end(), frame(t).begin());
  }
}

void CtcPosterior::Validate(const Vocabulary& v) const {
  if (num_frames_ < 1) throw Error("posterior '" + utterance_id_ + "' is empty");
  if (vocab_size_ != v.size()) {
    throw Error("posterior '" + utterance_id_ + "' has " +
                std::to_string(vocab_size_) + " columns but vocabulary has " +
                std::to_string(v.size()) + " tokens");
  }
  for (int t = 0; t < num_frames_; ++t) {
    double sum = 0.0;
    for (double x : frame(t)) {
      if (!(x >= 0.0 && x <= 1.0)) {
        throw Error("posterior '" + utterance_id_ + "' frame " +
                    std::to_string(t) + " has an entry outside [0, 1]");
      }
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      throw Error("posterior '" + utterance_id_ + "' frame " +
                  std::to_string(t) + " sums to " + std::to_string(sum));
    }
  }
}

GreedyDecodeResult GreedyCtcDecode(const CtcPosterior& p, const Vocabulary& v,
                                   ConfidenceRule rule) {
  p.Validate(v);
  const TokenSeq labels = [&] {
    TokenSeq l{v.blank_id()};
    for (TokenId id : v.UserTokens()) l.push_back(id);
    std::sort(l.begin(), l.end());
    return l;
  }();

  GreedyDecodeResult out;
  TokenId prev = v.blank_id();
  double span_max = 0.0;
  double span_sum = 0.0;
  const auto close_span = [&]() {
    if (out.tokens.empty()) return;
    const FrameSpan& s = out.frame_spans.back();
    const int n = s.last - s.first + 1;
    out.confidences.back() =
        rule == ConfidenceRule::kMaxOverSpan ? span_max : span_sum / n;
  };

  for (int t = 0; t < p.num_frames(); ++t) {
    TokenId best = labels[0];
    double best_p = p.at(t, best);
    for (TokenId k : labels) {
      if (p.at(t, k) > best_p) {
        best = k;
        best_p = p.at(t, k);
      }
    }
    if (best != v.blank_id() && best == prev) {
      out.frame_spans.back().last = t;
      span_max = std::max(span_max, best_p);
      span_sum += best_p;
    } else if (best != v.blank_id()) {
      close_span();
      out.tokens.push_back(best);
      out.confidences.push_back(0.0);
      out.frame_spans.push_back({t, t});
      span_max = best_p;
      span_sum = best_p;
    }
    prev = best;
  }
  close_span();
  return out;
}

CtcPrefixScorer::CtcPrefixScorer(const CtcPosterior& p, const Vocabulary& v)
    : vocab_(v), num_frames_(p.num_frames()), vocab_size_(p.vocab_size()) {
  p.Validate(v);
  log_probs_.resize(static_cast<size_t>(num_frames_) * vocab_size_);
  for (int t = 0; t < num_frames_; ++t) {
    for (TokenId k = 0; k < vocab_size_; ++k) {
      log_probs_[static_cast<size_t>(t) * vocab_size_ + k] =
          std::log(std::max(p.at(t, k), kProbFloor));
    }
  }
}

void CtcPrefixScorer::CheckToken(TokenId c, bool allow_eos) const {
  if (vocab_.IsUserToken(c)) return;
  if (allow_eos && c == vocab_.eos_id()) return;
  throw Error("invalid token id " + std::to_string(c) +
              " for CTC prefix scoring");
}

CtcPrefixState CtcPrefixScorer::Initial() const {
  CtcPrefixState s;
  s.nonblank.assign(num_frames_, kLogZero);
  s.blank.assign(num_frames_, kLogZero);
  double acc = 0.0;
  for (int t = 0; t < num_frames_; ++t) {
    acc += LogProb(t, vocab_.blank_id());
    s.blank[t] = acc;
  }
  s.prefix_score = 0.0;
  return s;
}

double CtcPrefixScorer::Score(const CtcPrefixState& state, TokenId c) const {
  CheckToken(c, /*allow_eos=*/true);
  if (c == vocab_.eos_id()) {
    return LogAdd(state.nonblank[num_frames_ - 1],
                  state.blank[num_frames_ - 1]);
  }
  double score = 0.0;
  Extend(state, c, &score);
  return score;
}

CtcPrefixState CtcPrefixScorer::Extend(const CtcPrefixState& state, TokenId c,
                                       double* score) const {
  CheckToken(c, /*allow_eos=*/false);
  const bool empty = state.prefix.empty();
  const bool repeat = !empty && state.prefix.back() == c;

  CtcPrefixState next;
  next.prefix = state.prefix;
  next.prefix.push_back(c);
  next.nonblank.assign(num_frames_, kLogZero);
  next.blank.assign(num_frames_, kLogZero);

  next.nonblank[0] = empty ? LogProb(0, c) : kLogZero;
  double psi = next.nonblank[0];
  for (int t = 1; t < num_frames_; ++t) {
    // Mass of the old prefix that may be followed by a fresh emission of c.
    const double phi =
        repeat ? state.blank[t - 1]
               : LogAdd(state.blank[t - 1], state.nonblank[t - 1]);
    const double emit = LogProb(t, c);
    next.nonblank[t] = LogAdd(next.nonblank[t - 1], phi) + emit;
    next.blank[t] = LogAdd(next.blank[t - 1], next.nonblank[t - 1]) +
                    LogProb(t, vocab_.blank_id());
    psi = LogAdd(psi, phi + emit);
  }
  next.prefix_score = psi;
  if (score != nullptr) *score = psi;
  return next;
}

CtcPrefixState CtcPrefixScorer::StateFor(const TokenSeq& prefix) const {
  CtcPrefixState s = Initial();
  for (TokenId c : prefix) s = Extend(s, c);
  return s;
}

std::vector<double> CtcPrefixScore(const CtcPosterior& p, const Vocabulary& v,
                                   const TokenSeq& prefix,
                                   std::span<const TokenId> candidates) {
  CtcPrefixScorer scorer(p, v);
  const CtcPrefixState state = scorer.StateFor(prefix);
  std::vector<double> out;
  out.reserve(candidates.size());
  for (TokenId c : candidates) out.push_back(scorer.Score(state, c));
  return out;
}

TokenSeq CollapseAlignment(std::span<const TokenId> path, TokenId blank_id) {
  TokenSeq out;
  TokenId prev = blank_id;
  for (TokenId k : path) {
    if (k != blank_id && k != prev) out.push_back(k);
    prev = k;
  }
  return out;
}

std::vector<double> BruteForceCtcPrefix(const CtcPosterior& p,
                                        const Vocabulary& v,
                                        const TokenSeq& prefix,
                                        std::span<const TokenId> candidates) {
  p.Validate(v);
  for (TokenId c : prefix) {
    if (!v.IsUserToken(c)) throw Error("invalid prefix token");
  }
  for (TokenId c : candidates) {
    if (!v.IsUserToken(c) && c != v.eos_id()) {
      throw Error("invalid candidate token");
    }
  }
  // Paths through mask/sos/eos columns collapse to nothing meaningful and
  // are skipped; the recursion never reads those columns either.
  TokenSeq labels{v.blank_id()};
  for (TokenId id : v.UserTokens()) labels.push_back(id);
  const int num_labels = static_cast<int>(labels.size());
  const int num_frames = p.num_frames();
  double paths = 1.0;
  for (int t = 0; t < num_frames; ++t) {
    paths *= num_labels;
    if (paths > 1e6) throw Error("brute-force instance too large");
  }

  std::vector<double> mass(candidates.size(), 0.0);
  std::vector<int> digits(num_frames, 0);
  TokenSeq path(num_frames);
  while (true) {
    double m = 1.0;
    for (int t = 0; t < num_frames; ++t) {
      path[t] = labels[digits[t]];
      m *= p.at(t, path[t]);
    }
    if (m > 0.0) {
      const TokenSeq out = CollapseAlignment(path, v.blank_id());
      const bool has_prefix =
          out.size() >= prefix.size() &&
          std::equal(prefix.begin(), prefix.end(), out.begin());
      if (has_prefix) {
        for (size_t i = 0; i < candidates.size(); ++i) {
          const TokenId c = candidates[i];
          if (c == v.eos_id()) {
            if (out.size() == prefix.size()) mass[i] += m;
          } else if (out.size() > prefix.size() && out[prefix.size()] == c) {
            mass[i] += m;
          }
        }
      }
    }
    int t = num_frames - 1;
    while (t >= 0 && ++digits[t] == num_labels) digits[t--] = 0;
    if (t < 0) break;
  }
  std::vector<double> out(candidates.size());
  for (size_t i = 0; i < mass.size(); ++i) {
    out[i] = mass[i] > 0.0 ? std::log(mass[i]) : kLogZero;
  }
  return out;
}

}  // namespace pardec
