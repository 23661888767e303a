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

#include "pardec/scorer.h"

#include <algorithm>
#include <cmath>

#include "pardec/rng.h"

namespace pardec {

namespace {

uint64_t Digest(const TokenSeq& seq, size_t begin, size_t end,
                uint64_t h = kFnvOffset) {
  for (size_t i = begin; i < end; ++i) {
    h = FnvMix(h, static_cast<uint64_t>(static_cast<uint32_t>(seq[i])));
  }
  return h;
}

}  // namespace

void ScorerCache::Reorder(std::span<const int> parents) {
  std::vector<Entry> next(parents.size());
  for (size_t i = 0; i < parents.size(); ++i) {
    if (parents[i] >= 0 && static_cast<size_t>(parents[i]) < entries_.size()) {
      next[i] = entries_[parents[i]];
    }
  }
  entries_ = std::move(next);
  ++generation_;
}

void ScorerCache::Clear() {
  entries_.clear();
  ++generation_;
}

Scorer::Scorer(const Vocabulary& v) : vocab_(v), support_(v.UserTokens()) {
  support_.push_back(v.eos_id());
}

ScoreMatrix Scorer::ScoreBatch(std::span<const TokenSeq> prefixes,
                               const EncoderOutput& x,
                               ScorerCache* cache) const {
  if (prefixes.empty()) throw Error("empty scoring batch");
  const bool use_cache = cache != nullptr && cache->enabled();
  if (use_cache && cache->size() != prefixes.size()) {
    cache->Resize(prefixes.size());
  }
  ScoreMatrix out(prefixes.size(), static_cast<size_t>(vocab_.size()));
  for (size_t r = 0; r < prefixes.size(); ++r) {
    const TokenSeq& prefix = prefixes[r];
    if (prefix.empty() || prefix.front() != vocab_.sos_id()) {
      throw Error("prefix " + std::to_string(r) + " does not start with sos");
    }
    for (size_t i = 1; i < prefix.size(); ++i) {
      if (!vocab_.IsUserToken(prefix[i]) && prefix[i] != vocab_.mask_id()) {
        throw Error("prefix " + std::to_string(r) + " has invalid token " +
                    std::to_string(prefix[i]));
      }
    }
    ScoreRow(prefix, x, use_cache ? &cache->at(r) : nullptr, out.row(r));
  }
  return out;
}

// ---------------------------------------------------------------------------

OracleScorer::OracleScorer(const Vocabulary& v,
                           std::map<std::string, TokenSeq> references,
                           double correct_mass, uint64_t seed)
    : Scorer(v),
      references_(std::move(references)),
      correct_mass_(correct_mass),
      seed_(seed) {
  if (!(correct_mass > 0.5 && correct_mass <= 1.0)) {
    throw Error("oracle correct_mass must lie in (0.5, 1]");
  }
  for (const auto& [id, ref] : references_) {
    for (TokenId t : ref) {
      if (!v.IsUserToken(t)) {
        throw Error("oracle reference '" + id + "' has non-user token " +
                    std::to_string(t));
      }
    }
  }
}

const TokenSeq& OracleScorer::ReferenceFor(const std::string& id) const {
  auto it = references_.find(id);
  if (it == references_.end()) it = references_.find("");
  if (it == references_.end()) throw Error("unknown utterance '" + id + "'");
  return it->second;
}

void OracleScorer::ScoreRow(const TokenSeq& prefix, const EncoderOutput& x,
                            ScorerCache::Entry* entry,
                            std::span<double> row) const {
  const TokenSeq& ref = ReferenceFor(x.utterance_id);
  const TokenId mask = vocab().mask_id();
  const size_t body_len = prefix.size() - 1;

  // matched == number of body tokens consistent with the reference, or -1
  // once the prefix has left it.
  int64_t matched = 0;
  size_t start = 0;
  uint64_t digest = kFnvOffset;
  if (entry != nullptr && entry->valid && entry->consumed <= body_len &&
      Digest(prefix, 1, 1 + entry->consumed) == entry->digest) {
    matched = entry->state;
    start = entry->consumed;
    digest = entry->digest;
  }
  for (size_t i = start; i < body_len && matched >= 0; ++i) {
    const TokenId t = prefix[1 + i];
    if (i < ref.size() && (t == ref[i] || t == mask)) {
      ++matched;
    } else {
      matched = -1;
    }
  }
  digest = Digest(prefix, 1 + start, 1 + body_len, digest);
  if (entry != nullptr) {
    *entry = {true, body_len, digest, matched};
  }

  TokenId next = -1;
  if (matched >= 0) {
    next = static_cast<size_t>(matched) < ref.size() ? ref[matched]
                                                     : vocab().eos_id();
  }

  const uint64_t key =
      SplitMix64(seed_ ^ FnvBytes(x.utterance_id)) ^ SplitMix64(digest);
  double weight_sum = 0.0;
  std::vector<double> weights(support().size(), 0.0);
  for (size_t k = 0; k < support().size(); ++k) {
    if (support()[k] == next) continue;
    weights[k] = 0.5 + HashUniform(key + 0x9e37ULL * (support()[k] + 1));
    weight_sum += weights[k];
  }
  const double rest = next >= 0 ? 1.0 - correct_mass_ : 1.0;
  for (size_t k = 0; k < support().size(); ++k) {
    const TokenId tok = support()[k];
    if (tok == next) {
      row[tok] = std::log(correct_mass_);
    } else {
      const double p = rest * weights[k] / weight_sum;
      row[tok] = p > 0.0 ? std::log(p) : kLogZero;
    }
  }
}

std::unique_ptr<OracleScorer> MakeOracleScorer(const Vocabulary& v,
                                               const TokenSeq& reference,
                                               double correct_mass,
                                               uint64_t seed) {
  return std::make_unique<OracleScorer>(
      v, std::map<std::string, TokenSeq>{{"", reference}}, correct_mass, seed);
}

// ---------------------------------------------------------------------------

size_t NgramScorer::SeqHash::operator()(const TokenSeq& s) const {
  return static_cast<size_t>(Digest(s, 0, s.size()));
}

NgramScorer::NgramScorer(const Vocabulary& v,
                         const std::vector<TokenSeq>& corpus, int order,
                         double alpha)
    : Scorer(v), order_(order), alpha_(alpha) {
  if (order < 1) throw Error("n-gram order must be >= 1");
  if (!(alpha > 0.0)) throw Error("n-gram smoothing alpha must be positive");
  if (corpus.empty()) throw Error("n-gram training corpus is empty");
  for (const auto& sentence : corpus) {
    TokenSeq history(static_cast<size_t>(order - 1), v.sos_id());
    for (size_t j = 0; j <= sentence.size(); ++j) {
      const TokenId next = j < sentence.size() ? sentence[j] : v.eos_id();
      if (j < sentence.size() && !v.IsUserToken(next)) {
        throw Error("n-gram corpus has non-user token " +
                    std::to_string(next));
      }
      for (int k = 0; k < order; ++k) {
        TokenSeq ctx(history.end() - k, history.end());
        ContextStats& st = stats_[ctx];
        ++st.next_counts[next];
        ++st.total;
      }
      history.push_back(next);
    }
  }
}

const NgramScorer::ContextStats& NgramScorer::StatsFor(
    const TokenSeq& prefix) const {
  // Pad so that the sos at prefix[0] is preceded by order-2 further sos ids,
  // matching the training-time history.
  TokenSeq history(static_cast<size_t>(std::max(order_ - 2, 0)),
                   vocab().sos_id());
  history.insert(history.end(), prefix.begin(), prefix.end());
  for (int k = order_ - 1; k > 0; --k) {
    if (static_cast<size_t>(k) > history.size()) continue;
    TokenSeq ctx(history.end() - k, history.end());
    auto it = stats_.find(ctx);
    if (it != stats_.end() && it->second.total > 0) return it->second;
  }
  return stats_.at(TokenSeq{});
}

double NgramScorer::Probability(const TokenSeq& prefix, TokenId next) const {
  const ContextStats& st = StatsFor(prefix);
  auto it = st.next_counts.find(next);
  const double count = it == st.next_counts.end() ? 0.0 : it->second;
  return (count + alpha_) /
         (static_cast<double>(st.total) +
          alpha_ * static_cast<double>(support().size()));
}

void NgramScorer::ScoreRow(const TokenSeq& prefix, const EncoderOutput&,
                           ScorerCache::Entry*, std::span<double> row) const {
  // Contexts are at most order-1 tokens, so there is nothing worth caching.
  const ContextStats& st = StatsFor(prefix);
  const double denom = static_cast<double>(st.total) +
                       alpha_ * static_cast<double>(support().size());
  for (TokenId tok : support()) {
    auto it = st.next_counts.find(tok);
    const double count = it == st.next_counts.end() ? 0.0 : it->second;
    row[tok] = std::log((count + alpha_) / denom);
  }
}

std::unique_ptr<NgramScorer> MakeNgramScorer(
    const Vocabulary& v, const std::vector<std::string>& corpus, int order,
    double alpha) {
  std::vector<TokenSeq> encoded;
  encoded.reserve(corpus.size());
  for (const auto& line : corpus) encoded.push_back(EncodeText(v, line));
  return std::make_unique<NgramScorer>(v, encoded, order, alpha);
}

}  // namespace pardec
