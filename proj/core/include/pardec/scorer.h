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

#ifndef PARDEC_SCORER_H_
#define PARDEC_SCORER_H_

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "pardec/ctc.h"
#include "pardec/types.h"
#include "pardec/vocab.h"

namespace pardec {

// What the decoder conditions on for one utterance.
struct EncoderOutput {
  std::string utterance_id;
  const CtcPosterior* posterior = nullptr;  // may be null for toy scorers
};

// Per-row incremental decoder state. Row i of the cache belongs to row i of
// the batch handed to Scorer::ScoreBatch; engines call Reorder after every
// top-k so a surviving row inherits its parent's entry. Scorers must verify
// an entry before trusting it, which keeps scores independent of the cache.
class ScorerCache {
 public:
  struct Entry {
    bool valid = false;
    size_t consumed = 0;   // prefix tokens folded into `state`
    uint64_t digest = 0;   // FnvMix digest of those tokens
    int64_t state = 0;     // scorer-defined
  };

  explicit ScorerCache(bool enabled = true) : enabled_(enabled) {}

  bool enabled() const { return enabled_; }
  uint64_t generation() const { return generation_; }
  size_t size() const { return entries_.size(); }

  void Resize(size_t rows) { entries_.resize(rows); }
  Entry& at(size_t row) { return entries_.at(row); }

  // new[i] = old[parents[i]]; a negative parent invalidates row i.
  void Reorder(std::span<const int> parents);
  void Invalidate(size_t row) { entries_.at(row) = Entry{}; }
  void Clear();

  // Statistics, informational only.
  uint64_t hits = 0;
  uint64_t misses = 0;

 private:
  bool enabled_;
  uint64_t generation_ = 0;
  std::vector<Entry> entries_;
};

// Row-major batch of log-probability rows over the full vocabulary.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;
  ScoreMatrix(size_t rows, size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, kLogZero) {}

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  std::span<const double> row(size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(size_t r) { return {data_.data() + r * cols_, cols_}; }

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<double> data_;
};

// Next-token distribution model. Each output row is a proper distribution
// over user tokens plus eos; blank, mask and sos score kLogZero. Rows are a
// function of (prefix, encoder output) only, so batching never changes them.
class Scorer {
 public:
  explicit Scorer(const Vocabulary& v);
  virtual ~Scorer() = default;

  const Vocabulary& vocab() const { return vocab_; }

  // Prefixes must start with sos and may contain mask ids (masked-LM use).
  // When non-null, `cache` is resized to the batch and used row-aligned.
  ScoreMatrix ScoreBatch(std::span<const TokenSeq> prefixes,
                         const EncoderOutput& x,
                         ScorerCache* cache = nullptr) const;

 protected:
  // `entry` is null when caching is off. `row` arrives filled with kLogZero.
  virtual void ScoreRow(const TokenSeq& prefix, const EncoderOutput& x,
                        ScorerCache::Entry* entry,
                        std::span<double> row) const = 0;

  // Support of every row: user tokens then eos.
  const TokenSeq& support() const { return support_; }

 private:
  Vocabulary vocab_;
  TokenSeq support_;
};

// Deterministic stand-in for a trained attention decoder. On any prefix that
// matches reference·eos (mask ids match anything), the next reference token
// gets `correct_mass`; the rest is spread over the other support tokens with
// seed-keyed pseudo-random weights. Off-reference prefixes get a fully
// pseudo-random distribution.
class OracleScorer : public Scorer {
 public:
  // An entry keyed "" matches any utterance id.
  OracleScorer(const Vocabulary& v, std::map<std::string, TokenSeq> references,
               double correct_mass, uint64_t seed);

  double correct_mass() const { return correct_mass_; }

 protected:
  void ScoreRow(const TokenSeq& prefix, const EncoderOutput& x,
                ScorerCache::Entry* entry,
                std::span<double> row) const override;

 private:
  const TokenSeq& ReferenceFor(const std::string& utterance_id) const;

  std::map<std::string, TokenSeq> references_;
  double correct_mass_;
  uint64_t seed_;
};

// Single-reference oracle that answers for any utterance id.
std::unique_ptr<OracleScorer> MakeOracleScorer(const Vocabulary& v,
                                               const TokenSeq& reference,
                                               double correct_mass,
                                               uint64_t seed);

// Additive (add-alpha) smoothed n-gram model over user tokens plus eos:
//   P(w | h) = (c(h, w) + alpha) / (c(h) + alpha * |support|)
// where h is the last order-1 tokens of the sos-padded prefix. A context that
// never occurred in training backs off by dropping its oldest token; the
// empty context is the unigram distribution.
class NgramScorer : public Scorer {
 public:
  NgramScorer(const Vocabulary& v, const std::vector<TokenSeq>& corpus,
              int order, double alpha);

  int order() const { return order_; }
  double alpha() const { return alpha_; }

  // Linear probability of `next` after `prefix` (prefix starts with sos).
  double Probability(const TokenSeq& prefix, TokenId next) const;

 protected:
  void ScoreRow(const TokenSeq& prefix, const EncoderOutput& x,
                ScorerCache::Entry* entry,
                std::span<double> row) const override;

 private:
  struct ContextStats {
    std::unordered_map<TokenId, int64_t> next_counts;
    int64_t total = 0;
  };
  struct SeqHash {
    size_t operator()(const TokenSeq& s) const;
  };

  const ContextStats& StatsFor(const TokenSeq& prefix) const;

  int order_;
  double alpha_;
  std::unordered_map<TokenSeq, ContextStats, SeqHash> stats_;
};

std::unique_ptr<NgramScorer> MakeNgramScorer(
    const Vocabulary& v, const std::vector<std::string>& corpus, int order,
    double alpha = 0.1);

}  // namespace pardec

#endif  // PARDEC_SCORER_H_
