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

#include "pardec/beam.h"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace pardec {

namespace {

struct Candidate {
  double score;
  int beam;
  TokenId token;
};

bool CandidateBefore(const Candidate& a, const Candidate& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.beam != b.beam) return a.beam < b.beam;
  return a.token < b.token;
}

void KeepTop(std::vector<Candidate>& cands, int k) {
  const auto n = std::min<size_t>(cands.size(), static_cast<size_t>(k));
  std::partial_sort(cands.begin(), cands.begin() + n, cands.end(),
                    CandidateBefore);
  cands.resize(n);
}

// Ended-hypothesis order: score, then earlier iteration, then lexicographic.
bool EndedBefore(const Hypothesis& a, const Hypothesis& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.iteration != b.iteration) return a.iteration < b.iteration;
  return a.tokens < b.tokens;
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  int64_t ElapsedNs() const {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

std::string_view ToString(DecodeMode mode) {
  switch (mode) {
    case DecodeMode::kAr:
      return "ar";
    case DecodeMode::kGctc:
      return "gctc";
    case DecodeMode::kPar:
      return "par";
    case DecodeMode::kNar:
      return "nar";
  }
  return "?";
}

DecodeMode ParseDecodeMode(std::string_view name) {
  if (name == "ar") return DecodeMode::kAr;
  if (name == "gctc") return DecodeMode::kGctc;
  if (name == "par") return DecodeMode::kPar;
  if (name == "nar") return DecodeMode::kNar;
  throw Error("unknown decode mode '" + std::string(name) + "'");
}

DecodeConfig DecodeConfig::Defaults(DecodeMode mode) {
  DecodeConfig cfg;
  cfg.mode = mode;
  cfg.beam_size = 10;
  cfg.p_thres = 0.95;
  cfg.max_iteration = 5;
  cfg.nar_iterations = 10;
  cfg.ctc_weight = mode == DecodeMode::kAr ? 0.3 : 0.0;
  return cfg;
}

void DecodeConfig::Validate() const {
  if (beam_size < 1) throw Error("beam_size must be >= 1");
  if (max_iteration < 1) throw Error("max_iteration must be >= 1");
  if (nar_iterations < 1) throw Error("nar_iterations must be >= 1");
  if (!(p_thres >= 0.0 && p_thres <= 1.0)) {
    throw Error("p_thres must lie in [0, 1]");
  }
  if (!(ctc_weight >= 0.0 && ctc_weight <= 1.0)) {
    throw Error("ctc_weight must lie in [0, 1]");
  }
  if (mode == DecodeMode::kPar && ctc_weight != 0.0) {
    throw Error("PAR decoding requires ctc_weight = 0");
  }
}

Hypothesis Hypothesis::Dummy() {
  Hypothesis h;
  h.score = kLogZero;
  h.is_dummy = true;
  return h;
}

bool BeamState::AllDummy() const {
  return std::all_of(live.begin(), live.end(),
                     [](const Hypothesis& h) { return h.is_dummy; });
}

// ---------------------------------------------------------------------------

SegmentSearchResult SegmentBeamSearch(const std::vector<Segment>& segments,
                                      const EncoderOutput& x,
                                      const Scorer& scorer,
                                      const DecodeConfig& cfg) {
  cfg.Validate();
  const Vocabulary& v = scorer.vocab();
  const int num_segments = static_cast<int>(segments.size());
  const int beam = cfg.beam_size;

  SegmentSearchResult result;
  if (num_segments == 0) return result;

  BeamState st;
  st.num_segments = num_segments;
  st.beam_size = beam;
  st.cache = ScorerCache(cfg.use_cache);
  st.live.assign(static_cast<size_t>(num_segments) * beam, Hypothesis::Dummy());
  st.ended.resize(num_segments);
  std::vector<TokenSeq> search_vocab(num_segments);
  const TokenSeq users = v.UserTokens();
  for (int s = 0; s < num_segments; ++s) {
    const Segment& seg = segments[s];
    Hypothesis& head = st.at(s, 0);
    head = Hypothesis{};
    head.tokens.push_back(v.sos_id());
    head.tokens.insert(head.tokens.end(), seg.left_context.begin(),
                       seg.left_context.end());
    st.end_tokens.push_back(seg.end_token);
    search_vocab[s] = users;
    if (!v.IsUserToken(seg.end_token)) {
      if (seg.end_token != v.eos_id()) throw Error("invalid segment end token");
      search_vocab[s].push_back(v.eos_id());
    }
  }

  const TokenSeq pad{v.sos_id()};
  std::vector<TokenSeq> prefixes(st.live.size());
  std::vector<int> parents(st.live.size());
  std::vector<Candidate> cands;
  for (st.iteration = 1; st.iteration <= cfg.max_iteration; ++st.iteration) {
    if (st.AllDummy()) break;
    for (size_t r = 0; r < st.live.size(); ++r) {
      prefixes[r] = st.live[r].is_dummy ? pad : st.live[r].tokens;
    }
    const ScoreMatrix probs = scorer.ScoreBatch(prefixes, x, &st.cache);
    ++result.decoder_calls;
    result.scored_rows += static_cast<int64_t>(prefixes.size());

    std::vector<Hypothesis> next(st.live.size(), Hypothesis::Dummy());
    std::fill(parents.begin(), parents.end(), -1);
    for (int s = 0; s < num_segments; ++s) {
      cands.clear();
      for (int b = 0; b < beam; ++b) {
        const Hypothesis& h = st.at(s, b);
        if (h.is_dummy) continue;
        const auto row = probs.row(static_cast<size_t>(s) * beam + b);
        for (TokenId c : search_vocab[s]) {
          const double sc = h.score + row[c];
          if (sc == kLogZero) continue;
          cands.push_back({sc, b, c});
        }
      }
      KeepTop(cands, beam);
      for (size_t k = 0; k < cands.size(); ++k) {
        const Candidate& c = cands[k];
        const int row = s * beam + static_cast<int>(k);
        Hypothesis h;
        h.tokens = st.at(s, c.beam).tokens;
        h.tokens.push_back(c.token);
        h.score = c.score;
        h.iteration = st.iteration;
        if (c.token == st.end_tokens[s]) {
          h.ended = true;
          st.ended[s].push_back(std::move(h));
        } else {
          next[row] = std::move(h);
          parents[row] = s * beam + c.beam;
        }
      }
    }
    st.live = std::move(next);
    st.cache.Reorder(parents);
  }

  result.fills.resize(num_segments);
  result.scores.assign(num_segments, kLogZero);
  result.fallback.assign(num_segments, false);
  result.end_iterations.assign(num_segments, 0);
  for (int s = 0; s < num_segments; ++s) {
    const auto& ended = st.ended[s];
    if (ended.empty()) {
      result.fills[s] = segments[s].original_tokens;
      result.fallback[s] = true;
      continue;
    }
    const Hypothesis& best =
        *std::min_element(ended.begin(), ended.end(), EndedBefore);
    const size_t from = 1 + segments[s].left_context.size();
    result.fills[s].assign(best.tokens.begin() + from, best.tokens.end() - 1);
    result.scores[s] = best.score;
    result.end_iterations[s] = best.iteration;
  }
  return result;
}

// ---------------------------------------------------------------------------

namespace {

struct ArHyp {
  TokenSeq tokens;  // starts with sos
  double score = 0.0;
  CtcPrefixState ctc;
};

bool FinishedBefore(const Hypothesis& a, const Hypothesis& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.tokens.size() != b.tokens.size()) {
    return a.tokens.size() < b.tokens.size();
  }
  return a.tokens < b.tokens;
}

}  // namespace

DecodeResult ArBeamSearch(const EncoderOutput& x, const CtcPosterior& p,
                          const Scorer& scorer, const DecodeConfig& cfg) {
  cfg.Validate();
  const Stopwatch clock;
  const Vocabulary& v = scorer.vocab();
  const CtcPrefixScorer ctc(p, v);
  const double w = cfg.ctc_weight;
  const bool use_ctc = w > 0.0;
  const size_t max_len = static_cast<size_t>(p.num_frames());

  TokenSeq support = v.UserTokens();
  support.push_back(v.eos_id());

  DecodeResult out;
  DecodeReport& rep = out.report;
  rep.id = x.utterance_id;
  rep.mode = DecodeMode::kAr;
  rep.num_frames = p.num_frames();

  ScorerCache cache(cfg.use_cache);
  std::vector<ArHyp> live(1);
  live[0].tokens = {v.sos_id()};
  if (use_ctc) live[0].ctc = ctc.Initial();
  std::vector<Hypothesis> finished;

  std::vector<TokenSeq> prefixes;
  std::vector<Candidate> cands;
  std::vector<int> parents;
  for (int step = 1; !live.empty(); ++step) {
    prefixes.clear();
    for (const auto& h : live) prefixes.push_back(h.tokens);
    const ScoreMatrix att = scorer.ScoreBatch(prefixes, x, &cache);
    ++rep.decoder_calls;
    rep.scored_rows += static_cast<int64_t>(prefixes.size());

    cands.clear();
    for (size_t i = 0; i < live.size(); ++i) {
      const ArHyp& h = live[i];
      const bool at_cap = h.tokens.size() - 1 >= max_len;
      for (TokenId c : support) {
        if (at_cap && c != v.eos_id()) continue;
        double sc = h.score;
        if (w < 1.0) sc += (1.0 - w) * att.row(i)[c];
        if (use_ctc && sc != kLogZero) {
          sc += w * (ctc.Score(h.ctc, c) - h.ctc.prefix_score);
        }
        if (sc == kLogZero || std::isnan(sc)) continue;
        cands.push_back({sc, static_cast<int>(i), c});
      }
    }
    KeepTop(cands, cfg.beam_size);

    std::vector<ArHyp> next;
    parents.clear();
    for (const Candidate& c : cands) {
      const ArHyp& parent = live[c.beam];
      if (c.token == v.eos_id()) {
        Hypothesis f;
        f.tokens = parent.tokens;
        f.score = c.score;
        f.ended = true;
        f.iteration = step;
        finished.push_back(std::move(f));
        continue;
      }
      ArHyp h;
      h.tokens = parent.tokens;
      h.tokens.push_back(c.token);
      h.score = c.score;
      if (use_ctc) h.ctc = ctc.Extend(parent.ctc, c.token);
      next.push_back(std::move(h));
      parents.push_back(c.beam);
    }
    // Keep the last non-empty frontier for the truncated fallback.
    if (next.empty() && finished.empty()) break;
    live = std::move(next);
    cache.Reorder(parents);

    // Scores never increase along a lineage, so once the best finished
    // hypothesis beats every live one the answer is settled.
    if (!finished.empty() && !live.empty()) {
      const double best_done =
          std::min_element(finished.begin(), finished.end(), FinishedBefore)
              ->score;
      double best_live = kLogZero;
      for (const auto& h : live) best_live = std::max(best_live, h.score);
      if (best_done >= best_live) break;
    }
  }

  if (!finished.empty()) {
    const Hypothesis& best =
        *std::min_element(finished.begin(), finished.end(), FinishedBefore);
    out.tokens.assign(best.tokens.begin() + 1, best.tokens.end());
    out.score = best.score;
  } else {
    rep.truncated = true;
    if (!live.empty()) {
      const auto it = std::max_element(
          live.begin(), live.end(),
          [](const ArHyp& a, const ArHyp& b) { return a.score < b.score; });
      out.tokens.assign(it->tokens.begin() + 1, it->tokens.end());
      out.score = it->score;
    } else {
      out.score = kLogZero;
    }
  }
  rep.transcript = DecodeTokens(v, out.tokens);
  rep.elapsed_ns = clock.ElapsedNs();
  return out;
}

// ---------------------------------------------------------------------------

namespace {

TokenSeq Splice(const MaskedSequence& m, const std::vector<TokenSeq>& fills,
                size_t upto_slot = static_cast<size_t>(-1)) {
  TokenSeq out;
  size_t slot = 0;
  for (const auto& item : m.items) {
    if (const auto* f = std::get_if<FixedToken>(&item)) {
      out.push_back(f->id);
      continue;
    }
    if (slot >= upto_slot) break;
    const TokenSeq& fill = fills[slot++];
    out.insert(out.end(), fill.begin(), fill.end());
  }
  return out;
}

}  // namespace

DecodeResult ParDecode(const CtcPosterior& p, const Scorer& scorer,
                       const DecodeConfig& cfg, const Vocabulary& v) {
  cfg.Validate();
  const Stopwatch clock;
  const EncoderOutput x{p.utterance_id(), &p};
  const GreedyDecodeResult g = GreedyCtcDecode(p, v, cfg.confidence_rule);
  const MaskedSequence m = MaskByConfidence(g, cfg.p_thres);
  const std::vector<Segment> segments = BuildSegments(m, v);

  DecodeResult out;
  DecodeReport& rep = out.report;
  rep.id = p.utterance_id();
  rep.mode = DecodeMode::kPar;
  rep.num_frames = p.num_frames();
  rep.slots = static_cast<int>(segments.size());

  SegmentSearchResult search;
  if (!cfg.sequential_refine) {
    search = SegmentBeamSearch(segments, x, scorer, cfg);
  } else {
    // Re-search each slot alone, conditioning on the corrected fills of the
    // slots before it rather than on their raw gCTC tokens.
    for (size_t s = 0; s < segments.size(); ++s) {
      Segment seg = segments[s];
      seg.index = 0;
      seg.left_context.clear();
      size_t slot = 0;
      for (const auto& item : m.items) {
        if (const auto* f = std::get_if<FixedToken>(&item)) {
          seg.left_context.push_back(f->id);
          continue;
        }
        if (slot == s) break;
        const TokenSeq& fill = search.fills[slot++];
        seg.left_context.insert(seg.left_context.end(), fill.begin(),
                                fill.end());
      }
      const SegmentSearchResult one = SegmentBeamSearch({seg}, x, scorer, cfg);
      search.fills.push_back(one.fills[0]);
      search.scores.push_back(one.scores[0]);
      search.fallback.push_back(one.fallback[0]);
      search.end_iterations.push_back(one.end_iterations[0]);
      search.decoder_calls += one.decoder_calls;
      search.scored_rows += one.scored_rows;
    }
  }

  out.tokens = segments.empty() ? g.tokens : Splice(m, search.fills);
  out.score = 0.0;
  for (size_t s = 0; s < search.fills.size(); ++s) {
    rep.fill_lengths.push_back(static_cast<int>(search.fills[s].size()));
    rep.fallbacks += search.fallback[s] ? 1 : 0;
    if (!search.fallback[s]) out.score += search.scores[s];
  }
  rep.decoder_calls = search.decoder_calls;
  rep.scored_rows = search.scored_rows;
  rep.transcript = DecodeTokens(v, out.tokens);
  rep.elapsed_ns = clock.ElapsedNs();
  return out;
}

DecodeResult NarMaskFill(const MaskedSequence& m, const EncoderOutput& x,
                         const Scorer& scorer, int iterations) {
  if (iterations < 1) throw Error("nar iterations must be >= 1");
  const Stopwatch clock;
  const Vocabulary& v = scorer.vocab();

  TokenSeq seq;
  std::vector<size_t> open;
  for (const auto& item : m.items) {
    if (const auto* f = std::get_if<FixedToken>(&item)) {
      seq.push_back(f->id);
      continue;
    }
    for (size_t k = 0; k < std::get<MaskSlot>(item).original_tokens.size();
         ++k) {
      open.push_back(seq.size());
      seq.push_back(v.mask_id());
    }
  }

  DecodeResult out;
  DecodeReport& rep = out.report;
  rep.id = x.utterance_id;
  rep.mode = DecodeMode::kNar;
  rep.num_frames = x.posterior != nullptr ? x.posterior->num_frames() : 0;
  rep.slots = static_cast<int>(open.size());

  const size_t total = open.size();
  const size_t per_round =
      (total + static_cast<size_t>(iterations) - 1) / iterations;
  const TokenSeq users = v.UserTokens();
  std::vector<TokenSeq> prefixes;
  for (int round = 1; round <= iterations && !open.empty(); ++round) {
    prefixes.clear();
    for (size_t pos : open) {
      TokenSeq prefix{v.sos_id()};
      prefix.insert(prefix.end(), seq.begin(), seq.begin() + pos);
      prefixes.push_back(std::move(prefix));
    }
    const ScoreMatrix probs = scorer.ScoreBatch(prefixes, x);
    ++rep.decoder_calls;
    rep.scored_rows += static_cast<int64_t>(prefixes.size());

    struct Pick {
      double logp;
      size_t pos;
      TokenId token;
    };
    std::vector<Pick> picks;
    for (size_t i = 0; i < open.size(); ++i) {
      const auto row = probs.row(i);
      TokenId best = users.front();
      for (TokenId c : users) {
        if (row[c] > row[best]) best = c;
      }
      picks.push_back({row[best], open[i], best});
    }
    std::sort(picks.begin(), picks.end(), [](const Pick& a, const Pick& b) {
      if (a.logp != b.logp) return a.logp > b.logp;
      return a.pos < b.pos;
    });
    const size_t commit =
        round == iterations ? picks.size() : std::min(per_round, picks.size());
    for (size_t i = 0; i < commit; ++i) seq[picks[i].pos] = picks[i].token;
    open.erase(std::remove_if(open.begin(), open.end(),
                              [&](size_t pos) { return seq[pos] != v.mask_id(); }),
               open.end());
  }
  rep.fill_lengths.assign(total, 1);
  out.tokens = std::move(seq);
  rep.transcript = DecodeTokens(v, out.tokens);
  rep.elapsed_ns = clock.ElapsedNs();
  return out;
}

DecodeResult Decode(const CtcPosterior& p, const Scorer& scorer,
                    const DecodeConfig& cfg, const Vocabulary& v) {
  cfg.Validate();
  switch (cfg.mode) {
    case DecodeMode::kAr:
      return ArBeamSearch({p.utterance_id(), &p}, p, scorer, cfg);
    case DecodeMode::kPar:
      return ParDecode(p, scorer, cfg, v);
    case DecodeMode::kNar: {
      const Stopwatch clock;
      const GreedyDecodeResult g = GreedyCtcDecode(p, v, cfg.confidence_rule);
      const MaskedSequence m =
          MaskByConfidence(g, cfg.p_thres, MaskMerge::kPerToken);
      DecodeResult r =
          NarMaskFill(m, {p.utterance_id(), &p}, scorer, cfg.nar_iterations);
      r.report.num_frames = p.num_frames();
      r.report.elapsed_ns = clock.ElapsedNs();
      return r;
    }
    case DecodeMode::kGctc: {
      const Stopwatch clock;
      DecodeResult r;
      r.tokens = GreedyCtcDecode(p, v, cfg.confidence_rule).tokens;
      r.report.id = p.utterance_id();
      r.report.mode = DecodeMode::kGctc;
      r.report.num_frames = p.num_frames();
      r.report.transcript = DecodeTokens(v, r.tokens);
      r.report.elapsed_ns = clock.ElapsedNs();
      return r;
    }
  }
  throw Error("unhandled decode mode");
}

nlohmann::json DecodeReport::ToJson() const {
  return {{"id", id},
          {"mode", ToString(mode)},
          {"transcript", transcript},
          {"num_frames", num_frames},
          {"decoder_calls", decoder_calls},
          {"scored_rows", scored_rows},
          {"slots", slots},
          {"fill_lengths", fill_lengths},
          {"fallbacks", fallbacks},
          {"truncated", truncated},
          {"elapsed_ns", elapsed_ns}};
}

DecodeReport DecodeReport::FromJson(const nlohmann::json& j) {
  DecodeReport r;
  r.id = j.at("id").get<std::string>();
  r.mode = ParseDecodeMode(j.at("mode").get<std::string>());
  r.transcript = j.at("transcript").get<std::string>();
  r.num_frames = j.value("num_frames", 0);
  r.decoder_calls = j.at("decoder_calls").get<int>();
  r.scored_rows = j.value("scored_rows", int64_t{0});
  r.slots = j.value("slots", 0);
  r.fill_lengths = j.value("fill_lengths", std::vector<int>{});
  r.fallbacks = j.value("fallbacks", 0);
  r.truncated = j.value("truncated", false);
  r.elapsed_ns = j.value("elapsed_ns", int64_t{0});
  return r;
}

}  // namespace pardec
