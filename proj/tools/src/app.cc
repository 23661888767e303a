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

#include "pardec/app.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "pardec/masking.h"

namespace pardec::app {

namespace fs = std::filesystem;

DecodeConfig RunConfig::Resolve(DecodeMode m) const {
  DecodeConfig cfg = DecodeConfig::Defaults(m);
  if (beam_size) cfg.beam_size = *beam_size;
  if (p_thres) cfg.p_thres = *p_thres;
  if (max_iteration) cfg.max_iteration = *max_iteration;
  if (ctc_weight && m == DecodeMode::kAr) cfg.ctc_weight = *ctc_weight;
  if (nar_iterations) cfg.nar_iterations = *nar_iterations;
  if (sequential_refine) cfg.sequential_refine = *sequential_refine;
  if (use_cache) cfg.use_cache = *use_cache;
  cfg.Validate();
  return cfg;
}

namespace {

void CheckKeys(const nlohmann::json& j, const std::set<std::string>& known,
               const std::string& where) {
  if (!j.is_object()) throw Error(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) {
      throw Error("unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
void Get(const nlohmann::json& j, const char* key, T* out) {
  if (j.contains(key)) *out = j.at(key).get<T>();
}

template <typename T>
void Get(const nlohmann::json& j, const char* key, std::optional<T>* out) {
  if (j.contains(key)) *out = j.at(key).get<T>();
}

ClockKind ParseClock(const std::string& s) {
  if (s == "wall") return ClockKind::kWall;
  if (s == "model") return ClockKind::kModel;
  throw Error("unknown clock '" + s + "' (expected wall or model)");
}

SynthSpec SynthSpecFromJson(const nlohmann::json& j) {
  CheckKeys(j,
            {"count", "min_length", "max_length", "alphabet",
             "frames_per_token", "substitute_rate", "low_confidence_rate",
             "delete_rate", "max_low_confidence_span", "min_strength",
             "max_strength", "utterances", "refs_file"},
            "synth");
  SynthSpec s;
  Get(j, "count", &s.count);
  Get(j, "min_length", &s.min_length);
  Get(j, "max_length", &s.max_length);
  Get(j, "alphabet", &s.alphabet);
  Get(j, "frames_per_token", &s.frames_per_token);
  Get(j, "substitute_rate", &s.substitute_rate);
  Get(j, "low_confidence_rate", &s.low_confidence_rate);
  Get(j, "delete_rate", &s.delete_rate);
  Get(j, "max_low_confidence_span", &s.max_low_confidence_span);
  Get(j, "min_strength", &s.min_strength);
  Get(j, "max_strength", &s.max_strength);
  Get(j, "refs_file", &s.refs_file);
  if (j.contains("utterances")) {
    for (const auto& u : j.at("utterances")) {
      CheckKeys(u, {"id", "ref", "errors"}, "synth utterance");
      SynthUtterance su;
      su.id = u.at("id").get<std::string>();
      su.ref = u.at("ref").get<std::string>();
      if (u.contains("errors")) {
        for (const auto& e : u.at("errors")) {
          su.errors.push_back(SynthErrorFromJson(e));
        }
      }
      s.utterances.push_back(std::move(su));
    }
  }
  return s;
}

void ValidateSynthSpec(const SynthSpec& s) {
  const auto rate_ok = [](double r) { return r >= 0.0 && r <= 1.0; };
  if (!rate_ok(s.substitute_rate) || !rate_ok(s.low_confidence_rate) ||
      !rate_ok(s.delete_rate)) {
    throw Error("synth error rates must lie in [0, 1]");
  }
  if (s.count < 0 || s.min_length < 1 || s.max_length < s.min_length) {
    throw Error("synth needs count >= 0 and 1 <= min_length <= max_length");
  }
  if (s.max_low_confidence_span < 1) {
    throw Error("max_low_confidence_span must be >= 1");
  }
  if (!(s.min_strength > 0.0 && s.min_strength <= s.max_strength &&
        s.max_strength <= 1.0)) {
    throw Error("synth strengths need 0 < min_strength <= max_strength <= 1");
  }
}

}  // namespace

RunConfig RunConfigFromJson(const nlohmann::json& j) {
  CheckKeys(j,
            {"mode", "beam_size", "p_thres", "max_iteration", "ctc_weight",
             "nar_iterations", "sequential_refine", "use_cache", "corpus",
             "out", "seed", "jobs", "clock", "scorer", "modes", "p_thres_grid",
             "max_iteration_grid", "beam_grid", "synth"},
            "config");
  RunConfig rc;
  if (j.contains("mode")) {
    rc.mode = ParseDecodeMode(j.at("mode").get<std::string>());
  }
  Get(j, "beam_size", &rc.beam_size);
  Get(j, "p_thres", &rc.p_thres);
  Get(j, "max_iteration", &rc.max_iteration);
  Get(j, "ctc_weight", &rc.ctc_weight);
  Get(j, "nar_iterations", &rc.nar_iterations);
  Get(j, "sequential_refine", &rc.sequential_refine);
  Get(j, "use_cache", &rc.use_cache);
  Get(j, "corpus", &rc.corpus);
  Get(j, "out", &rc.out);
  Get(j, "seed", &rc.seed);
  Get(j, "jobs", &rc.jobs);
  if (j.contains("clock")) rc.clock = ParseClock(j.at("clock"));
  if (j.contains("scorer")) {
    const auto& s = j.at("scorer");
    CheckKeys(s,
              {"kind", "correct_mass", "ngram_order", "ngram_alpha",
               "ngram_corpus"},
              "scorer");
    Get(s, "kind", &rc.scorer.kind);
    Get(s, "correct_mass", &rc.scorer.correct_mass);
    Get(s, "ngram_order", &rc.scorer.ngram_order);
    Get(s, "ngram_alpha", &rc.scorer.ngram_alpha);
    Get(s, "ngram_corpus", &rc.scorer.ngram_corpus);
  }
  if (j.contains("modes")) {
    for (const auto& m : j.at("modes")) {
      rc.modes.push_back(ParseDecodeMode(m.get<std::string>()));
    }
  }
  Get(j, "p_thres_grid", &rc.p_thres_grid);
  Get(j, "max_iteration_grid", &rc.max_iteration_grid);
  Get(j, "beam_grid", &rc.beam_grid);
  if (j.contains("synth")) rc.synth = SynthSpecFromJson(j.at("synth"));
  return rc;
}

// --- synth ------------------------------------------------------------------

namespace {

std::string RandomReference(const std::vector<std::string>& alphabet, Rng& rng,
                            int min_len, int max_len) {
  const int len = rng.UniformInt(min_len, max_len);
  const int n = static_cast<int>(alphabet.size());
  std::string out;
  int prev = -1;
  for (int i = 0; i < len; ++i) {
    int k = rng.UniformInt(0, n - 1);
    // Adjacent repeats would make a masked token equal its end token.
    if (k == prev && n > 1) k = (k + 1 + rng.UniformInt(0, n - 2)) % n;
    out += alphabet[k];
    prev = k;
  }
  return out;
}

// Places random error regions on `ref`. Regions keep one clean token between
// each other and never mask a token equal to the token after the region.
// Other regions go before a delete region: slot contexts come from the raw
// greedy output, so a length error would shift every later context.
std::vector<SynthError> RandomErrors(const SynthSpec& spec, const TokenSeq& ref,
                                     Rng& rng, SynthSummary* summary) {
  const int len = static_cast<int>(ref.size());
  std::vector<bool> used(static_cast<size_t>(len), false);
  std::vector<SynthError> out;

  int limit = len;
  const auto place = [&](int span) -> int {
    if (span > limit) return -1;
    for (int attempt = 0; attempt < 50; ++attempt) {
      const int b = rng.UniformInt(0, limit - span);
      const int e = b + span;
      bool ok = true;
      for (int i = std::max(0, b - 1); i < std::min(len, e + 1); ++i) {
        ok = ok && !used[i];
      }
      if (e < len) {
        for (int i = b; i < e; ++i) ok = ok && ref[i] != ref[e];
      }
      if (!ok) continue;
      for (int i = b; i < e; ++i) used[i] = true;
      return b;
    }
    return -1;
  };
  const auto strength = [&] {
    return rng.Uniform(spec.min_strength, spec.max_strength);
  };

  if (rng.Bernoulli(spec.delete_rate)) {
    const int b = place(2);
    if (b >= 0) {
      out.push_back({b, b + 1, SynthErrorKind::kLowConfidence, strength()});
      out.push_back({b + 1, b + 2, SynthErrorKind::kDeleteToken, strength()});
      ++summary->delete_regions;
      limit = b;
    }
  }
  if (rng.Bernoulli(spec.low_confidence_rate)) {
    const int b = place(rng.UniformInt(1, spec.max_low_confidence_span));
    if (b >= 0) {
      int e = b;
      while (e < len && used[e]) ++e;
      out.push_back({b, e, SynthErrorKind::kLowConfidence, strength()});
      ++summary->low_confidence_regions;
    }
  }
  if (rng.Bernoulli(spec.substitute_rate)) {
    const int b = place(1);
    if (b >= 0) {
      out.push_back({b, b + 1, SynthErrorKind::kSubstitute, strength()});
      ++summary->substitute_regions;
    }
  }
  std::sort(out.begin(), out.end(),
            [](const SynthError& a, const SynthError& b) {
              return a.begin < b.begin;
            });
  return out;
}

std::string UtteranceName(size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "utt%05zu", i);
  return buf;
}

}  // namespace

Corpus SynthesizeCorpus(const SynthSpec& spec, uint64_t seed,
                        SynthSummary* summary) {
  ValidateSynthSpec(spec);
  SynthSummary local;
  SynthSummary* sum = summary != nullptr ? summary : &local;
  *sum = SynthSummary{};

  const Rng root(seed);
  std::vector<SynthUtterance> plan = spec.utterances;
  bool random_errors = false;
  if (plan.empty()) {
    std::vector<std::string> refs;
    if (!spec.refs_file.empty()) {
      refs = ReadTextLines(spec.refs_file);
    } else {
      const auto alphabet = SplitUtf8(spec.alphabet);
      if (alphabet.empty()) throw Error("synth alphabet is empty");
      Rng text = root.Split("text");
      for (int i = 0; i < spec.count; ++i) {
        refs.push_back(
            RandomReference(alphabet, text, spec.min_length, spec.max_length));
      }
    }
    for (size_t i = 0; i < refs.size(); ++i) {
      plan.push_back({UtteranceName(i), refs[i], {}});
    }
    random_errors = true;
  }

  std::vector<std::string> texts;
  for (const auto& u : plan) texts.push_back(u.ref);
  if (spec.refs_file.empty() && spec.utterances.empty()) {
    texts.push_back(spec.alphabet);
  }
  Corpus c;
  c.vocab = BuildCharVocabulary(texts);

  const Rng errors = root.Split("errors");
  const Rng post = root.Split("posterior");
  std::set<std::string> seen;
  for (size_t i = 0; i < plan.size(); ++i) {
    SynthUtterance& u = plan[i];
    if (!seen.insert(u.id).second) {
      throw Error("duplicate utterance id '" + u.id + "'");
    }
    const TokenSeq ref = EncodeText(c.vocab, u.ref);
    if (random_errors) {
      Rng r = errors.Split(i);
      u.errors = RandomErrors(spec, ref, r, sum);
    } else {
      for (const auto& e : u.errors) {
        sum->low_confidence_regions += e.kind == SynthErrorKind::kLowConfidence;
        sum->substitute_regions += e.kind == SynthErrorKind::kSubstitute;
        sum->delete_regions += e.kind == SynthErrorKind::kDeleteToken;
      }
    }
    c.utterances.push_back(
        {SynthPosterior(u.id, ref, c.vocab, spec.frames_per_token, u.errors,
                        post.Split(i)),
         u.ref});
  }
  const SynthSummary s = Summarize(c);
  sum->utterances = s.utterances;
  sum->tokens = s.tokens;
  sum->masked_fraction = s.masked_fraction;
  return c;
}

SynthSummary Summarize(const Corpus& c, double p_thres) {
  SynthSummary s;
  double frac = 0.0;
  for (const auto& u : c.utterances) {
    const auto g = GreedyCtcDecode(u.posterior, c.vocab);
    const auto m = MaskByConfidence(g, p_thres, MaskMerge::kPerToken);
    if (u.ref) s.tokens += static_cast<int>(SplitUtf8(*u.ref).size());
    if (!g.tokens.empty()) {
      frac += static_cast<double>(m.MaskedIndices().size()) /
              static_cast<double>(g.tokens.size());
    }
    ++s.utterances;
  }
  if (s.utterances > 0) s.masked_fraction = frac / s.utterances;
  return s;
}

// --- decode -----------------------------------------------------------------

std::map<std::string, std::string> References(const Corpus& c) {
  std::map<std::string, std::string> refs;
  for (const auto& u : c.utterances) {
    if (u.ref) refs[u.id()] = *u.ref;
  }
  return refs;
}

std::unique_ptr<Scorer> BuildScorer(const ScorerSpec& spec, const Corpus& c,
                                    uint64_t seed) {
  const auto refs = References(c);
  if (spec.kind == "oracle") {
    if (refs.empty()) throw Error("the oracle scorer needs references");
    std::map<std::string, TokenSeq> tokens;
    for (const auto& [id, text] : refs) tokens[id] = EncodeText(c.vocab, text);
    return std::make_unique<OracleScorer>(c.vocab, std::move(tokens),
                                          spec.correct_mass,
                                          Rng(seed).Split("oracle").NextU64());
  }
  if (spec.kind == "ngram") {
    std::vector<std::string> lines;
    if (!spec.ngram_corpus.empty()) {
      lines = ReadTextLines(spec.ngram_corpus);
    } else {
      for (const auto& [id, text] : refs) lines.push_back(text);
    }
    if (lines.empty()) throw Error("the n-gram scorer has no training text");
    return MakeNgramScorer(c.vocab, lines, spec.ngram_order, spec.ngram_alpha);
  }
  throw Error("unknown scorer '" + spec.kind + "' (expected oracle or ngram)");
}

DecodeRun DecodeCorpus(const Corpus& c, const Scorer& scorer,
                       const DecodeConfig& cfg, int jobs, ClockKind clock) {
  cfg.Validate();
  const size_t n = c.utterances.size();
  DecodeRun run;
  run.reports.resize(n);
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  const auto worker = [&] {
    for (size_t i = next++; i < n; i = next++) {
      try {
        DecodeReport r =
            Decode(c.utterances[i].posterior, scorer, cfg, c.vocab).report;
        if (clock == ClockKind::kModel) r.elapsed_ns = CostModel{}.ElapsedNs(r);
        run.reports[i] = std::move(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  const int threads = std::clamp(jobs, 1, static_cast<int>(std::max<size_t>(n, 1)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  for (const auto& r : run.reports) {
    run.degraded += (r.fallbacks > 0 || r.truncated) ? 1 : 0;
  }
  return run;
}

// --- bench / sweep ----------------------------------------------------------

uint64_t CorpusDigest(const Corpus& c) {
  std::ostringstream os;
  WriteCorpus(os, c);
  return FnvBytes(os.str());
}

BenchResult RunBench(const Corpus& c, const RunConfig& rc) {
  std::vector<DecodeMode> modes;
  for (DecodeMode m : rc.modes) {
    if (std::find(modes.begin(), modes.end(), m) == modes.end()) {
      modes.push_back(m);
    }
  }
  if (modes.size() < 2) throw Error("bench needs at least two distinct modes");

  BenchResult out;
  out.corpus_digest = CorpusDigest(c);
  const auto scorer = BuildScorer(rc.scorer, c, rc.seed);
  std::vector<DecodeReport> all;
  for (DecodeMode m : modes) {
    if (CorpusDigest(c) != out.corpus_digest) {
      throw Error("corpus changed between bench modes");
    }
    DecodeRun run = DecodeCorpus(c, *scorer, rc.Resolve(m), rc.jobs, rc.clock);
    all.insert(all.end(), run.reports.begin(), run.reports.end());
    out.runs.push_back(std::move(run));
  }
  out.rows = AggregateBench(all, References(c), c.vocab);
  return out;
}

std::vector<SweepRow> RunSweep(const Corpus& c, const RunConfig& rc) {
  const DecodeConfig base = rc.Resolve(DecodeMode::kPar);
  const std::vector<double> ps =
      rc.p_thres_grid.empty() ? std::vector<double>{base.p_thres}
                              : rc.p_thres_grid;
  const std::vector<int> iters =
      rc.max_iteration_grid.empty() ? std::vector<int>{base.max_iteration}
                                    : rc.max_iteration_grid;
  const std::vector<int> beams =
      rc.beam_grid.empty() ? std::vector<int>{base.beam_size} : rc.beam_grid;

  const auto scorer = BuildScorer(rc.scorer, c, rc.seed);
  const auto refs = References(c);
  std::vector<SweepRow> rows;
  for (double p : ps) {
    for (int it : iters) {
      for (int b : beams) {
        DecodeConfig cfg = base;
        cfg.p_thres = p;
        cfg.max_iteration = it;
        cfg.beam_size = b;
        const DecodeRun run = DecodeCorpus(c, *scorer, cfg, rc.jobs, rc.clock);
        ErrorBreakdown err;
        double calls = 0.0;
        SweepRow row{p, it, b, 0.0, 0.0, 0};
        for (const auto& r : run.reports) {
          const auto ref = refs.find(r.id);
          if (ref == refs.end()) {
            throw Error("no reference for utterance '" + r.id + "'");
          }
          err += EditDistance(EncodeText(c.vocab, ref->second),
                              EncodeText(c.vocab, r.transcript));
          calls += r.decoder_calls;
          row.fallbacks += r.fallbacks;
        }
        row.error_rate = err.rate().value_or(0.0);
        if (!run.reports.empty()) row.mean_calls = calls / run.reports.size();
        rows.push_back(row);
      }
    }
  }
  return rows;
}

std::string SweepCsv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "p_thres,max_iteration,beam_size,error_rate,mean_calls,fallbacks\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%g,%d,%d,%.6f,%.3f,%d\n", r.p_thres,
                  r.max_iteration, r.beam_size, r.error_rate, r.mean_calls,
                  r.fallbacks);
    os << buf;
  }
  return os.str();
}

// --- entry point ------------------------------------------------------------

namespace {

void WriteFile(const fs::path& path, const std::string& bytes) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write '" + path.string() + "'");
  os << bytes;
  if (!os) throw Error("write failed for '" + path.string() + "'");
}

fs::path OutDir(const RunConfig& rc) {
  if (rc.out.empty()) throw Error("--out is required");
  fs::path dir(rc.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create '" + dir.string() + "': " + ec.message());
  return dir;
}

Corpus LoadCorpus(const RunConfig& rc, int* exit_code) {
  if (rc.corpus.empty()) throw Error("--corpus is required");
  CorpusReadResult r = ReadCorpusFile(rc.corpus);
  for (const auto& w : r.warnings) {
    std::cerr << "warning: " << rc.corpus << ": " << w << "\n";
  }
  if (!r.warnings.empty()) *exit_code = kExitError;
  return std::move(r.corpus);
}

int CmdSynth(const RunConfig& rc) {
  const fs::path dir = OutDir(rc);
  SynthSummary s;
  const Corpus c = SynthesizeCorpus(rc.synth, rc.seed, &s);
  std::ostringstream corpus;
  WriteCorpus(corpus, c);
  WriteFile(dir / "corpus.jsonl", corpus.str());
  std::string refs;
  for (const auto& u : c.utterances) refs += u.id() + "\t" + *u.ref + "\n";
  WriteFile(dir / "refs.txt", refs);
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "utterances=%d tokens=%d low_confidence_regions=%d "
                "substitute_regions=%d delete_regions=%d "
                "masked_fraction@0.95=%.4f\n",
                s.utterances, s.tokens, s.low_confidence_regions,
                s.substitute_regions, s.delete_regions, s.masked_fraction);
  std::cout << buf;
  return kExitOk;
}

int CmdDecode(const RunConfig& rc) {
  int code = kExitOk;
  const Corpus c = LoadCorpus(rc, &code);
  const fs::path dir = OutDir(rc);
  const auto scorer = BuildScorer(rc.scorer, c, rc.seed);
  const DecodeRun run =
      DecodeCorpus(c, *scorer, rc.Resolve(rc.mode), rc.jobs, rc.clock);
  std::string reports;
  std::string text;
  for (const auto& r : run.reports) {
    reports += r.ToJson().dump() + "\n";
    text += r.id + "\t" + r.transcript + "\n";
  }
  WriteFile(dir / "reports.jsonl", reports);
  WriteFile(dir / "transcripts.txt", text);
  std::cout << "decoded=" << run.reports.size() << " mode=" << ToString(rc.mode)
            << " degraded=" << run.degraded << "\n";
  if (code == kExitOk && run.degraded > 0) code = kExitDegraded;
  return code;
}

int CmdBench(const RunConfig& rc) {
  if (rc.modes.size() < 2) throw Error("bench needs at least two modes");
  int code = kExitOk;
  const Corpus c = LoadCorpus(rc, &code);
  const fs::path dir = OutDir(rc);
  const BenchResult b = RunBench(c, rc);
  const std::string md = BenchMarkdown(b.rows);
  WriteFile(dir / "bench.csv", BenchCsv(b.rows));
  WriteFile(dir / "bench.md", md);
  char digest[32];
  std::snprintf(digest, sizeof(digest), "%016llx",
                static_cast<unsigned long long>(b.corpus_digest));
  std::cout << "corpus " << digest << ", " << c.utterances.size()
            << " utterances\n\n"
            << md;
  return code;
}

int CmdSweep(const RunConfig& rc) {
  int code = kExitOk;
  const Corpus c = LoadCorpus(rc, &code);
  const fs::path dir = OutDir(rc);
  const std::string csv = SweepCsv(RunSweep(c, rc));
  WriteFile(dir / "sweep.csv", csv);
  std::cout << csv;
  return code;
}

template <typename T>
std::vector<T> ParseList(const std::string& s) {
  std::vector<T> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::istringstream is(item);
    T v;
    if (!(is >> v) || !is.eof()) throw Error("bad list item '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw Error("empty list '" + s + "'");
  return out;
}

}  // namespace

int Main(int argc, const char* const* argv) {
  CLI::App cli{"Partially autoregressive decoding toolkit", "pardec"};
  cli.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> mode, scorer, corpus, out, clock, ngram_corpus,
      modes, p_grid, it_grid, beam_grid, refs_file;
  std::optional<int> beam, max_iter, nar_iter, jobs, ngram_order, count,
      min_len, max_len;
  std::optional<double> p_thres, ctc_weight, correct_mass, ngram_alpha,
      delete_rate, low_rate, sub_rate;
  std::optional<uint64_t> seed;
  bool sequential_refine = false;
  bool no_cache = false;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config; flags override it");
    sub->add_option("--seed", seed, "Root random seed");
    sub->add_option("--out", out, "Output directory");
  };
  const auto decoding = [&](CLI::App* sub) {
    sub->add_option("--corpus", corpus, "Posterior corpus (JSONL)");
    sub->add_option("--beam-size", beam, "Beam size B");
    sub->add_option("--p-thres", p_thres, "Masking threshold");
    sub->add_option("--max-iteration", max_iter, "Fill steps per mask");
    sub->add_option("--ctc-weight", ctc_weight, "AR CTC weight");
    sub->add_option("--nar-iterations", nar_iter, "NAR refinement rounds");
    sub->add_option("--scorer", scorer, "oracle or ngram");
    sub->add_option("--correct-mass", correct_mass, "Oracle correct mass");
    sub->add_option("--ngram-order", ngram_order, "N-gram order");
    sub->add_option("--ngram-alpha", ngram_alpha, "Add-alpha smoothing");
    sub->add_option("--ngram-corpus", ngram_corpus, "N-gram training text");
    sub->add_flag("--sequential-refine", sequential_refine,
                  "Fill slots left to right with corrected contexts");
    sub->add_flag("--no-cache", no_cache, "Disable the scorer cache");
    sub->add_option("--jobs", jobs, "Utterance-level worker threads");
    sub->add_option("--clock", clock, "wall or model");
  };

  CLI::App* synth = cli.add_subcommand("synth", "Write a synthetic corpus");
  common(synth);
  synth->add_option("--count", count, "Random utterances");
  synth->add_option("--min-length", min_len, "Shortest random reference");
  synth->add_option("--max-length", max_len, "Longest random reference");
  synth->add_option("--refs", refs_file, "Reference text, one per line");
  synth->add_option("--delete-rate", delete_rate, "Length-mismatch rate");
  synth->add_option("--low-confidence-rate", low_rate, "Low-confidence rate");
  synth->add_option("--substitute-rate", sub_rate, "Substitution rate");

  CLI::App* decode = cli.add_subcommand("decode", "Decode a corpus");
  common(decode);
  decoding(decode);
  decode->add_option("--mode", mode, "ar, gctc, par or nar");

  CLI::App* bench = cli.add_subcommand("bench", "Compare decoding modes");
  common(bench);
  decoding(bench);
  bench->add_option("--modes", modes, "Comma-separated modes (at least two)");

  CLI::App* sweep = cli.add_subcommand("sweep", "PAR parameter sweep");
  common(sweep);
  decoding(sweep);
  sweep->add_option("--p-thres-grid", p_grid, "Comma-separated thresholds");
  sweep->add_option("--max-iteration-grid", it_grid, "Comma-separated values");
  sweep->add_option("--beam-grid", beam_grid, "Comma-separated beam sizes");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = cli.exit(e);
    return rc == 0 ? kExitOk : kExitError;
  }

  try {
    RunConfig rc;
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      if (!is) throw Error("cannot open config '" + config_path + "'");
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(is);
      } catch (const nlohmann::json::exception& e) {
        throw Error("config is not valid JSON: " + std::string(e.what()));
      }
      rc = RunConfigFromJson(j);
    }
    if (mode) rc.mode = ParseDecodeMode(*mode);
    if (beam) rc.beam_size = beam;
    if (p_thres) rc.p_thres = p_thres;
    if (max_iter) rc.max_iteration = max_iter;
    if (ctc_weight) rc.ctc_weight = ctc_weight;
    if (nar_iter) rc.nar_iterations = nar_iter;
    if (sequential_refine) rc.sequential_refine = true;
    if (no_cache) rc.use_cache = false;
    if (seed) rc.seed = *seed;
    if (corpus) rc.corpus = *corpus;
    if (out) rc.out = *out;
    if (jobs) rc.jobs = *jobs;
    if (clock) rc.clock = ParseClock(*clock);
    if (scorer) rc.scorer.kind = *scorer;
    if (correct_mass) rc.scorer.correct_mass = *correct_mass;
    if (ngram_order) rc.scorer.ngram_order = *ngram_order;
    if (ngram_alpha) rc.scorer.ngram_alpha = *ngram_alpha;
    if (ngram_corpus) rc.scorer.ngram_corpus = *ngram_corpus;
    if (modes) {
      rc.modes.clear();
      for (const auto& m : ParseList<std::string>(*modes)) {
        rc.modes.push_back(ParseDecodeMode(m));
      }
    }
    if (p_grid) rc.p_thres_grid = ParseList<double>(*p_grid);
    if (it_grid) rc.max_iteration_grid = ParseList<int>(*it_grid);
    if (beam_grid) rc.beam_grid = ParseList<int>(*beam_grid);
    if (count) rc.synth.count = *count;
    if (min_len) rc.synth.min_length = *min_len;
    if (max_len) rc.synth.max_length = *max_len;
    if (refs_file) rc.synth.refs_file = *refs_file;
    if (delete_rate) rc.synth.delete_rate = *delete_rate;
    if (low_rate) rc.synth.low_confidence_rate = *low_rate;
    if (sub_rate) rc.synth.substitute_rate = *sub_rate;
    if (rc.jobs < 1) throw Error("--jobs must be >= 1");

    if (synth->parsed()) return CmdSynth(rc);
    if (decode->parsed()) return CmdDecode(rc);
    if (bench->parsed()) return CmdBench(rc);
    return CmdSweep(rc);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace pardec::app
