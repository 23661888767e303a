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

// Library behind the `pardec` command line tool. Every subcommand is a plain
// function so tests can drive it without a process boundary.

#ifndef PARDEC_APP_H_
#define PARDEC_APP_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pardec/beam.h"
#include "pardec/corpus.h"
#include "pardec/metrics.h"
#include "pardec/scorer.h"
#include "pardec/synth.h"

namespace pardec::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitDegraded = 2;  // a fallback or truncation happened

struct ScorerSpec {
  std::string kind = "oracle";  // oracle | ngram
  double correct_mass = 0.9;
  int ngram_order = 3;
  double ngram_alpha = 0.1;
  std::string ngram_corpus;  // text file; empty = corpus references
};

struct SynthUtterance {
  std::string id;
  std::string ref;
  std::vector<SynthError> errors;
};

struct SynthSpec {
  // Random references, used when neither `utterances` nor `refs_file` is set.
  int count = 100;
  int min_length = 20;
  int max_length = 60;
  std::string alphabet = "abcdefghijklmnopqrstuvwxyz_";
  int frames_per_token = 3;
  // Per-utterance probability of carrying one region of each kind.
  double substitute_rate = 0.0;
  double low_confidence_rate = 0.3;
  double delete_rate = 0.02;
  int max_low_confidence_span = 3;
  double min_strength = 0.2;
  double max_strength = 0.8;
  // Explicit utterances win over everything else.
  std::vector<SynthUtterance> utterances;
  std::string refs_file;  // one reference per line
};

enum class ClockKind { kWall, kModel };

struct RunConfig {
  DecodeMode mode = DecodeMode::kPar;
  // Values set in the config file or on the command line; unset fields take
  // the mode's defaults.
  std::optional<int> beam_size;
  std::optional<double> p_thres;
  std::optional<int> max_iteration;
  std::optional<double> ctc_weight;
  std::optional<int> nar_iterations;
  std::optional<bool> sequential_refine;
  std::optional<bool> use_cache;

  std::string corpus;
  std::string out;
  ScorerSpec scorer;
  uint64_t seed = 0;
  int jobs = 1;
  ClockKind clock = ClockKind::kModel;

  std::vector<DecodeMode> modes;  // bench
  std::vector<double> p_thres_grid;
  std::vector<int> max_iteration_grid;
  std::vector<int> beam_grid;

  SynthSpec synth;

  // Defaults of `m` plus overrides. ctc_weight only reaches AR.
  DecodeConfig Resolve(DecodeMode m) const;
};

// Reads a JSON config object. Unknown keys are an error.
RunConfig RunConfigFromJson(const nlohmann::json& j);

// --- synth ------------------------------------------------------------------

struct SynthSummary {
  int utterances = 0;
  int tokens = 0;
  int low_confidence_regions = 0;
  int substitute_regions = 0;
  int delete_regions = 0;
  double masked_fraction = 0.0;  // mean over utterances at p_thres 0.95
};

// A delete region is placed right after a low-confidence token so the lost
// token sits next to a mask and can be recovered. Random regions are never
// placed where a masked token equals the token that follows the region,
// since the fill search stops at the first emission of that token.
Corpus SynthesizeCorpus(const SynthSpec& spec, uint64_t seed,
                        SynthSummary* summary = nullptr);
SynthSummary Summarize(const Corpus& c, double p_thres = 0.95);

// --- decode -----------------------------------------------------------------

std::unique_ptr<Scorer> BuildScorer(const ScorerSpec& spec, const Corpus& c,
                                    uint64_t seed);

struct DecodeRun {
  std::vector<DecodeReport> reports;  // corpus order
  int degraded = 0;                   // utterances with fallback/truncation
};

DecodeRun DecodeCorpus(const Corpus& c, const Scorer& scorer,
                       const DecodeConfig& cfg, int jobs, ClockKind clock);

// Reference map (id -> text) for utterances that carry one.
std::map<std::string, std::string> References(const Corpus& c);

// --- bench / sweep ----------------------------------------------------------

// FNV digest of the serialised corpus.
uint64_t CorpusDigest(const Corpus& c);

struct BenchResult {
  std::vector<BenchRow> rows;
  std::vector<DecodeRun> runs;  // one per mode
  uint64_t corpus_digest = 0;
};

// Throws Error when fewer than two distinct modes are given.
BenchResult RunBench(const Corpus& c, const RunConfig& rc);

struct SweepRow {
  double p_thres = 0.0;
  int max_iteration = 0;
  int beam_size = 0;
  double error_rate = 0.0;
  double mean_calls = 0.0;
  int fallbacks = 0;
};

// PAR over the cross product of the grids; an empty grid means the single
// resolved value.
std::vector<SweepRow> RunSweep(const Corpus& c, const RunConfig& rc);
std::string SweepCsv(const std::vector<SweepRow>& rows);

// --- entry point ------------------------------------------------------------

int Main(int argc, const char* const* argv);

}  // namespace pardec::app

#endif  // PARDEC_APP_H_
