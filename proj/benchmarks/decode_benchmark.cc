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

#include <benchmark/benchmark.h>

#include "pardec/beam.h"
#include "pardec/synth.h"

namespace pardec {
namespace {

struct Fixture {
  Vocabulary vocab;
  TokenSeq ref;
  CtcPosterior post;
  std::unique_ptr<OracleScorer> oracle;

  explicit Fixture(int length) {
    vocab = BuildCharVocabulary({"abcdefghijklmnopqrstuvwxyz_"});
    Rng rng(11);
    const TokenSeq users = vocab.UserTokens();
    for (int i = 0; i < length; ++i) {
      TokenId t;
      do {
        t = users[rng.UniformInt(0, static_cast<int>(users.size()) - 1)];
      } while (!ref.empty() && t == ref.back());
      ref.push_back(t);
    }
    std::vector<SynthError> errors;
    for (int b = 5; b + 3 < length; b += 20) {
      errors.push_back({b, b + 2, SynthErrorKind::kLowConfidence, 0.5});
    }
    post = SynthPosterior("bench", ref, vocab, 3, errors, Rng(3));
    oracle = MakeOracleScorer(vocab, ref, 0.9, 1);
  }
};

void BM_GreedyCtcDecode(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(GreedyCtcDecode(f.post, f.vocab));
  }
}
BENCHMARK(BM_GreedyCtcDecode)->Arg(50)->Arg(200);

void BM_CtcPrefixScore(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)));
  const TokenSeq prefix(f.ref.begin(), f.ref.begin() + f.ref.size() / 2);
  TokenSeq cands = f.vocab.UserTokens();
  for (auto _ : state) {
    benchmark::DoNotOptimize(CtcPrefixScore(f.post, f.vocab, prefix, cands));
  }
}
BENCHMARK(BM_CtcPrefixScore)->Arg(50)->Arg(200);

void BM_Decode(benchmark::State& state, DecodeMode mode) {
  const Fixture f(static_cast<int>(state.range(0)));
  const DecodeConfig cfg = DecodeConfig::Defaults(mode);
  int64_t calls = 0;
  for (auto _ : state) {
    const auto r = Decode(f.post, *f.oracle, cfg, f.vocab);
    calls = r.report.decoder_calls;
    benchmark::DoNotOptimize(r.tokens.data());
  }
  state.counters["decoder_calls"] = static_cast<double>(calls);
}
BENCHMARK_CAPTURE(BM_Decode, ar, DecodeMode::kAr)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Decode, par, DecodeMode::kPar)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Decode, nar, DecodeMode::kNar)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace pardec

BENCHMARK_MAIN();
