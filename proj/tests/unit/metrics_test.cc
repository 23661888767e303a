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

#include "pardec/metrics.h"

#include <gtest/gtest.h>

#include <functional>
#include <map>

#include "pardec/rng.h"
#include "test_util.h"

namespace pardec {
namespace {

using testing::LetterVocab;

// Memoised recursive edit distance, written independently of the
// iterative table in the library.
int64_t OracleDistance(const TokenSeq& a, const TokenSeq& b) {
  std::map<std::pair<size_t, size_t>, int64_t> memo;
  std::function<int64_t(size_t, size_t)> go = [&](size_t i,
                                                  size_t j) -> int64_t {
    if (i == a.size()) return static_cast<int64_t>(b.size() - j);
    if (j == b.size()) return static_cast<int64_t>(a.size() - i);
    const auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    int64_t best = go(i + 1, j + 1) + (a[i] == b[j] ? 0 : 1);
    best = std::min(best, go(i + 1, j) + 1);
    best = std::min(best, go(i, j + 1) + 1);
    return memo[key] = best;
  };
  return go(0, 0);
}

TEST(EditDistanceTest, KittenSitting) {
  const Vocabulary v = BuildCharVocabulary({"kitten", "sitting"});
  const auto e = EditDistance(EncodeText(v, "kitten"), EncodeText(v, "sitting"));
  EXPECT_EQ(e.errors(), 3);
  EXPECT_EQ(e.substitutions, 2);
  EXPECT_EQ(e.insertions, 1);
  EXPECT_EQ(e.deletions, 0);
  EXPECT_DOUBLE_EQ(*e.rate(), 0.5);
}

TEST(EditDistanceTest, EmptyReference) {
  const auto e = EditDistance({}, {4, 5, 6});
  EXPECT_EQ(e.insertions, 3);
  EXPECT_EQ(e.errors(), 3);
  EXPECT_FALSE(e.rate().has_value());
  const auto none = EditDistance({}, {});
  EXPECT_EQ(none.errors(), 0);
  EXPECT_FALSE(none.rate().has_value());
}

TEST(EditDistanceTest, EmptyHypothesisIsAllDeletions) {
  const auto e = EditDistance({4, 5}, {});
  EXPECT_EQ(e.deletions, 2);
  EXPECT_DOUBLE_EQ(*e.rate(), 1.0);
}

TEST(EditDistanceProperty, MatchesOracleAndIsAMetric) {
  Rng rng(31);
  const auto draw = [&] {
    TokenSeq s;
    const int len = rng.UniformInt(0, 9);
    for (int i = 0; i < len; ++i) s.push_back(rng.UniformInt(4, 7));
    return s;
  };
  for (int trial = 0; trial < 400; ++trial) {
    const TokenSeq a = draw();
    const TokenSeq b = draw();
    const TokenSeq c = draw();
    const auto ab = EditDistance(a, b);
    EXPECT_EQ(ab.errors(), OracleDistance(a, b));
    EXPECT_EQ(ab.errors(), EditDistance(b, a).errors());
    EXPECT_EQ(EditDistance(a, a).errors(), 0);
    EXPECT_LE(ab.errors(),
              EditDistance(a, c).errors() + EditDistance(c, b).errors());
    // The alignment accounts for every token on both sides.
    EXPECT_EQ(static_cast<int64_t>(a.size()) - ab.deletions + ab.insertions,
              static_cast<int64_t>(b.size()));
  }
}

DecodeReport Report(const std::string& id, DecodeMode mode,
                    const std::string& text, int frames, int calls,
                    int64_t elapsed_ns) {
  DecodeReport r;
  r.id = id;
  r.mode = mode;
  r.transcript = text;
  r.num_frames = frames;
  r.decoder_calls = calls;
  r.elapsed_ns = elapsed_ns;
  return r;
}

TEST(AggregateBenchTest, RatiosAgainstAr) {
  const Vocabulary v = LetterVocab(3);
  // 100 frames = 4 s of audio. 0.44 s elapsed -> RTF 0.110; 0.032 s -> 0.008.
  const std::vector<DecodeReport> reports{
      Report("u1", DecodeMode::kAr, "abc", 100, 50, 440'000'000),
      Report("u1", DecodeMode::kPar, "abb", 100, 5, 32'000'000)};
  const auto rows = AggregateBench(reports, {{"u1", "abc"}}, v);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].mode, "ar");
  EXPECT_NEAR(rows[0].mean_rtf, 0.110, 1e-12);
  EXPECT_DOUBLE_EQ(rows[0].error_rate, 0.0);
  EXPECT_NEAR(*rows[0].speedup_vs_ar, 1.0, 1e-12);
  EXPECT_NEAR(*rows[1].speedup_vs_ar, 13.75, 1e-9);
  EXPECT_NEAR(*rows[1].call_speedup_vs_ar, 10.0, 1e-12);
  EXPECT_NEAR(rows[1].error_rate, 1.0 / 3.0, 1e-12);

  const std::string csv = BenchCsv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "mode,mean_rtf,std_rtf,mean_calls,error_rate,speedup");
  EXPECT_NE(csv.find("par,0.008000,0.000000,5.000,0.333333,13.750"),
            std::string::npos);
  EXPECT_NE(BenchMarkdown(rows).find("13.75x"), std::string::npos);
}

TEST(AggregateBenchTest, NoArRowMeansNoSpeedups) {
  const Vocabulary v = LetterVocab(2);
  const auto rows = AggregateBench(
      {Report("u", DecodeMode::kGctc, "ab", 10, 0, 1000)}, {{"u", "ab"}}, v);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_FALSE(rows[0].speedup_vs_ar.has_value());
  EXPECT_FALSE(rows[0].call_speedup_vs_ar.has_value());
}

TEST(AggregateBenchTest, EmptyInputAndMissingReference) {
  const Vocabulary v = LetterVocab(2);
  EXPECT_TRUE(AggregateBench({}, {}, v).empty());
  EXPECT_EQ(BenchCsv({}), "mode,mean_rtf,std_rtf,mean_calls,error_rate,speedup\n");
  EXPECT_THROW(
      AggregateBench({Report("x", DecodeMode::kAr, "a", 1, 1, 1)}, {}, v),
      Error);
}

TEST(AggregateBenchTest, StandardDeviationOverUtterances) {
  const Vocabulary v = LetterVocab(2);
  // 25 frames = 1 s. RTFs 0.1 and 0.3: mean 0.2, population std 0.1.
  const auto rows = AggregateBench(
      {Report("a", DecodeMode::kPar, "a", 25, 1, 100'000'000),
       Report("b", DecodeMode::kPar, "b", 25, 3, 300'000'000)},
      {{"a", "a"}, {"b", "b"}}, v);
  EXPECT_NEAR(rows[0].mean_rtf, 0.2, 1e-12);
  EXPECT_NEAR(rows[0].std_rtf, 0.1, 1e-12);
  EXPECT_DOUBLE_EQ(rows[0].mean_decoder_calls, 2.0);
}

TEST(CostModelTest, LinearInFramesCallsAndRows) {
  DecodeReport r;
  r.num_frames = 100;
  r.decoder_calls = 4;
  r.scored_rows = 40;
  EXPECT_EQ(CostModel{}.ElapsedNs(r), 100 * 2'000 + 4 * 500'000 + 40 * 20'000);
}

}  // namespace
}  // namespace pardec
