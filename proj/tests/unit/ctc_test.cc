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

#include <gtest/gtest.h>

#include <cmath>

#include "test_util.h"

namespace pardec {
namespace {

using testing::LetterVocab;
using testing::RandomPosterior;

// One-hot-ish posterior following an argmax path; the winning label gets
// `peak`, the rest is shared evenly over blank and user tokens.
CtcPosterior PathPosterior(const Vocabulary& v, const TokenSeq& path,
                           double peak = 0.9) {
  CtcPosterior p("path", static_cast<int>(path.size()), v.size());
  TokenSeq labels{v.blank_id()};
  for (TokenId u : v.UserTokens()) labels.push_back(u);
  for (size_t t = 0; t < path.size(); ++t) {
    const double rest = (1.0 - peak) / static_cast<double>(labels.size() - 1);
    for (TokenId k : labels) p.at(static_cast<int>(t), k) = rest;
    p.at(static_cast<int>(t), path[t]) = peak;
  }
  return p;
}

TEST(GreedyCtcTest, AllBlankCollapsesToEmpty) {
  const Vocabulary v = LetterVocab(2);
  const auto g = GreedyCtcDecode(PathPosterior(v, {0, 0, 0}), v);
  EXPECT_TRUE(g.tokens.empty());
  EXPECT_TRUE(g.confidences.empty());
  EXPECT_TRUE(g.frame_spans.empty());
}

TEST(GreedyCtcTest, CollapsesRepeatsThenDropsBlanks) {
  const Vocabulary v = LetterVocab(2);
  const TokenId a = v.Find("a");
  const TokenId b = v.Find("b");
  const auto g = GreedyCtcDecode(PathPosterior(v, {a, a, 0, a, b, b}), v);
  EXPECT_EQ(g.tokens, (TokenSeq{a, a, b}));
  ASSERT_EQ(g.frame_spans.size(), 3u);
  EXPECT_EQ(g.frame_spans[0], (FrameSpan{0, 1}));
  EXPECT_EQ(g.frame_spans[1], (FrameSpan{3, 3}));
  EXPECT_EQ(g.frame_spans[2], (FrameSpan{4, 5}));
}

TEST(GreedyCtcTest, ConfidenceIsSpanMaximum) {
  const Vocabulary v = LetterVocab(2);
  const TokenId a = v.Find("a");
  const TokenId b = v.Find("b");
  CtcPosterior p("c", 4, v.size());
  p.at(0, a) = 0.6;
  p.at(0, 0) = 0.4;
  p.at(1, a) = 0.9;
  p.at(1, 0) = 0.1;
  p.at(2, 0) = 0.8;
  p.at(2, a) = 0.2;
  p.at(3, b) = 0.7;
  p.at(3, 0) = 0.3;
  const auto g = GreedyCtcDecode(p, v);
  EXPECT_EQ(g.tokens, (TokenSeq{a, b}));
  ASSERT_EQ(g.confidences.size(), 2u);
  EXPECT_DOUBLE_EQ(g.confidences[0], 0.9);
  EXPECT_DOUBLE_EQ(g.confidences[1], 0.7);

  const auto mean = GreedyCtcDecode(p, v, ConfidenceRule::kMeanOverSpan);
  EXPECT_DOUBLE_EQ(mean.confidences[0], 0.75);
  EXPECT_DOUBLE_EQ(mean.confidences[1], 0.7);
}

TEST(GreedyCtcTest, TiesGoToLowestId) {
  const Vocabulary v = LetterVocab(2);
  CtcPosterior p("tie", 2, v.size());
  p.at(0, v.Find("a")) = 0.5;
  p.at(0, v.Find("b")) = 0.5;
  p.at(1, 0) = 0.5;
  p.at(1, v.Find("b")) = 0.5;
  const auto g = GreedyCtcDecode(p, v);
  EXPECT_EQ(g.tokens, (TokenSeq{v.Find("a")}));
}

TEST(GreedyCtcTest, RejectsDimensionMismatchAndBadRows) {
  const Vocabulary v = LetterVocab(2);
  CtcPosterior narrow("n", 1, v.size() - 1);
  narrow.at(0, 0) = 1.0;
  EXPECT_THROW(GreedyCtcDecode(narrow, v), Error);
  CtcPosterior unnormalized("u", 1, v.size());
  unnormalized.at(0, 0) = 0.5;
  EXPECT_THROW(GreedyCtcDecode(unnormalized, v), Error);
  CtcPosterior empty("e", 0, v.size());
  EXPECT_THROW(GreedyCtcDecode(empty, v), Error);
}

TEST(GreedyCtcProperty, DeterministicBoundedAndSpecialFree) {
  const Vocabulary v = LetterVocab(3);
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = RandomPosterior(v, rng.UniformInt(1, 30), rng);
    const auto g1 = GreedyCtcDecode(p, v);
    const auto g2 = GreedyCtcDecode(p, v);
    EXPECT_EQ(g1.tokens, g2.tokens);
    EXPECT_EQ(g1.confidences, g2.confidences);
    EXPECT_LE(static_cast<int>(g1.tokens.size()), p.num_frames());
    ASSERT_EQ(g1.tokens.size(), g1.confidences.size());
    ASSERT_EQ(g1.tokens.size(), g1.frame_spans.size());
    for (size_t i = 0; i < g1.tokens.size(); ++i) {
      EXPECT_TRUE(v.IsUserToken(g1.tokens[i]));
      EXPECT_GT(g1.confidences[i], 0.0);
      EXPECT_LE(g1.confidences[i], 1.0);
      EXPECT_LE(g1.frame_spans[i].first, g1.frame_spans[i].last);
      if (i > 0) EXPECT_GT(g1.frame_spans[i].first, g1.frame_spans[i - 1].last);
    }
  }
}

TEST(CtcPrefixTest, SingleFrameSingleAlignment) {
  const Vocabulary v = LetterVocab(1);
  CtcPosterior p("one", 1, v.size());
  p.at(0, 0) = 0.5;
  p.at(0, v.Find("a")) = 0.5;
  const TokenSeq cands{v.Find("a")};
  const auto s = CtcPrefixScore(p, v, {}, cands);
  EXPECT_NEAR(s[0], std::log(0.5), 1e-12);
}

TEST(CtcPrefixTest, MatchesBruteForceOnThreeFrames) {
  const Vocabulary v = LetterVocab(2);  // {blank, a, b}: 27 paths
  Rng rng(3);
  const auto p = RandomPosterior(v, 3, rng);
  const TokenId a = v.Find("a");
  const TokenId b = v.Find("b");
  const TokenSeq cands{a, b, v.eos_id()};
  for (const TokenSeq& prefix : {TokenSeq{}, TokenSeq{a}, TokenSeq{a, b},
                                 TokenSeq{b, b}, TokenSeq{a, a}}) {
    const auto fast = CtcPrefixScore(p, v, prefix, cands);
    const auto slow = BruteForceCtcPrefix(p, v, prefix, cands);
    for (size_t i = 0; i < cands.size(); ++i) {
      if (slow[i] == kLogZero) {
        EXPECT_EQ(fast[i], kLogZero);
      } else {
        EXPECT_NEAR(fast[i], slow[i], 1e-9);
      }
    }
  }
}

TEST(CtcPrefixTest, PrefixLongerThanFramesIsLogZero) {
  const Vocabulary v = LetterVocab(2);
  Rng rng(5);
  const auto p = RandomPosterior(v, 3, rng);
  const TokenId a = v.Find("a");
  const TokenId b = v.Find("b");
  const TokenSeq cands{a, b, v.eos_id()};
  for (double s : CtcPrefixScore(p, v, {a, b, a, b}, cands)) {
    EXPECT_EQ(s, kLogZero);
  }
}

TEST(CtcPrefixTest, RejectsInvalidIds) {
  const Vocabulary v = LetterVocab(2);
  Rng rng(5);
  const auto p = RandomPosterior(v, 3, rng);
  const TokenSeq blank{v.blank_id()};
  const TokenSeq mask{v.mask_id()};
  EXPECT_THROW(CtcPrefixScore(p, v, {}, blank), Error);
  EXPECT_THROW(CtcPrefixScore(p, v, {}, mask), Error);
  const TokenSeq ok{v.Find("a")};
  EXPECT_THROW(CtcPrefixScore(p, v, {v.sos_id()}, ok), Error);
}

TEST(CtcPrefixTest, UniformPosteriorIsSymmetric) {
  const Vocabulary v = LetterVocab(2);
  CtcPosterior p("u", 4, v.size());
  for (int t = 0; t < 4; ++t) {
    for (TokenId k : {0, 4, 5}) p.at(t, k) = 1.0 / 3.0;
  }
  const TokenSeq cands{v.Find("a"), v.Find("b")};
  const auto fast = CtcPrefixScore(p, v, {}, cands);
  EXPECT_NEAR(fast[0], fast[1], 1e-12);
  const auto slow = BruteForceCtcPrefix(p, v, {}, cands);
  EXPECT_EQ(slow[0], slow[1]);
}

TEST(CtcPrefixTest, OneHotPathHasAllMass) {
  const Vocabulary v = LetterVocab(2);
  const TokenId a = v.Find("a");
  const TokenId b = v.Find("b");
  CtcPosterior p("ab", 3, v.size());
  p.at(0, a) = 1.0;
  p.at(1, 0) = 1.0;
  p.at(2, b) = 1.0;
  const TokenSeq cands{b};
  EXPECT_NEAR(CtcPrefixScore(p, v, {a}, cands)[0], 0.0, 1e-9);
  EXPECT_EQ(BruteForceCtcPrefix(p, v, {a}, cands)[0], 0.0);
}

TEST(CtcPrefixTest, BruteForceRefusesLargeInstances) {
  const Vocabulary v = LetterVocab(9);  // 10 labels
  Rng rng(1);
  const auto p = RandomPosterior(v, 7, rng);
  const TokenSeq cands{v.Find("a")};
  EXPECT_THROW(BruteForceCtcPrefix(p, v, {}, cands), Error);
}

// Random (T <= 6, labels <= 4) instances, every prefix up to length 3.
TEST(CtcPrefixProperty, AgreesWithBruteForce) {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const Vocabulary v = LetterVocab(rng.UniformInt(1, 3));
    const auto p = RandomPosterior(v, rng.UniformInt(1, 6), rng);
    TokenSeq cands = v.UserTokens();
    cands.push_back(v.eos_id());
    TokenSeq prefix;
    const int len = rng.UniformInt(0, 3);
    for (int i = 0; i < len; ++i) {
      prefix.push_back(
          v.UserTokens()[rng.UniformInt(0, v.num_user_tokens() - 1)]);
    }
    const auto fast = CtcPrefixScore(p, v, prefix, cands);
    const auto slow = BruteForceCtcPrefix(p, v, prefix, cands);
    for (size_t i = 0; i < cands.size(); ++i) {
      if (slow[i] == kLogZero) {
        EXPECT_EQ(fast[i], kLogZero);
      } else {
        EXPECT_NEAR(fast[i], slow[i], 1e-9);
      }
    }
  }
}

// Alignments partition by their first emitted token (or none).
TEST(CtcPrefixProperty, FirstTokenMassSumsToOne) {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const Vocabulary v = LetterVocab(rng.UniformInt(1, 5));
    const auto p = RandomPosterior(v, rng.UniformInt(1, 40), rng);
    TokenSeq cands = v.UserTokens();
    cands.push_back(v.eos_id());
    double total = 0.0;
    for (double s : CtcPrefixScore(p, v, {}, cands)) total += std::exp(s);
    EXPECT_LE(total, 1.0 + 1e-6);
    EXPECT_NEAR(total, 1.0, 1e-6);
  }
}

TEST(CtcPrefixProperty, IncrementalStateMatchesFromScratch) {
  const Vocabulary v = LetterVocab(3);
  Rng rng(8);
  const auto p = RandomPosterior(v, 12, rng);
  CtcPrefixScorer scorer(p, v);
  CtcPrefixState state = scorer.Initial();
  TokenSeq prefix;
  for (int i = 0; i < 5; ++i) {
    const TokenId c = v.UserTokens()[rng.UniformInt(0, 2)];
    double step = 0.0;
    state = scorer.Extend(state, c, &step);
    prefix.push_back(c);
    EXPECT_DOUBLE_EQ(step, scorer.StateFor(prefix).prefix_score);
  }
}

}  // namespace
}  // namespace pardec
