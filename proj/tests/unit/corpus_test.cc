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

#include "pardec/corpus.h"

#include <gtest/gtest.h>

#include <sstream>

#include "pardec/synth.h"
#include "test_util.h"

namespace pardec {
namespace {

Corpus SmallCorpus() {
  Corpus c;
  c.vocab = testing::LetterVocab(3);
  const TokenSeq ref = EncodeText(c.vocab, "abcab");
  c.utterances.push_back(
      {SynthPosterior("u1", ref, c.vocab, 3,
                      {{1, 2, SynthErrorKind::kLowConfidence, 0.5}}, Rng(1)),
       "abcab"});
  c.utterances.push_back(
      {SynthPosterior("u2", EncodeText(c.vocab, "ca"), c.vocab, 2, {}, Rng(2)),
       std::nullopt});
  return c;
}

TEST(CorpusTest, RoundTripIsExact) {
  const Corpus c = SmallCorpus();
  std::stringstream ss;
  WriteCorpus(ss, c);
  const auto r = ReadCorpus(ss);
  EXPECT_TRUE(r.warnings.empty());
  EXPECT_EQ(r.corpus.vocab, c.vocab);
  ASSERT_EQ(r.corpus.utterances.size(), 2u);
  for (size_t i = 0; i < 2; ++i) {
    const auto& a = c.utterances[i];
    const auto& b = r.corpus.utterances[i];
    EXPECT_EQ(a.id(), b.id());
    EXPECT_EQ(a.ref, b.ref);
    ASSERT_EQ(a.posterior.num_frames(), b.posterior.num_frames());
    for (int t = 0; t < a.posterior.num_frames(); ++t) {
      for (int k = 0; k < c.vocab.size(); ++k) {
        EXPECT_EQ(a.posterior.at(t, k), b.posterior.at(t, k));
      }
    }
  }
}

TEST(CorpusTest, MalformedLinesAreSkippedWithWarnings) {
  const Corpus c = SmallCorpus();
  std::stringstream ss;
  ss << CorpusHeaderLine(c.vocab) << '\n'
     << "not json\n"
     << UtteranceLine(c.utterances[0]) << '\n'
     << R"({"id": "short", "frames": [[1.0, 0.0]]})" << '\n'
     << R"({"id": "neg", "frames": [[1.5, -0.5, 0, 0, 0, 0, 0]]})" << '\n'
     << R"({"frames": []})" << '\n'
     << "\n";
  const auto r = ReadCorpus(ss);
  ASSERT_EQ(r.corpus.utterances.size(), 1u);
  EXPECT_EQ(r.corpus.utterances[0].id(), "u1");
  ASSERT_EQ(r.warnings.size(), 4u);
  EXPECT_EQ(r.warnings[0].rfind("line 2:", 0), 0u);
}

TEST(CorpusTest, ReferenceWithUnknownCharacterIsSkipped) {
  Corpus c = SmallCorpus();
  c.utterances[0].ref = "abz";
  std::stringstream ss;
  WriteCorpus(ss, c);
  const auto r = ReadCorpus(ss);
  EXPECT_EQ(r.corpus.utterances.size(), 1u);
  EXPECT_EQ(r.warnings.size(), 1u);
}

TEST(CorpusTest, BadHeaderIsFatal) {
  std::stringstream empty;
  EXPECT_THROW(ReadCorpus(empty), Error);
  std::stringstream junk("{\"id\": 1}\n");
  EXPECT_THROW(ReadCorpus(junk), Error);
  std::stringstream text("hello\n");
  EXPECT_THROW(ReadCorpus(text), Error);
  EXPECT_THROW(ReadCorpusFile("/nonexistent/corpus.jsonl"), Error);
}

}  // namespace
}  // namespace pardec
