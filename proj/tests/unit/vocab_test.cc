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

#include "pardec/vocab.h"

#include <gtest/gtest.h>

#include "pardec/rng.h"

namespace pardec {
namespace {

TEST(VocabTest, FixedSpecialLayout) {
  const Vocabulary v = BuildVocabulary({"a", "b"});
  EXPECT_EQ(v.size(), 6);
  EXPECT_EQ(v.Find("a"), 4);
  EXPECT_EQ(v.Find("b"), 5);
  EXPECT_EQ(v.blank_id(), 0);
  EXPECT_EQ(v.mask_id(), 1);
  EXPECT_EQ(v.sos_id(), 2);
  EXPECT_EQ(v.eos_id(), 3);
  EXPECT_EQ(v.token(v.mask_id()), "#");
}

TEST(VocabTest, RejectsDuplicatesReservedAndEmpty) {
  EXPECT_THROW(BuildVocabulary({"a", "a"}), Error);
  EXPECT_THROW(BuildVocabulary({"a", "#"}), Error);
  EXPECT_THROW(BuildVocabulary({"<sos>"}), Error);
  EXPECT_THROW(BuildVocabulary({"<eos>"}), Error);
  EXPECT_THROW(BuildVocabulary({"<blank>"}), Error);
  EXPECT_THROW(BuildVocabulary({""}), Error);
  EXPECT_THROW(BuildVocabulary({}), Error);
}

TEST(VocabTest, EncodeDecodeRoundTrip) {
  const Vocabulary v = BuildVocabulary({"x", "y", "z"});
  const TokenSeq ids = EncodeText(v, "xyz");
  EXPECT_EQ(ids, (TokenSeq{4, 5, 6}));
  EXPECT_EQ(DecodeTokens(v, ids), "xyz");

  const Vocabulary ab = BuildVocabulary({"a", "b"});
  EXPECT_EQ(EncodeText(ab, "ab"), (TokenSeq{4, 5}));
  EXPECT_EQ(DecodeTokens(ab, {4, 5}), "ab");
  EXPECT_TRUE(EncodeText(ab, "").empty());
  EXPECT_EQ(DecodeTokens(ab, {}), "");
}

TEST(VocabTest, UnknownCharacterIsAnError) {
  const Vocabulary v = BuildVocabulary({"a", "b"});
  EXPECT_THROW(EncodeText(v, "aq"), Error);
  // The mask symbol is never a user character.
  EXPECT_THROW(EncodeText(v, "a#"), Error);
}

TEST(VocabTest, SpecialsRenderOnlyInDebugMode) {
  const Vocabulary v = BuildVocabulary({"s", "e"});
  const TokenSeq ids{v.sos_id(), 4, v.mask_id(), v.blank_id(), 5, v.eos_id()};
  EXPECT_EQ(DecodeTokens(v, ids), "se");
  EXPECT_EQ(DecodeTokens(v, ids, RenderMode::kDebug),
            "<sos>s#<blank>e<eos>");
  EXPECT_THROW(DecodeTokens(v, {99}), Error);
}

TEST(VocabTest, Utf8CodePointsAreSingleTokens) {
  const Vocabulary v = BuildCharVocabulary({"żółw", "ab"});
  const TokenSeq ids = EncodeText(v, "żab");
  EXPECT_EQ(ids.size(), 3u);
  EXPECT_EQ(DecodeTokens(v, ids), "żab");
}

TEST(VocabTest, JsonRoundTrip) {
  const Vocabulary v = BuildVocabulary({"a", " ", "b"});
  const Vocabulary back = Vocabulary::FromJson(v.ToJson());
  EXPECT_EQ(v, back);
  auto broken = v.ToJson();
  broken["mask_id"] = 2;
  EXPECT_THROW(Vocabulary::FromJson(broken), Error);
}

// Property: decode(encode(s)) == s for random covered strings, and surface
// decoding of arbitrary id streams never contains a special symbol.
TEST(VocabProperty, RoundTripAndNoSpecialsInSurface) {
  const Vocabulary v = BuildVocabulary({"a", "b", "c", " ", "_"});
  Rng rng(7);
  const std::string alphabet = "abc _";
  for (int trial = 0; trial < 200; ++trial) {
    std::string s;
    const int len = rng.UniformInt(0, 20);
    for (int i = 0; i < len; ++i) {
      s += alphabet[rng.UniformInt(0, static_cast<int>(alphabet.size()) - 1)];
    }
    EXPECT_EQ(DecodeTokens(v, EncodeText(v, s)), s);

    TokenSeq ids;
    for (int i = 0; i < len; ++i) ids.push_back(rng.UniformInt(0, v.size() - 1));
    const std::string surface = DecodeTokens(v, ids);
    EXPECT_EQ(surface.find('#'), std::string::npos);
    EXPECT_EQ(surface.find("<"), std::string::npos);
  }
}

}  // namespace
}  // namespace pardec
