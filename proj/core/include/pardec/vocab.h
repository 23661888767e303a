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

#ifndef PARDEC_VOCAB_H_
#define PARDEC_VOCAB_H_

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "pardec/types.h"

namespace pardec {

// Reserved surface strings for the four special symbols.
inline constexpr std::string_view kBlankSymbol = "<blank>";
inline constexpr std::string_view kMaskSymbol = "#";
inline constexpr std::string_view kSosSymbol = "<sos>";
inline constexpr std::string_view kEosSymbol = "<eos>";

enum class RenderMode {
  kSurface,  // specials are dropped
  kDebug,    // specials are rendered as their reserved symbols
};

// Immutable token inventory. Specials always occupy ids 0..3
// (blank, mask, sos, eos); user tokens follow in the order given.
class Vocabulary {
 public:
  static constexpr TokenId kBlankId = 0;
  static constexpr TokenId kMaskId = 1;
  static constexpr TokenId kSosId = 2;
  static constexpr TokenId kEosId = 3;
  static constexpr TokenId kFirstUserId = 4;

  Vocabulary() = default;

  int size() const { return static_cast<int>(tokens_.size()); }
  int num_user_tokens() const { return size() - kFirstUserId; }

  TokenId blank_id() const { return blank_id_; }
  TokenId mask_id() const { return mask_id_; }
  TokenId sos_id() const { return sos_id_; }
  TokenId eos_id() const { return eos_id_; }

  bool IsSpecial(TokenId id) const {
    return id == blank_id_ || id == mask_id_ || id == sos_id_ ||
           id == eos_id_;
  }
  bool InRange(TokenId id) const { return id >= 0 && id < size(); }
  bool IsUserToken(TokenId id) const { return InRange(id) && !IsSpecial(id); }

  const std::string& token(TokenId id) const;
  const std::vector<std::string>& tokens() const { return tokens_; }

  // Returns -1 when absent.
  TokenId Find(std::string_view token) const;

  // Ids of all non-special tokens in increasing order.
  TokenSeq UserTokens() const;

  nlohmann::json ToJson() const;
  static Vocabulary FromJson(const nlohmann::json& j);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_ && a.blank_id_ == b.blank_id_ &&
           a.mask_id_ == b.mask_id_ && a.sos_id_ == b.sos_id_ &&
           a.eos_id_ == b.eos_id_;
  }

 private:
  friend Vocabulary BuildVocabulary(const std::vector<std::string>&);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
  TokenId blank_id_ = kBlankId;
  TokenId mask_id_ = kMaskId;
  TokenId sos_id_ = kSosId;
  TokenId eos_id_ = kEosId;
};

// Throws Error on an empty list, a duplicate, an empty string, or a token
// equal to one of the reserved special symbols.
Vocabulary BuildVocabulary(const std::vector<std::string>& token_list);

// Vocabulary of every distinct code point appearing in `texts`, sorted.
Vocabulary BuildCharVocabulary(const std::vector<std::string>& texts);

// Splits UTF-8 text into code points.
std::vector<std::string> SplitUtf8(std::string_view text);

// Character-level tokenization; throws Error on an unknown character.
TokenSeq EncodeText(const Vocabulary& v, std::string_view text);

// Throws Error on out-of-range ids.
std::string DecodeTokens(const Vocabulary& v, const TokenSeq& ids,
                         RenderMode mode = RenderMode::kSurface);

}  // namespace pardec

#endif  // PARDEC_VOCAB_H_
