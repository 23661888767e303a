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

#include <algorithm>
#include <set>

namespace pardec {

namespace {

bool IsReserved(std::string_view s) {
  return s == kBlankSymbol || s == kMaskSymbol || s == kSosSymbol ||
         s == kEosSymbol;
}

}  // namespace

const std::string& Vocabulary::token(TokenId id) const {
  if (!InRange(id)) {
    throw Error("token id " + std::to_string(id) + " out of range [0, " +
                std::to_string(size()) + ")");
  }
  return tokens_[static_cast<size_t>(id)];
}

TokenId Vocabulary::Find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? -1 : it->second;
}

TokenSeq Vocabulary::UserTokens() const {
  TokenSeq out;
  for (TokenId id = 0; id < size(); ++id) {
    if (!IsSpecial(id)) out.push_back(id);
  }
  return out;
}

nlohmann::json Vocabulary::ToJson() const {
  return nlohmann::json{{"tokens", tokens_},
                        {"blank_id", blank_id_},
                        {"mask_id", mask_id_},
                        {"sos_id", sos_id_},
                        {"eos_id", eos_id_}};
}

Vocabulary Vocabulary::FromJson(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("tokens")) {
    throw Error("vocabulary json must be an object with a tokens array");
  }
  auto all = j.at("tokens").get<std::vector<std::string>>();
  const auto id_of = [&](const char* key, TokenId expected) {
    TokenId id = j.value(key, expected);
    if (id != expected) {
      throw Error(std::string("vocabulary ") + key + " must be " +
                  std::to_string(expected));
    }
    return id;
  };
  id_of("blank_id", Vocabulary::kBlankId);
  id_of("mask_id", Vocabulary::kMaskId);
  id_of("sos_id", Vocabulary::kSosId);
  id_of("eos_id", Vocabulary::kEosId);
  if (all.size() <= static_cast<size_t>(Vocabulary::kFirstUserId) ||
      all[0] != kBlankSymbol || all[1] != kMaskSymbol ||
      all[2] != kSosSymbol || all[3] != kEosSymbol) {
    throw Error("vocabulary tokens must start with the four special symbols");
  }
  return BuildVocabulary(
      std::vector<std::string>(all.begin() + Vocabulary::kFirstUserId,
                               all.end()));
}

Vocabulary BuildVocabulary(const std::vector<std::string>& token_list) {
  if (token_list.empty()) throw Error("token list is empty");
  Vocabulary v;
  v.tokens_ = {std::string(kBlankSymbol), std::string(kMaskSymbol),
               std::string(kSosSymbol), std::string(kEosSymbol)};
  for (TokenId id = 0; id < Vocabulary::kFirstUserId; ++id) {
    v.index_.emplace(v.tokens_[id], id);
  }
  for (const auto& tok : token_list) {
    if (tok.empty()) throw Error("empty token string");
    if (IsReserved(tok)) throw Error("token '" + tok + "' is reserved");
    TokenId id = static_cast<TokenId>(v.tokens_.size());
    if (!v.index_.emplace(tok, id).second) {
      throw Error("duplicate token '" + tok + "'");
    }
    v.tokens_.push_back(tok);
  }
  return v;
}

Vocabulary BuildCharVocabulary(const std::vector<std::string>& texts) {
  std::set<std::string> chars;
  for (const auto& t : texts) {
    for (auto& c : SplitUtf8(t)) chars.insert(std::move(c));
  }
  return BuildVocabulary({chars.begin(), chars.end()});
}

std::vector<std::string> SplitUtf8(std::string_view text) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < text.size()) {
    auto lead = static_cast<unsigned char>(text[i]);
    size_t len = 1;
    if ((lead & 0xE0) == 0xC0) {
      len = 2;
    } else if ((lead & 0xF0) == 0xE0) {
      len = 3;
    } else if ((lead & 0xF8) == 0xF0) {
      len = 4;
    }
    len = std::min(len, text.size() - i);
    out.emplace_back(text.substr(i, len));
    i += len;
  }
  return out;
}

TokenSeq EncodeText(const Vocabulary& v, std::string_view text) {
  TokenSeq ids;
  for (const auto& ch : SplitUtf8(text)) {
    TokenId id = v.Find(ch);
    if (id < 0 || v.IsSpecial(id)) {
      throw Error("unknown character '" + ch + "'");
    }
    ids.push_back(id);
  }
  return ids;
}

std::string DecodeTokens(const Vocabulary& v, const TokenSeq& ids,
                         RenderMode mode) {
  std::string out;
  for (TokenId id : ids) {
    const std::string& tok = v.token(id);
    if (v.IsSpecial(id) && mode == RenderMode::kSurface) continue;
    out += tok;
  }
  return out;
}

}  // namespace pardec
