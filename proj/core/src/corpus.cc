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

#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"

namespace pardec {

std::string CorpusHeaderLine(const Vocabulary& v) {
  return nlohmann::json{{"vocab", v.ToJson()}}.dump();
}

std::string UtteranceLine(const Utterance& u) {
  const CtcPosterior& p = u.posterior;
  nlohmann::json frames = nlohmann::json::array();
  for (int t = 0; t < p.num_frames(); ++t) {
    const auto row = p.frame(t);
    frames.push_back(std::vector<double>(row.begin(), row.end()));
  }
  nlohmann::json j{{"id", p.utterance_id()}, {"frames", std::move(frames)}};
  if (u.ref) j["ref"] = *u.ref;
  return j.dump();
}

void WriteCorpus(std::ostream& os, const Corpus& c) {
  os << CorpusHeaderLine(c.vocab) << '\n';
  for (const auto& u : c.utterances) os << UtteranceLine(u) << '\n';
}

CorpusReadResult ReadCorpus(std::istream& is) {
  CorpusReadResult out;
  std::string line;
  size_t lineno = 0;
  bool have_header = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!have_header) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw Error("corpus header is not valid JSON: " +
                    std::string(e.what()));
      }
      if (!j.is_object() || !j.contains("vocab")) {
        throw Error("corpus must start with a {\"vocab\": ...} header line");
      }
      out.corpus.vocab = Vocabulary::FromJson(j.at("vocab"));
      have_header = true;
      continue;
    }
    try {
      const auto j = nlohmann::json::parse(line);
      Utterance u;
      u.posterior = CtcPosterior(
          j.at("id").get<std::string>(),
          j.at("frames").get<std::vector<std::vector<double>>>());
      u.posterior.Validate(out.corpus.vocab);
      if (j.contains("ref")) {
        u.ref = j.at("ref").get<std::string>();
        EncodeText(out.corpus.vocab, *u.ref);
      }
      out.corpus.utterances.push_back(std::move(u));
    } catch (const std::exception& e) {
      out.warnings.push_back("line " + std::to_string(lineno) + ": " +
                             e.what());
    }
  }
  if (!have_header) throw Error("corpus is empty");
  return out;
}

CorpusReadResult ReadCorpusFile(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open corpus '" + path + "'");
  return ReadCorpus(is);
}

std::vector<std::string> ReadTextLines(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace pardec
