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

#ifndef PARDEC_CORPUS_H_
#define PARDEC_CORPUS_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pardec/ctc.h"
#include "pardec/vocab.h"

namespace pardec {

// Posterior corpus as JSON Lines:
//   line 1:  {"vocab": {"tokens": [...], "blank_id": 0, ...}}
//   line 2+: {"id": "...", "frames": [[p, ...], ...], "ref": "..."}
// "ref" is optional.

struct Utterance {
  CtcPosterior posterior;
  std::optional<std::string> ref;

  const std::string& id() const { return posterior.utterance_id(); }
};

struct Corpus {
  Vocabulary vocab;
  std::vector<Utterance> utterances;
};

std::string CorpusHeaderLine(const Vocabulary& v);
std::string UtteranceLine(const Utterance& u);

void WriteCorpus(std::ostream& os, const Corpus& c);

struct CorpusReadResult {
  Corpus corpus;
  // One entry per skipped line, "line N: reason".
  std::vector<std::string> warnings;
};

// A missing or malformed header throws Error. Malformed utterance lines
// (bad JSON, wrong shape, rows that do not validate) are skipped and
// reported in `warnings`.
CorpusReadResult ReadCorpus(std::istream& is);
CorpusReadResult ReadCorpusFile(const std::string& path);

// Plain text, one utterance per line; empty lines are kept out.
std::vector<std::string> ReadTextLines(const std::string& path);

}  // namespace pardec

#endif  // PARDEC_CORPUS_H_
