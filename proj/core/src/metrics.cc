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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace pardec {

std::optional<double> ErrorBreakdown::rate() const {
  if (reference_length == 0) return std::nullopt;
  return static_cast<double>(errors()) / static_cast<double>(reference_length);
}

ErrorBreakdown& ErrorBreakdown::operator+=(const ErrorBreakdown& o) {
  substitutions += o.substitutions;
  insertions += o.insertions;
  deletions += o.deletions;
  reference_length += o.reference_length;
  return *this;
}

ErrorBreakdown EditDistance(const TokenSeq& ref, const TokenSeq& hyp) {
  const size_t n = ref.size();
  const size_t m = hyp.size();
  std::vector<std::vector<int64_t>> d(n + 1, std::vector<int64_t>(m + 1, 0));
  for (size_t i = 0; i <= n; ++i) d[i][0] = static_cast<int64_t>(i);
  for (size_t j = 0; j <= m; ++j) d[0][j] = static_cast<int64_t>(j);
  for (size_t i = 1; i <= n; ++i) {
    for (size_t j = 1; j <= m; ++j) {
      const int64_t sub = d[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      d[i][j] = std::min({sub, d[i - 1][j] + 1, d[i][j - 1] + 1});
    }
  }

  ErrorBreakdown e;
  e.reference_length = static_cast<int64_t>(n);
  size_t i = n;
  size_t j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      if (d[i][j] == d[i - 1][j - 1] + (same ? 0 : 1)) {
        e.substitutions += same ? 0 : 1;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && d[i][j] == d[i - 1][j] + 1) {
      ++e.deletions;
      --i;
    } else {
      ++e.insertions;
      --j;
    }
  }
  return e;
}

double RealTimeFactor(const DecodeReport& r) {
  const double audio = r.num_frames * kFrameShiftSeconds;
  if (audio <= 0.0) return 0.0;
  return static_cast<double>(r.elapsed_ns) * 1e-9 / audio;
}

int64_t CostModel::ElapsedNs(const DecodeReport& r) const {
  return ns_per_frame * r.num_frames + ns_per_call * r.decoder_calls +
         ns_per_row * r.scored_rows;
}

std::vector<BenchRow> AggregateBench(
    const std::vector<DecodeReport>& reports,
    const std::map<std::string, std::string>& refs, const Vocabulary& v) {
  struct Acc {
    std::vector<double> rtf;
    double calls = 0.0;
    ErrorBreakdown err;
  };
  std::vector<std::string> order;
  std::map<std::string, Acc> acc;
  for (const auto& r : reports) {
    auto ref = refs.find(r.id);
    if (ref == refs.end()) {
      throw Error("no reference for utterance '" + r.id + "'");
    }
    const std::string mode(ToString(r.mode));
    if (!acc.count(mode)) order.push_back(mode);
    Acc& a = acc[mode];
    a.rtf.push_back(RealTimeFactor(r));
    a.calls += r.decoder_calls;
    a.err += EditDistance(EncodeText(v, ref->second),
                          EncodeText(v, r.transcript));
  }

  std::vector<BenchRow> rows;
  for (const auto& mode : order) {
    const Acc& a = acc.at(mode);
    BenchRow row;
    row.mode = mode;
    row.utterances = static_cast<int>(a.rtf.size());
    const double n = static_cast<double>(a.rtf.size());
    double sum = 0.0;
    for (double x : a.rtf) sum += x;
    row.mean_rtf = sum / n;
    double var = 0.0;
    for (double x : a.rtf) var += (x - row.mean_rtf) * (x - row.mean_rtf);
    row.std_rtf = std::sqrt(var / n);
    row.mean_decoder_calls = a.calls / n;
    row.error_rate = a.err.rate().value_or(0.0);
    rows.push_back(row);
  }

  const auto ar = std::find_if(rows.begin(), rows.end(),
                               [](const BenchRow& r) { return r.mode == "ar"; });
  if (ar != rows.end()) {
    const double ar_rtf = ar->mean_rtf;
    const double ar_calls = ar->mean_decoder_calls;
    for (auto& row : rows) {
      if (row.mean_rtf > 0.0) row.speedup_vs_ar = ar_rtf / row.mean_rtf;
      if (row.mean_decoder_calls > 0.0) {
        row.call_speedup_vs_ar = ar_calls / row.mean_decoder_calls;
      }
    }
  }
  return rows;
}

namespace {

std::string Fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, x);
  return buf;
}

std::string OptFixed(const std::optional<double>& x, int digits) {
  return x ? Fixed(*x, digits) : "";
}

}  // namespace

std::string BenchCsv(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  os << "mode,mean_rtf,std_rtf,mean_calls,error_rate,speedup\n";
  for (const auto& r : rows) {
    os << r.mode << ',' << Fixed(r.mean_rtf, 6) << ',' << Fixed(r.std_rtf, 6)
       << ',' << Fixed(r.mean_decoder_calls, 3) << ','
       << Fixed(r.error_rate, 6) << ',' << OptFixed(r.speedup_vs_ar, 3)
       << '\n';
  }
  return os.str();
}

std::string BenchMarkdown(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  os << "| mode | utts | RTF mean | RTF std | decoder calls | error [%] | "
        "speedup | call speedup |\n";
  os << "|------|-----:|---------:|--------:|--------------:|----------:|"
        "--------:|-------------:|\n";
  for (const auto& r : rows) {
    os << "| " << r.mode << " | " << r.utterances << " | "
       << Fixed(r.mean_rtf, 4) << " | " << Fixed(r.std_rtf, 4) << " | "
       << Fixed(r.mean_decoder_calls, 2) << " | "
       << Fixed(100.0 * r.error_rate, 2) << " | "
       << (r.speedup_vs_ar ? Fixed(*r.speedup_vs_ar, 2) + "x" : "-") << " | "
       << (r.call_speedup_vs_ar ? Fixed(*r.call_speedup_vs_ar, 2) + "x" : "-")
       << " |\n";
  }
  return os.str();
}

}  // namespace pardec
