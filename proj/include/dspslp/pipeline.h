// Copyright 2026 The dsp-slp Authors
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

//===----------------------------------------------------------------------===//
//
// Ordered pass pipelines and packing statistics.
//
// A unit is one DSP slice: a SIMD add call or a factor-4 call is one unit, a
// cascade of L multiply-add stages is L units, and every packable scalar op
// left over is one unit of its own.
//
//===----------------------------------------------------------------------===//

#ifndef DSPSLP_PIPELINE_H_
#define DSPSLP_PIPELINE_H_

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dspslp/pass.h"

namespace dspslp {

class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct PassSpec {
  enum class Op { Add, Sub, Muladd };
  Op op = Op::Add;
  /// 12 or 24 for add/sub, 4 or 8 for muladd.
  unsigned opSize = 12;

  std::string str() const;
  bool operator==(const PassSpec &) const = default;
};

struct PipelineConfig {
  std::vector<PassSpec> passes;
  std::optional<unsigned> maxChainLen;

  /// Comma-separated `op:size` list, e.g. "muladd:4,muladd:8".
  static PipelineConfig parse(std::string_view passes,
                              std::optional<unsigned> maxChainLen = {});
  /// muladd:4,muladd:8 for kernels with multiplications, else add:12,add:24.
  static PipelineConfig preset(const Function &f,
                               std::optional<unsigned> maxChainLen = {});
};

std::unique_ptr<PackingPass> makePass(const PassSpec &spec,
                                      std::optional<unsigned> maxChainLen);

struct PassRow {
  PassStats stats;
  /// Candidate ops of this pass still scalar right after it ran.
  unsigned leftover = 0;
};

struct StatsReport {
  std::vector<PassRow> rows;
  /// Packable ops: packed ones plus the ones left scalar at the end.
  unsigned ops = 0;
  unsigned unitsBefore = 0;
  unsigned unitsAfter = 0;

  /// ops / unitsAfter, or nothing when there is nothing to pack.
  std::optional<double> density() const;
  std::string text() const;
  std::string json() const;
};

/// Runs the passes in order on `f`, in place.
StatsReport runPipeline(Function &f, const PipelineConfig &cfg);

} // namespace dspslp

#endif // DSPSLP_PIPELINE_H_
