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

#include "dspslp/pipeline.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dspslp/pass_add.h"
#include "dspslp/pass_muladd.h"

namespace dspslp {
namespace {

unsigned candidateOps(std::span<const Candidate> cands) {
  unsigned n = 0;
  for (const Candidate &c : cands)
    n += c.opCount();
  return n;
}

} // namespace

std::string PassSpec::str() const {
  const char *name = op == Op::Add ? "add" : op == Op::Sub ? "sub" : "muladd";
  return std::string(name) + ":" + std::to_string(opSize);
}

PipelineConfig PipelineConfig::parse(std::string_view passes,
                                     std::optional<unsigned> maxChainLen) {
  if (maxChainLen && *maxChainLen == 0)
    throw ConfigError("--max-chain-len must be at least 1");
  PipelineConfig cfg;
  cfg.maxChainLen = maxChainLen;
  while (!passes.empty()) {
    size_t comma = passes.find(',');
    std::string_view item = passes.substr(0, comma);
    passes = comma == std::string_view::npos ? std::string_view{}
                                             : passes.substr(comma + 1);
    while (!item.empty() && item.front() == ' ')
      item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ')
      item.remove_suffix(1);

    size_t colon = item.find(':');
    if (colon == std::string_view::npos)
      throw ConfigError("pass '" + std::string(item) + "' is not op:size");
    std::string_view op = item.substr(0, colon);
    std::string_view size = item.substr(colon + 1);
    PassSpec spec;
    auto [p, ec] =
        std::from_chars(size.data(), size.data() + size.size(), spec.opSize);
    if (ec != std::errc() || p != size.data() + size.size())
      throw ConfigError("bad size in pass '" + std::string(item) + "'");
    if (op == "add" || op == "sub") {
      spec.op = op == "add" ? PassSpec::Op::Add : PassSpec::Op::Sub;
      if (spec.opSize != 12 && spec.opSize != 24)
        throw ConfigError(std::string(op) + " supports sizes 12 and 24");
    } else if (op == "muladd") {
      spec.op = PassSpec::Op::Muladd;
      if (spec.opSize != 4 && spec.opSize != 8)
        throw ConfigError("muladd supports sizes 4 and 8");
    } else {
      throw ConfigError("unknown pass '" + std::string(op) + "'");
    }
    cfg.passes.push_back(spec);
  }
  if (cfg.passes.empty())
    throw ConfigError("empty pass list");
  return cfg;
}

PipelineConfig PipelineConfig::preset(const Function &f,
                                      std::optional<unsigned> maxChainLen) {
  bool hasMul = std::any_of(f.body.begin(), f.body.end(),
                            [](const Instruction &i) {
                              return i.op == Opcode::Mul;
                            });
  return parse(hasMul ? "muladd:4,muladd:8" : "add:12,add:24", maxChainLen);
}

std::unique_ptr<PackingPass> makePass(const PassSpec &spec,
                                      std::optional<unsigned> maxChainLen) {
  if (spec.op == PassSpec::Op::Muladd)
    return std::make_unique<MuladdPass>(MuladdConfig{spec.opSize, maxChainLen});
  AddPassConfig cfg;
  cfg.mode = spec.opSize == 12 ? dsp::SimdAddMode::Four12
                               : dsp::SimdAddMode::Two24;
  cfg.inst = spec.op == PassSpec::Op::Sub ? Opcode::Sub : Opcode::Add;
  return std::make_unique<AddPass>(cfg);
}

StatsReport runPipeline(Function &f, const PipelineConfig &cfg) {
  StatsReport report;
  std::vector<std::unique_ptr<PackingPass>> passes;
  for (const PassSpec &spec : cfg.passes)
    passes.push_back(makePass(spec, cfg.maxChainLen));

  unsigned packedOps = 0, packedUnits = 0;
  for (const auto &pass : passes) {
    PassRow row;
    row.stats = runOnBasicBlock(f, *pass);
    row.leftover = candidateOps(pass->getCandidates(f));
    packedOps += row.stats.packedOps;
    packedUnits += row.stats.units;
    report.rows.push_back(row);
  }

  // Scalar ops any pass of the pipeline could still take, counted once.
  std::set<InstId> leftover;
  for (const auto &pass : passes)
    for (const Candidate &c : pass->getCandidates(f))
      leftover.insert(c.leaves.begin(), c.leaves.end());

  const unsigned rest = static_cast<unsigned>(leftover.size());
  report.ops = packedOps + rest;
  report.unitsBefore = report.ops;
  report.unitsAfter = packedUnits + rest;
  return report;
}

std::optional<double> StatsReport::density() const {
  if (ops == 0 || unitsAfter == 0)
    return std::nullopt;
  return static_cast<double>(ops) / unitsAfter;
}

std::string StatsReport::text() const {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %6s %6s %6s %6s %6s %6s %8s\n",
                "pass", "cands", "ops", "tuples", "calls", "units", "packed",
                "leftover");
  os << line;
  for (const PassRow &r : rows) {
    const PassStats &s = r.stats;
    std::snprintf(line, sizeof line, "%-10s %6u %6u %6u %6u %6u %6u %8u\n",
                  s.pass.c_str(), s.candidates, s.opsMatched, s.tuples,
                  s.calls, s.units, s.packedOps, r.leftover);
    os << line;
  }
  os << "ops=" << ops << " units " << unitsBefore << " -> " << unitsAfter
     << " density=";
  if (auto d = density()) {
    std::snprintf(line, sizeof line, "%.2f", *d);
    os << line;
  } else {
    os << "n/a";
  }
  os << "\n";
  return os.str();
}

std::string StatsReport::json() const {
  nlohmann::ordered_json j;
  j["passes"] = nlohmann::ordered_json::array();
  for (const PassRow &r : rows) {
    const PassStats &s = r.stats;
    j["passes"].push_back({{"pass", s.pass},
                           {"candidates", s.candidates},
                           {"ops_matched", s.opsMatched},
                           {"tuples", s.tuples},
                           {"calls", s.calls},
                           {"units", s.units},
                           {"packed_ops", s.packedOps},
                           {"unequal_pairs", s.unequalPairs},
                           {"leftover", r.leftover}});
  }
  j["ops"] = ops;
  j["units_before"] = unitsBefore;
  j["units_after"] = unitsAfter;
  if (auto d = density())
    j["density"] = *d;
  else
    j["density"] = nullptr;
  return j.dump(2) + "\n";
}

} // namespace dspslp
