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
// dsp-slp: pack, verify and analyze `.sir` kernels.
//
// Exit codes: 0 ok, 1 input error, 2 bad configuration, 3 invalid pass
// output, 4 verification mismatch, 5 zero-distance dependence cycle.
//
//===----------------------------------------------------------------------===//

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "dspslp/ddg.h"
#include "dspslp/interp.h"
#include "dspslp/ir.h"
#include "dspslp/pipeline.h"

using namespace dspslp;

namespace {

enum ExitCode {
  kOk = 0,
  kInputError = 1,
  kConfigError = 2,
  kInvalidOutput = 3,
  kMismatch = 4,
  kZeroDistanceCycle = 5,
};

/// Thrown for unreadable files; reported like parse errors.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string readFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void writeFile(const std::string &path, const std::string &text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text))
    throw InputError("cannot write " + path);
}

Function load(const std::string &path) {
  std::string text = readFile(path);
  try {
    return parse(text);
  } catch (const ParseError &e) {
    throw InputError(path + ":" + std::to_string(e.line()) + ":" +
                     std::to_string(e.col()) + ": " + e.what());
  }
}

PipelineConfig configFor(const Function &f, const std::string &passes,
                         const std::string &preset,
                         std::optional<unsigned> maxChainLen) {
  if (!preset.empty()) {
    if (preset != "paper")
      throw ConfigError("unknown preset '" + preset + "'");
    if (!passes.empty())
      throw ConfigError("--passes and --preset are exclusive");
    return PipelineConfig::preset(f, maxChainLen);
  }
  if (passes.empty())
    throw ConfigError("one of --passes or --preset is required");
  return PipelineConfig::parse(passes, maxChainLen);
}

std::optional<unsigned> chainLen(int v) {
  if (v < 0)
    return std::nullopt;
  return static_cast<unsigned>(v);
}

LatencyTable parseLatencies(const std::string &spec) {
  LatencyTable table = defaultLatencies();
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty())
      continue;
    size_t eq = item.find('=');
    if (eq == std::string::npos)
      throw ConfigError("latency override '" + item + "' is not op=N");
    std::string op = item.substr(0, eq);
    bool known = false;
    for (auto &[code, lat] : table)
      if (opcodeName(code) == op) {
        try {
          int v = std::stoi(item.substr(eq + 1));
          if (v < 0)
            throw std::out_of_range("negative");
          lat = static_cast<unsigned>(v);
        } catch (const std::logic_error &) {
          throw ConfigError("bad latency in '" + item + "'");
        }
        known = true;
      }
    if (!known)
      throw ConfigError("unknown opcode '" + op + "' in latency override");
  }
  return table;
}

std::string cycleText(const DepGraph &g, const std::vector<size_t> &cycle) {
  if (cycle.empty())
    return "none";
  std::string s;
  for (size_t v : cycle)
    s += g.labels[v] + " -> ";
  return s + g.labels[cycle.front()];
}

int cmdPack(const std::string &in, const std::string &out,
            const std::string &passes, const std::string &preset, int maxChain,
            const std::string &statsJson) {
  Function f = load(in);
  PipelineConfig cfg = configFor(f, passes, preset, chainLen(maxChain));
  StatsReport report = runPipeline(f, cfg);
  writeFile(out, print(f));
  (out == "-" ? std::cerr : std::cout) << report.text();
  if (!statsJson.empty())
    writeFile(statsJson, report.json());
  return kOk;
}

uint64_t defaultSeed() {
  if (const char *env = std::getenv("DSP_SLP_SEED"))
    return std::strtoull(env, nullptr, 10);
  return 42;
}

int cmdVerify(const std::string &a, const std::string &b, unsigned trials,
              std::optional<uint64_t> seed) {
  Function fa = load(a), fb = load(b);
  uint64_t s = seed ? *seed : defaultSeed();
  Equivalence eq = equivalent(fa, fb, trials, s);
  if (eq.equal) {
    std::cout << "equivalent (" << eq.trials << " environments, seed " << s
              << ")\n";
    return kOk;
  }
  std::cout << "MISMATCH after " << eq.trials << " environments (seed " << s
            << ")\n--- counterexample\n"
            << printEnv(*eq.counterexample) << "--- " << a << "\n"
            << eq.lhsReport << "--- " << b << "\n"
            << eq.rhsReport;
  return kMismatch;
}

int cmdDdg(const std::string &in, const std::string &latency,
           const std::string &passes, const std::string &preset,
           int maxChain) {
  Function f = load(in);
  const LatencyTable lat = parseLatencies(latency);
  PipelineConfig cfg =
      configFor(f, passes, preset.empty() && passes.empty() ? "paper" : preset,
                chainLen(maxChain));

  DepGraph g = buildDepGraph(f, lat);
  MinIIResult base = minII(g);
  std::cout << "minII=" << base.minII << "\n"
            << "critical cycle: " << cycleText(g, base.criticalCycle) << "\n";

  bool raised = false;
  for (const PassSpec &spec : cfg.passes) {
    auto pass = makePass(spec, cfg.maxChainLen);
    Function work = f;
    std::vector<Candidate> cands = pass->getCandidates(work);
    for (const Candidate &c : cands)
      moveUsesALAP(work, c);
    DepGraph wg = buildDepGraph(work, lat);
    for (const Tuple &t : getTuples(work, cands, *pass)) {
      if (!pass->isTupleFull(t))
        continue;
      std::vector<InstId> ids;
      for (const Candidate &c : t.members)
        ids.insert(ids.end(), c.members.begin(), c.members.end());
      std::set<size_t> nodes = nodesOf(wg, ids);
      CycleReport r = packedMinII(wg, nodes);
      std::string names;
      for (const Candidate &c : t.members)
        names += (names.empty() ? "" : ",") +
                 wg.labels[*nodesOf(wg, {c.root}).begin()];
      std::cout << spec.str() << " pack{" << names << "} minII=" << r.packedMinII
                << (r.introducedCritical ? " II-RAISED" : "") << "\n";
      raised |= r.introducedCritical;
    }
    runOnBasicBlock(f, *pass);
  }
  if (!raised)
    std::cout << "no tuple raises II\n";
  return kOk;
}

int cmdRun(const std::string &in, const std::string &envPath) {
  Function f = load(in);
  Env env = parseEnv(readFile(envPath));
  std::cout << printObservation(run(f, env));
  return kOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Packs narrow arithmetic of .sir kernels into DSP calls"};
  app.require_subcommand(1);

  std::string in, out = "-", passes, preset, statsJson;
  int maxChain = -1;
  auto *pack = app.add_subcommand("pack", "run a pass pipeline");
  pack->add_option("input", in, "input .sir")->required();
  pack->add_option("-o,--output", out, "output .sir ('-' for stdout)");
  pack->add_option("--passes", passes, "ordered passes, e.g. muladd:4,muladd:8");
  pack->add_option("--preset", preset, "named pipeline ('paper')");
  pack->add_option("--max-chain-len", maxChain, "cap on MAD cascade length");
  pack->add_option("--stats-json", statsJson, "write statistics as JSON");

  std::string lhs, rhs;
  unsigned trials = 1000;
  std::optional<uint64_t> seed;
  auto *verify = app.add_subcommand("verify", "check two kernels agree");
  verify->add_option("original", lhs)->required();
  verify->add_option("packed", rhs)->required();
  verify->add_option("--trials", trials, "random environments");
  verify->add_option("--seed", seed, "RNG seed (default $DSP_SLP_SEED or 42)");

  std::string latency;
  auto *ddg = app.add_subcommand("ddg", "minimum II and packing diagnostics");
  ddg->add_option("input", in)->required();
  ddg->add_option("--latency", latency, "overrides, e.g. mul=3,load=2");
  ddg->add_option("--passes", passes, "passes whose tuples are checked");
  ddg->add_option("--preset", preset, "named pipeline (default 'paper')");
  ddg->add_option("--max-chain-len", maxChain, "cap on MAD cascade length");

  std::string envPath;
  auto *runCmd = app.add_subcommand("run", "interpret a kernel");
  runCmd->add_option("input", in)->required();
  runCmd->add_option("--env", envPath, "input values")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*pack)
      return cmdPack(in, out, passes, preset, maxChain, statsJson);
    if (*verify)
      return cmdVerify(lhs, rhs, trials, seed);
    if (*ddg)
      return cmdDdg(in, latency, passes, preset, maxChain);
    if (*runCmd)
      return cmdRun(in, envPath);
  } catch (const InputError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const ConfigError &e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const PassError &e) {
    std::cerr << "pass error: " << e.what() << "\n";
    return kInvalidOutput;
  } catch (const DdgError &e) {
    std::cerr << "ddg error: " << e.what() << "\n";
    return e.kind() == DdgError::Kind::ZeroDistanceCycle ? kZeroDistanceCycle
                                                         : kInputError;
  } catch (const InterpError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kOk;
}
