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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Oracles here are plain integer arithmetic
// written independently of the library.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "dspslp/analysis.h"
#include "dspslp/ddg.h"
#include "dspslp/dsp_model.h"
#include "dspslp/interp.h"
#include "dspslp/pass_muladd.h"
#include "dspslp/pipeline.h"
#include "test_util.h"

using namespace dspslp;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

/// Collects the first few failure messages of a criterion.
class Checker {
public:
  void check(bool ok, const std::function<std::string()> &msg) {
    if (ok)
      return;
    ++failures_;
    if (failures_ <= 3)
      notes_ += (notes_.empty() ? "" : "; ") + msg();
  }
  uint64_t failures() const { return failures_; }
  Outcome done(const std::string &summary) const {
    if (failures_ == 0)
      return {true, summary};
    return {false, std::to_string(failures_) + " violation(s): " + notes_};
  }

private:
  uint64_t failures_ = 0;
  std::string notes_;
};

int64_t wrap(int64_t v, unsigned bits) {
  uint64_t m = bits >= 64 ? ~0ull : (1ull << bits) - 1;
  uint64_t u = static_cast<uint64_t>(v) & m;
  if (bits < 64 && (u >> (bits - 1)) & 1)
    return static_cast<int64_t>(u | ~m);
  return static_cast<int64_t>(u);
}

uint64_t field(uint64_t v, unsigned bits) { return v & ((1ull << bits) - 1); }

Function load(const std::string &rel) {
  return parse(testutil::readText(testutil::corpus(rel)));
}

std::vector<fs::path> kernels() {
  std::vector<fs::path> out;
  for (const auto &p : testutil::corpusFiles())
    if (p.parent_path().filename() == "kernels")
      out.push_back(p);
  return out;
}

struct ShellResult {
  int code = -1;
  std::string out;
};

/// Runs the CLI; stderr (statistics, diagnostics) is discarded.
ShellResult shell(const std::string &args) {
  std::string cmd = std::string(DSP_SLP_BIN) + " " + args + " 2>/dev/null";
  ShellResult r;
  FILE *p = popen(cmd.c_str(), "r");
  if (!p)
    return r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0)
    r.out.append(buf, n);
  int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

// Accumulator word of a factor-2 cascade, computed from scratch.
uint64_t madWord(const std::vector<int64_t> &a, const std::vector<int64_t> &b,
                 const std::vector<int64_t> &c) {
  __int128 acc = 0;
  for (size_t i = 0; i < a.size(); ++i)
    acc += (static_cast<__int128>(a[i]) * (1 << 18) + b[i]) * c[i];
  return static_cast<uint64_t>(acc) & ((1ull << 48) - 1);
}

//===----------------------------------------------------------------------===//
// Criteria
//===----------------------------------------------------------------------===//

Outcome chainBound() {
  Checker ck;
  uint64_t cap = dsp::maxChainLen(8, 8, true);
  ck.check(cap == 7, [&] { return "maxChainLen(8,8,signed)=" + std::to_string(cap); });

  // Search uniform extreme operand sets for a length that breaks extraction.
  const int64_t vals[] = {-128, -127, -1, 0, 1, 127};
  auto breaks = [&](unsigned n, std::string *witness) {
    for (int64_t a : vals)
      for (int64_t b : vals)
        for (int64_t c : vals) {
          std::vector<int64_t> as(n, a), bs(n, b), cs(n, c);
          dsp::MadChainParams p{8, 8, true, n};
          auto [hi, lo] = dsp::madChainExtract({madWord(as, bs, cs)}, p);
          if (hi != a * c * n || lo != b * c * n) {
            if (witness)
              *witness = "a=" + std::to_string(a) + " b=" + std::to_string(b) +
                         " c=" + std::to_string(c);
            return true;
          }
        }
    return false;
  };
  std::string witness;
  bool at8 = breaks(8, &witness);
  ck.check(at8, [] { return "no witness at N=8"; });
  ck.check(!breaks(7, nullptr), [] { return "extreme set breaks N=7"; });
  ck.check(dsp::maxChainLen(8, 8, false) == 4 &&
               dsp::maxChainLen(1, 1, false) == 262143,
           [] { return "unsigned bounds"; });
  return ck.done("cap=7, N=8 witness {" + witness + "} x8");
}

Outcome quad4Exhaustive() {
  Checker ck;
  uint64_t n = 0;
  for (bool bSigned : {true, false})
    for (int64_t b = bSigned ? -8 : 0; b <= (bSigned ? 7 : 15); ++b)
      for (unsigned code = 0; code < (1u << 16); ++code) {
        std::array<int64_t, 4> a{code & 15, (code >> 4) & 15,
                                 (code >> 8) & 15, (code >> 12) & 15};
        dsp::Quad4Result r = dsp::quad4Pack(a, b, bSigned);
        auto got = dsp::quad4Extract(r.dspOut, r.lutFix, bSigned);
        ++n;
        for (unsigned i = 0; i < 4; ++i)
          ck.check(got[i] == a[i] * b, [&] {
            return "b=" + std::to_string(b) + " a" + std::to_string(i) + "=" +
                   std::to_string(a[i]);
          });
      }
  return ck.done(std::to_string(n) + " combinations, zero failures");
}

Outcome factor2Oracle() {
  Checker ck;
  uint64_t n = 0;
  // Exhaustive over 4-bit operands, chains of one and two stages.
  for (bool sg : {true, false}) {
    int64_t lo = sg ? -8 : 0, hi = sg ? 7 : 15;
    for (int64_t a0 = lo; a0 <= hi; ++a0)
      for (int64_t b0 = lo; b0 <= hi; ++b0)
        for (int64_t c0 = lo; c0 <= hi; ++c0) {
          dsp::MadChainParams p1{4, 4, sg, 1};
          auto w = dsp::madChainPack(std::vector{a0}, std::vector{b0},
                                     std::vector{c0}, p1);
          auto [x, y] = dsp::madChainExtract(w, p1);
          ++n;
          ck.check(x == a0 * c0 && y == b0 * c0, [&] { return "4-bit L=1"; });
          for (int64_t a1 = lo; a1 <= hi; ++a1)
            for (int64_t b1 = lo; b1 <= hi; ++b1)
              for (int64_t c1 = lo; c1 <= hi; ++c1) {
                dsp::MadChainParams p2{4, 4, sg, 2};
                auto w2 = dsp::madChainPack(std::vector{a0, a1},
                                            std::vector{b0, b1},
                                            std::vector{c0, c1}, p2);
                auto [x2, y2] = dsp::madChainExtract(w2, p2);
                ++n;
                ck.check(x2 == a0 * c0 + a1 * c1 && y2 == b0 * c0 + b1 * c1,
                         [&] { return "4-bit L=2"; });
              }
        }
  }
  // Seeded random 8-bit chains up to the cap (7 signed, 4 unsigned).
  std::mt19937_64 rng(20240601);
  for (bool sg : {true, false}) {
    unsigned cap = static_cast<unsigned>(std::min<uint64_t>(7, dsp::maxChainLen(8, 8, sg)));
    std::uniform_int_distribution<int64_t> val(sg ? -128 : 0, sg ? 127 : 255);
    std::uniform_int_distribution<unsigned> len(1, cap);
    for (int t = 0; t < 1'000'000; ++t) {
      unsigned l = len(rng);
      std::vector<int64_t> a(l), b(l), c(l);
      int64_t sa = 0, sb = 0;
      for (unsigned i = 0; i < l; ++i) {
        a[i] = val(rng), b[i] = val(rng), c[i] = val(rng);
        sa += a[i] * c[i];
        sb += b[i] * c[i];
      }
      dsp::MadChainParams p{8, 8, sg, l};
      auto [x, y] = dsp::madChainExtract(dsp::madChainPack(a, b, c, p), p);
      ++n;
      ck.check(x == sa && y == sb, [&] {
        return std::string(sg ? "signed" : "unsigned") + " L=" + std::to_string(l);
      });
    }
  }
  return ck.done(std::to_string(n) + " chains exact");
}

Outcome simdOracle() {
  Checker ck;
  uint64_t n = 0;
  auto one = [&](dsp::SimdAddMode m, const std::vector<int64_t> &x,
                 const std::vector<int64_t> &y, bool sub) {
    unsigned w = dsp::laneWidth(m);
    auto got = dsp::simdAdd(m, x, y, sub);
    ++n;
    for (size_t i = 0; i < x.size(); ++i) {
      uint64_t want = field(static_cast<uint64_t>(sub ? x[i] - y[i] : x[i] + y[i]), w);
      ck.check(got[i] == want, [&] {
        return "w=" + std::to_string(w) + " lane " + std::to_string(i) + " " +
               std::to_string(x[i]) + (sub ? "-" : "+") + std::to_string(y[i]);
      });
    }
    return got;
  };

  std::mt19937_64 rng(777);
  for (auto m : {dsp::SimdAddMode::Four12, dsp::SimdAddMode::Two24}) {
    unsigned w = dsp::laneWidth(m), k = dsp::lanes(m);
    int64_t lo = -(int64_t{1} << (w - 1)), hi = (int64_t{1} << w) - 1;
    std::uniform_int_distribution<int64_t> val(lo, hi);
    std::uniform_int_distribution<unsigned> bit(0, w - 1), lane(0, k - 1);
    for (int t = 0; t < 1'000'000; ++t) {
      std::vector<int64_t> x(k), y(k);
      for (unsigned i = 0; i < k; ++i)
        x[i] = val(rng), y[i] = val(rng);
      bool sub = t & 1;
      auto base = one(m, x, y, sub);
      // Flipping a bit of one lane leaves every other lane untouched.
      if (t % 4 < 2) {
        unsigned j = lane(rng);
        x[j] = wrap(x[j] ^ (int64_t{1} << bit(rng)), w);
        auto flip = dsp::simdAdd(m, x, y, sub);
        for (unsigned i = 0; i < k; ++i)
          ck.check(i == j || flip[i] == base[i],
                   [&] { return "bit flip in lane " + std::to_string(j) + " leaked"; });
      }
    }
    // Corners, combined across every lane.
    const std::vector<int64_t> corners{lo, lo + 1, -1, 0, 1, -lo - 1, -lo, hi};
    std::vector<size_t> idx(2 * k, 0);
    while (true) {
      std::vector<int64_t> x(k), y(k);
      for (unsigned i = 0; i < k; ++i)
        x[i] = corners[idx[i]], y[i] = corners[idx[k + i]];
      one(m, x, y, false);
      one(m, x, y, true);
      size_t d = 0;
      while (d < idx.size() && ++idx[d] == corners.size())
        idx[d++] = 0;
      if (d == idx.size())
        break;
    }
  }
  return ck.done(std::to_string(n) + " word ops, zero violations");
}

Outcome fig3Reproduction() {
  Checker ck;
  Function f = load("kernels/fig3.sir");
  MuladdPass pass(MuladdConfig{8, {}});
  auto cands = pass.getCandidates(f);
  ck.check(cands.size() == 2, [] { return "expected two candidates"; });
  if (cands.size() == 2) {
    Function work = f;
    ck.check(!intervalsIntersect(candidateInterval(work, cands[0]),
                                 candidateInterval(work, cands[1])),
             [] { return "intervals intersect before ALAP"; });
    for (const Candidate &c : cands)
      moveUsesALAP(work, c);
    ck.check(intervalsIntersect(candidateInterval(work, cands[0]),
                                candidateInterval(work, cands[1])),
             [] { return "intervals disjoint after ALAP"; });
  }
  Function packed = f;
  runOnBasicBlock(packed, pass);
  size_t calls = 0, muls = 0;
  for (const Instruction &i : packed.body) {
    calls += i.op == Opcode::Call && i.callee == "silvia.mul2x8";
    muls += i.op == Opcode::Mul;
  }
  ck.check(calls == 1 && muls == 0, [&] {
    return std::to_string(calls) + " calls, " + std::to_string(muls) + " muls";
  });
  ShellResult out = shell("pack " + testutil::corpus("kernels/fig3.sir").string() +
                          " --passes muladd:8");
  ck.check(out.code == 0 &&
               out.out == testutil::readText(testutil::corpus("golden/fig3.packed.sir")),
           [] { return "output differs from golden snapshot"; });
  ShellResult v = shell("verify " + testutil::corpus("kernels/fig3.sir").string() +
                        " " + testutil::corpus("golden/fig3.packed.sir").string() +
                        " --trials 1000");
  ck.check(v.code == 0, [&] { return "verify exit " + std::to_string(v.code); });
  return ck.done("1 mul2x8, 0 mul, golden match, verify exit 0");
}

Outcome packingRatios() {
  Checker ck;
  struct Case {
    const char *kernel, *passes;
    unsigned before, after;
  };
  std::string summary;
  for (const Case &c : {Case{"mvm64", "muladd:8", 64, 32},
                        Case{"mmm4b", "muladd:4", 64, 16},
                        Case{"vadd", "add:12", 32, 8}}) {
    Function f = load(std::string("kernels/") + c.kernel + ".sir");
    StatsReport r = runPipeline(f, PipelineConfig::parse(c.passes));
    ck.check(r.unitsBefore == c.before && r.unitsAfter == c.after, [&] {
      return std::string(c.kernel) + " " + std::to_string(r.unitsBefore) +
             "->" + std::to_string(r.unitsAfter);
    });
    summary += (summary.empty() ? "" : ", ") + std::string(c.kernel) + " " +
               std::to_string(r.unitsBefore) + "->" + std::to_string(r.unitsAfter);
    if (std::string(c.kernel) == "vadd") {
      double d = r.density().value_or(0);
      ck.check(d == 4.0, [&] { return "vadd density " + std::to_string(d); });
      summary += " density " + std::to_string(d).substr(0, 4);
    }
  }
  return ck.done(summary);
}

DepGraph randomGraph(std::mt19937_64 &rng) {
  DepGraph g;
  size_t n = std::uniform_int_distribution<size_t>(1, 12)(rng);
  for (size_t i = 0; i < n; ++i)
    g.addNode(std::uniform_int_distribution<unsigned>(0, 6)(rng));
  size_t m = std::uniform_int_distribution<size_t>(0, 3 * n)(rng);
  std::uniform_int_distribution<size_t> pick(0, n - 1);
  for (size_t k = 0; k < m; ++k) {
    size_t s = pick(rng), d = pick(rng);
    unsigned dist = std::uniform_int_distribution<unsigned>(0, 3)(rng);
    if (dist == 0 && s >= d)
      dist = 1;
    g.addEdge(s, d, dist);
  }
  return g;
}

Outcome iiDiagnostics() {
  Checker ck;
  Function f = load("edge/fig4.sir");
  MuladdPass pass(MuladdConfig{8, {}});
  std::vector<Candidate> cands = pass.getCandidates(f);
  for (const Candidate &c : cands)
    moveUsesALAP(f, c);
  DepGraph g = buildDepGraph(f);
  unsigned base = minII(g).minII, packed = 0;
  ck.check(base == 2 && minIIByEnumeration(g).minII == 2,
           [&] { return "fig4 minII " + std::to_string(base); });
  for (const Tuple &t : getTuples(f, cands, pass)) {
    if (!pass.isTupleFull(t))
      continue;
    std::vector<InstId> ids;
    for (const Candidate &c : t.members)
      ids.insert(ids.end(), c.members.begin(), c.members.end());
    CycleReport r = packedMinII(g, nodesOf(g, ids));
    packed = r.packedMinII;
    ck.check(r.introducedCritical, [] { return "fig4 pair not flagged"; });
  }
  ck.check(packed == 3, [&] { return "fig4 packed minII " + std::to_string(packed); });

  for (const fs::path &k : kernels())
    for (const char *extra : {"", " --passes muladd:4,muladd:8,add:12,add:24,sub:12,sub:24"}) {
      ShellResult r = shell("ddg " + k.string() + extra);
      ck.check(r.code == 0 && r.out.find("II-RAISED") == std::string::npos &&
                   r.out.find("no tuple raises II") != std::string::npos,
               [&] { return k.filename().string() + " reports a raise"; });
    }

  std::mt19937_64 rng(4242);
  unsigned cyclic = 0;
  for (int t = 0; t < 500; ++t) {
    DepGraph rg = randomGraph(rng);
    MinIIResult a = minII(rg), b = minIIByEnumeration(rg);
    cyclic += !a.criticalCycle.empty();
    ck.check(a.minII == b.minII, [&] {
      return "graph " + std::to_string(t) + ": " + std::to_string(a.minII) +
             " vs " + std::to_string(b.minII);
    });
  }
  return ck.done("fig4 " + std::to_string(base) + "->" + std::to_string(packed) +
                 ", corpus no raise, 500 graphs agree (" +
                 std::to_string(cyclic) + " cyclic)");
}

const std::vector<std::string> &pipelines() {
  static const std::vector<std::string> p{
      "--passes add:12",
      "--passes add:24",
      "--passes sub:12",
      "--passes sub:24",
      "--passes muladd:4",
      "--passes muladd:8",
      "--passes muladd:8 --max-chain-len 3",
      "--preset paper",
      "--passes add:12,add:24",
      "--passes sub:24,sub:12",
      "--passes muladd:8,muladd:4",
      "--passes muladd:4,muladd:8,add:12,add:24,sub:12,sub:24"};
  return p;
}

Outcome endToEnd() {
  Checker ck;
  unsigned runs = 0;
  fs::path out = fs::temp_directory_path() /
                 ("dsp_slp_accept_" + std::to_string(getpid()) + ".sir");
  for (const fs::path &k : testutil::corpusFiles())
    for (const std::string &p : pipelines()) {
      ShellResult pk = shell("pack " + k.string() + " " + p + " -o " + out.string());
      ck.check(pk.code == 0, [&] {
        return k.filename().string() + " " + p + ": pack exit " + std::to_string(pk.code);
      });
      if (pk.code != 0)
        continue;
      ShellResult v = shell("verify " + k.string() + " " + out.string() +
                            " --trials 1000");
      ++runs;
      ck.check(v.code == 0, [&] {
        return k.filename().string() + " " + p + ": verify exit " +
               std::to_string(v.code);
      });
    }
  fs::remove(out);
  return ck.done(std::to_string(runs) + " kernel x pipeline runs verified");
}

Outcome legality() {
  Checker ck;
  unsigned runs = 0;
  for (const fs::path &k : testutil::corpusFiles()) {
    Function orig = parse(testutil::readText(k));
    std::vector<PipelineConfig> cfgs{PipelineConfig::preset(orig)};
    for (const char *s : {"add:12", "add:24", "sub:12", "sub:24", "muladd:4",
                          "muladd:8", "muladd:4,muladd:8,add:12,add:24,sub:12,sub:24"})
      cfgs.push_back(PipelineConfig::parse(s));
    cfgs.push_back(PipelineConfig::parse("muladd:8", 3u));
    for (const PipelineConfig &cfg : cfgs) {
      Function f = orig;
      for (const PassSpec &spec : cfg.passes) {
        runOnBasicBlock(f, *makePass(spec, cfg.maxChainLen));
        auto diags = validate(f);
        ck.check(diags.empty(), [&] {
          return k.filename().string() + " after " + spec.str() + ": " +
                 diags.front().message;
        });
      }
      StatsReport again = runPipeline(f, cfg);
      for (const PassRow &r : again.rows)
        ck.check(r.stats.tuples == 0, [&] {
          return k.filename().string() + " " + r.stats.pass + " packs again";
        });
      ++runs;
    }
  }
  return ck.done(std::to_string(runs) + " runs clean and idempotent");
}

} // namespace

int main() {
  struct Criterion {
    const char *name;
    Outcome (*fn)();
  };
  const Criterion criteria[] = {
      {"chain bound", chainBound},
      {"factor-4 exhaustive oracle", quad4Exhaustive},
      {"factor-2 oracle", factor2Oracle},
      {"SIMD add oracle", simdOracle},
      {"fig3 pipeline reproduction", fig3Reproduction},
      {"packing-ratio analogues", packingRatios},
      {"II diagnostics", iiDiagnostics},
      {"end-to-end semantic preservation", endToEnd},
      {"legality and idempotence", legality},
  };
  int failed = 0;
  for (size_t i = 0; i < std::size(criteria); ++i) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].fn();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %zu %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
