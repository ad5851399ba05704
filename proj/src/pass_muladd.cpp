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

#include "dspslp/pass_muladd.h"

#include <algorithm>
#include <functional>
#include <map>

namespace dspslp {
namespace {

constexpr unsigned kMadLaneBits = 32;
constexpr unsigned kQuadLaneBits = 16;

const Instruction &instOf(const Function &f, InstId id) {
  return f.body[f.indexOf(id)];
}

/// The operand of `mul` other than the one named `shared`.
const Operand &otherOperand(const Instruction &mul, const std::string &shared) {
  return mul.operands[0].name == shared ? mul.operands[1] : mul.operands[0];
}

} // namespace

std::vector<LeafPair> matchLeaves(const Function &f, const Candidate &A,
                                  const Candidate &B) {
  std::vector<LeafPair> pairs;
  std::vector<bool> taken(B.leaves.size(), false);
  for (InstId la : A.leaves) {
    const Instruction &ma = instOf(f, la);
    bool matched = false;
    for (size_t j = 0; j < B.leaves.size() && !matched; ++j) {
      if (taken[j])
        continue;
      const Instruction &mb = instOf(f, B.leaves[j]);
      for (unsigned p = 0; p < 2 && !matched; ++p)
        for (unsigned q = 0; q < 2 && !matched; ++q) {
          if (ma.operands[p].name != mb.operands[q].name)
            continue;
          pairs.push_back({la, B.leaves[j], ma.operands[1 - p],
                           mb.operands[1 - q], ma.operands[p]});
          taken[j] = true;
          matched = true;
        }
    }
  }
  return pairs;
}

dsp::MadChainParams madParamsFor(std::span<const Type> abTypes,
                                 std::span<const Type> cTypes,
                                 unsigned length) {
  auto anySigned = [](std::span<const Type> ts) {
    return std::any_of(ts.begin(), ts.end(),
                       [](Type t) { return t.isSigned(); });
  };
  dsp::MadChainParams p;
  p.signedProduct = anySigned(abTypes) || anySigned(cTypes);
  auto widest = [&](std::span<const Type> ts) {
    unsigned w = 1;
    for (Type t : ts)
      w = std::max(w, t.bits + (p.signedProduct && !t.isSigned() ? 1u : 0u));
    return w;
  };
  p.m = widest(abTypes);
  p.n = widest(cTypes);
  p.length = length;
  return p;
}

std::vector<unsigned> balancedChains(unsigned k, unsigned cap) {
  if (k == 0 || cap == 0)
    return {};
  unsigned count = (k + cap - 1) / cap;
  std::vector<unsigned> sizes(count, k / count);
  for (unsigned i = 0; i < k % count; ++i)
    ++sizes[i];
  return sizes;
}

std::string MuladdPass::name() const {
  return "muladd:" + std::to_string(cfg_.opSize);
}

std::vector<Candidate> MuladdPass::getCandidates(const Function &f) const {
  const auto chains = useDefChains(f);
  const size_t n = f.body.size();
  std::vector<int> memo(n, -1);

  auto leafOk = [&](const Instruction &inst) {
    for (const Operand &o : inst.operands)
      if (!o.isValue() || effectiveWidth(f, o.name).type.bits > cfg_.opSize)
        return false;
    return true;
  };
  auto singleUse = [&](const std::string &v) {
    auto it = chains.find(v);
    return it != chains.end() && it->second.uses.size() == 1;
  };

  std::function<bool(size_t)> treeable = [&](size_t i) -> bool {
    if (memo[i] >= 0)
      return memo[i] != 0;
    const Instruction &inst = f.body[i];
    bool ok = false;
    if (inst.op == Opcode::Mul) {
      ok = leafOk(inst);
    } else if (inst.op == Opcode::Add) {
      const Operand &l = inst.operands[0];
      const Operand &r = inst.operands[1];
      ok = l.isValue() && r.isValue() && l.name != r.name;
      for (const Operand *o : {&l, &r}) {
        if (!ok)
          break;
        size_t def = f.defIndex(o->name);
        ok = def != Function::npos && singleUse(o->name) && treeable(def);
      }
    }
    memo[i] = ok ? 1 : 0;
    return ok;
  };

  std::vector<Candidate> out;
  for (size_t i = 0; i < n; ++i) {
    if (!treeable(i))
      continue;
    const Instruction &inst = f.body[i];
    const auto &uses = chains.at(inst.result).uses;
    if (uses.size() == 1) {
      size_t u = static_cast<size_t>(uses.front());
      if (f.body[u].op == Opcode::Add && treeable(u))
        continue; // interior node of a larger tree
    }

    Candidate c;
    c.kind = CandidateKind::MadTree;
    c.root = inst.id;
    std::vector<size_t> stack{i}, members;
    while (!stack.empty()) {
      size_t k = stack.back();
      stack.pop_back();
      members.push_back(k);
      if (f.body[k].op == Opcode::Add)
        for (const Operand &o : f.body[k].operands)
          stack.push_back(f.defIndex(o.name));
    }
    std::sort(members.begin(), members.end());
    c.operandType = Type::u(1);
    for (size_t k : members) {
      c.members.push_back(f.body[k].id);
      if (f.body[k].op != Opcode::Mul)
        continue;
      c.leaves.push_back(f.body[k].id);
      for (const Operand &o : f.body[k].operands) {
        Type t = effectiveWidth(f, o.name).type;
        if (t.bits > c.operandType.bits ||
            (t.bits == c.operandType.bits && t.isSigned()))
          c.operandType = t;
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

unsigned MuladdPass::chainCap(const Function &f,
                              std::span<const LeafPair> pairs) const {
  std::vector<Type> ab, c;
  for (const LeafPair &p : pairs) {
    ab.push_back(effectiveWidth(f, p.a.name).type);
    ab.push_back(effectiveWidth(f, p.b.name).type);
    c.push_back(effectiveWidth(f, p.c.name).type);
  }
  dsp::MadChainParams params = madParamsFor(ab, c, 1);
  uint64_t cap = dsp::maxChainLen(params.m, params.n, params.signedProduct);
  if (cfg_.maxChainLen)
    cap = std::min<uint64_t>(cap, *cfg_.maxChainLen);
  return static_cast<unsigned>(std::min<uint64_t>(cap, 1u << 20));
}

std::optional<std::string>
MuladdPass::sharedFactor(const Function &f,
                         std::span<const Candidate> muls) const {
  if (muls.empty())
    return std::nullopt;
  const Instruction &first = instOf(f, muls.front().root);
  for (const Operand &choice : first.operands) {
    if (effectiveWidth(f, choice.name).type.bits > 4)
      continue;
    bool ok = std::all_of(muls.begin(), muls.end(), [&](const Candidate &m) {
      const Instruction &mul = instOf(f, m.root);
      if (!mul.uses(choice.name))
        return false;
      Type other = effectiveWidth(f, otherOperand(mul, choice.name).name).type;
      return !other.isSigned() && other.bits <= 4;
    });
    if (ok)
      return choice.name;
  }
  return std::nullopt;
}

bool MuladdPass::canPack(const Function &f, const Tuple &t,
                         const Candidate &c) const {
  if (cfg_.opSize == 4) {
    auto single = [](const Candidate &m) { return m.members.size() == 1; };
    if (!single(c) || t.size() >= 4 ||
        !std::all_of(t.members.begin(), t.members.end(), single))
      return false;
    std::vector<Candidate> all = t.members;
    all.push_back(c);
    return sharedFactor(f, all).has_value();
  }
  if (t.size() == 0)
    return true;
  if (t.size() != 1)
    return false;
  auto pairs = matchLeaves(f, t.members.front(), c);
  return !pairs.empty() && chainCap(f, pairs) >= 1;
}

bool MuladdPass::isTupleFull(const Tuple &t) const {
  return t.size() == (cfg_.opSize == 4 ? 4u : 2u);
}

PackResult MuladdPass::packTuple(Function &f, const Tuple &t,
                                 size_t insertAt) const {
  return cfg_.opSize == 4 ? packFactor4(f, t, insertAt)
                          : packFactor2(f, t, insertAt);
}

PackResult MuladdPass::packFactor2(Function &f, const Tuple &t,
                                   size_t insertAt) const {
  const Candidate &A = t.members[0];
  const Candidate &B = t.members[1];
  const std::vector<LeafPair> pairs = matchLeaves(f, A, B);
  const unsigned cap = chainCap(f, pairs);
  const std::vector<unsigned> sizes =
      balancedChains(static_cast<unsigned>(pairs.size()), cap);
  if (sizes.empty())
    throw PassError(PassError::Kind::Internal, "tuple has no packable pair");

  const Type typeA = instOf(f, A.root).type;
  const Type typeB = instOf(f, B.root).type;
  const std::string rootA = instOf(f, A.root).result;
  const std::string rootB = instOf(f, B.root).result;

  // Unmatched products are recomputed next to the packed code.
  std::vector<Instruction> restA, restB;
  for (auto [cand, rest] : {std::pair{&A, &restA}, std::pair{&B, &restB}})
    for (InstId leaf : cand->leaves)
      if (std::none_of(pairs.begin(), pairs.end(), [&](const LeafPair &p) {
            return p.leafA == leaf || p.leafB == leaf;
          }))
        rest->push_back(instOf(f, leaf));

  IrBuilder b(f, insertAt);
  std::map<std::string, std::string> narrowed;
  auto narrow = [&](const Operand &o) {
    auto it = narrowed.find(o.name);
    if (it != narrowed.end())
      return it->second;
    std::string v = b.narrow(o, effectiveWidth(f, o.name));
    narrowed.emplace(o.name, v);
    return v;
  };

  std::vector<std::string> partsA, partsB;
  size_t next = 0;
  for (unsigned len : sizes) {
    Instruction call;
    call.op = Opcode::Call;
    call.type = Type::s(64);
    call.callee = len == 1 ? "silvia.mul2x8"
                           : "silvia.mad2x8.chain" + std::to_string(len);
    std::vector<std::string> as, bs, cs;
    for (unsigned i = 0; i < len; ++i) {
      const LeafPair &p = pairs[next + i];
      as.push_back(narrow(p.a));
      bs.push_back(narrow(p.b));
      cs.push_back(narrow(p.c));
    }
    next += len;
    for (auto *group : {&as, &bs, &cs})
      for (const std::string &v : *group)
        call.operands.push_back(Operand::value(v, *f.typeOf(v)));
    std::string word = b.emit(std::move(call));
    partsA.push_back(b.laneTo(word, kMadLaneBits, kMadLaneBits, true, typeA));
    partsB.push_back(b.laneTo(word, 0, kMadLaneBits, true, typeB));
  }

  auto sum = [&](std::vector<std::string> parts,
                 const std::vector<Instruction> &rest, Type ty) {
    for (Instruction mul : rest)
      parts.push_back(b.emit(std::move(mul)));
    std::string acc = parts.front();
    for (size_t i = 1; i < parts.size(); ++i) {
      Instruction add;
      add.op = Opcode::Add;
      add.type = ty;
      add.operands = {Operand::value(acc, ty), Operand::value(parts[i], ty)};
      acc = b.emit(std::move(add));
    }
    return acc;
  };

  PackResult r;
  r.replacements.emplace_back(rootA, sum(partsA, restA, typeA));
  r.replacements.emplace_back(rootB, sum(partsB, restB, typeB));
  r.calls = static_cast<unsigned>(sizes.size());
  r.units = static_cast<unsigned>(pairs.size());
  r.packedOps = 2 * static_cast<unsigned>(pairs.size());
  r.unequalLeaves = A.leaves.size() != B.leaves.size();
  return r;
}

PackResult MuladdPass::packFactor4(Function &f, const Tuple &t,
                                   size_t insertAt) const {
  std::optional<std::string> shared = sharedFactor(f, t.members);
  if (!shared)
    throw PassError(PassError::Kind::Internal, "tuple lost its common factor");

  std::vector<Instruction> muls;
  for (const Candidate &c : t.members)
    muls.push_back(instOf(f, c.root));

  IrBuilder b(f, insertAt);
  Instruction call;
  call.op = Opcode::Call;
  call.type = Type::s(64);
  call.callee = "silvia.mul4x4";
  for (const Instruction &mul : muls) {
    const Operand &a = otherOperand(mul, *shared);
    std::string v = b.narrow(a, effectiveWidth(f, a.name));
    call.operands.push_back(Operand::value(v, *f.typeOf(v)));
  }
  const Operand &bOp = muls.front().operands[0].name == *shared
                           ? muls.front().operands[0]
                           : muls.front().operands[1];
  std::string bv = b.narrow(bOp, effectiveWidth(f, bOp.name));
  call.operands.push_back(Operand::value(bv, *f.typeOf(bv)));
  std::string word = b.emit(std::move(call));

  PackResult r;
  for (size_t i = 0; i < muls.size(); ++i)
    r.replacements.emplace_back(
        muls[i].result,
        b.laneTo(word, static_cast<unsigned>(i) * kQuadLaneBits, kQuadLaneBits,
                 true, muls[i].type));
  r.calls = 1;
  r.units = 1;
  r.packedOps = 4;
  return r;
}

} // namespace dspslp
