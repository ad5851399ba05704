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

#include "dspslp/pass.h"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace dspslp {
namespace {

std::unordered_set<std::string> resultsOf(const Function &f,
                                          std::span<const InstId> ids) {
  std::unordered_set<InstId> inside(ids.begin(), ids.end());
  std::unordered_set<std::string> out;
  for (const Instruction &inst : f.body)
    if (inside.count(inst.id) && inst.hasResult())
      out.insert(inst.result);
  return out;
}

/// True if some instruction of `a` reads a result of `b`.
bool reads(const Function &f, const Candidate &a, const Candidate &b) {
  auto produced = resultsOf(f, b.members);
  std::unordered_set<InstId> inside(a.members.begin(), a.members.end());
  for (const Instruction &inst : f.body) {
    if (!inside.count(inst.id))
      continue;
    for (const Operand &o : inst.operands)
      if (o.isValue() && produced.count(o.name))
        return true;
  }
  return false;
}

} // namespace

namespace {

std::vector<InstId> usersOf(const Function &f,
                            const std::unordered_set<std::string> &values,
                            const std::unordered_set<InstId> &skip) {
  std::vector<InstId> users;
  for (const Instruction &inst : f.body) {
    if (skip.count(inst.id) || inst.op == Opcode::Ret)
      continue;
    for (const Operand &o : inst.operands)
      if (o.isValue() && values.count(o.name)) {
        users.push_back(inst.id);
        break;
      }
  }
  return users;
}

/// Sinks `id` below everything it is not ordered against. Its own users go
/// first so they do not pin it in place.
void sink(Function &f, InstId id) {
  size_t from = f.indexOf(id);
  if (f.body[from].hasResult())
    for (auto users = usersOf(f, {f.body[from].result}, {});
         !users.empty(); users.pop_back())
      sink(f, users.back());

  from = f.indexOf(id);
  size_t stop = f.body.size() - 1; // the terminator
  for (size_t j = from + 1; j < f.body.size() - 1; ++j)
    if (mustPrecede(f, from, j)) {
      stop = j;
      break;
    }
  size_t to = stop - 1;
  if (stop > from + 1)
    std::rotate(f.body.begin() + static_cast<long>(from),
                f.body.begin() + static_cast<long>(from) + 1,
                f.body.begin() + static_cast<long>(to) + 1);
}

} // namespace

void moveUsesALAP(Function &f, const Candidate &c) {
  std::unordered_set<InstId> inside(c.members.begin(), c.members.end());
  std::vector<InstId> users = usersOf(f, resultsOf(f, c.members), inside);
  // Latest user first, so earlier users can sink below it when allowed.
  for (auto it = users.rbegin(); it != users.rend(); ++it)
    sink(f, *it);
}

Interval candidateInterval(const Function &f, const Candidate &c) {
  return entityInterval(f, c.members);
}

Interval tupleInterval(const Function &f, const Tuple &t) {
  Interval iv{-1, static_cast<long>(f.body.size())};
  for (const Candidate &c : t.members) {
    Interval ci = candidateInterval(f, c);
    iv.lastDef = std::max(iv.lastDef, ci.lastDef);
    iv.firstUse = std::min(iv.firstUse, ci.firstUse);
  }
  return iv;
}

std::vector<Tuple> getTuples(const Function &f, std::span<const Candidate> cands,
                             const PackingPass &pass) {
  std::vector<const Candidate *> order;
  for (const Candidate &c : cands)
    order.push_back(&c);
  std::stable_sort(order.begin(), order.end(),
                   [&](const Candidate *a, const Candidate *b) {
                     return f.indexOf(a->root) < f.indexOf(b->root);
                   });

  std::vector<Tuple> tuples;
  for (const Candidate *c : order) {
    Interval ci = candidateInterval(f, *c);
    bool placed = false;
    for (Tuple &t : tuples) {
      if (pass.isTupleFull(t) || !intervalsIntersect(ci, t.interval))
        continue;
      // A candidate feeding another one directly still passes the interval
      // test, so dependencies are checked explicitly.
      bool dependent = std::any_of(
          t.members.begin(), t.members.end(), [&](const Candidate &m) {
            return reads(f, *c, m) || reads(f, m, *c);
          });
      if (dependent || !pass.canPack(f, t, *c))
        continue;
      t.members.push_back(*c);
      t.interval.lastDef = std::max(t.interval.lastDef, ci.lastDef);
      t.interval.firstUse = std::min(t.interval.firstUse, ci.firstUse);
      placed = true;
      break;
    }
    if (!placed)
      tuples.push_back(Tuple{{*c}, ci});
  }
  return tuples;
}

size_t insertionPoint(const Function &f, const Tuple &t) {
  Interval iv = tupleInterval(f, t);
  if (iv.empty())
    throw PassError(PassError::Kind::NoInsertionPoint,
                    "tuple has no legal insertion point (lastDef " +
                        std::to_string(iv.lastDef) + ", firstUse " +
                        std::to_string(iv.firstUse) + ")");
  return static_cast<size_t>(iv.lastDef + 1);
}

void replaceTuple(Function &f, const Tuple &t,
                  std::span<const std::pair<std::string, std::string>> repl) {
  if (tupleInterval(f, t).empty())
    throw PassError(PassError::Kind::NoInsertionPoint,
                    "tuple has no legal insertion point");
  std::unordered_set<InstId> inside;
  for (const Candidate &c : t.members)
    inside.insert(c.members.begin(), c.members.end());
  std::unordered_map<std::string, std::string> map(repl.begin(), repl.end());
  for (Instruction &inst : f.body) {
    if (inside.count(inst.id))
      continue;
    for (Operand &o : inst.operands)
      if (o.isValue())
        if (auto it = map.find(o.name); it != map.end())
          o.name = it->second;
  }
}

size_t deadCodeElim(Function &f) {
  size_t removed = 0;
  for (;;) {
    std::unordered_set<std::string> used;
    for (const Instruction &inst : f.body)
      for (const Operand &o : inst.operands)
        if (o.isValue())
          used.insert(o.name);
    auto dead = [&](const Instruction &inst) {
      return inst.hasResult() && !hasSideEffects(inst.op) &&
             !used.count(inst.result);
    };
    auto it = std::remove_if(f.body.begin(), f.body.end(), dead);
    size_t n = static_cast<size_t>(f.body.end() - it);
    if (n == 0)
      return removed;
    f.body.erase(it, f.body.end());
    removed += n;
  }
}

PassStats runOnBasicBlock(Function &f, const PackingPass &pass) {
  if (auto diags = validate(f); !diags.empty())
    throw PassError(PassError::Kind::InvalidInput,
                    "input is not valid: " + diags.front().message);

  PassStats stats;
  stats.pass = pass.name();
  Function work = f;
  std::vector<Candidate> cands = pass.getCandidates(work);
  stats.candidates = static_cast<unsigned>(cands.size());
  for (const Candidate &c : cands)
    stats.opsMatched += c.opCount();

  for (const Candidate &c : cands)
    moveUsesALAP(work, c);

  for (const Tuple &t : getTuples(work, cands, pass)) {
    if (!pass.isTupleFull(t))
      continue;
    size_t at = insertionPoint(work, t);
    PackResult r = pass.packTuple(work, t, at);
    replaceTuple(work, t, r.replacements);
    ++stats.tuples;
    stats.calls += r.calls;
    stats.units += r.units;
    stats.packedOps += r.packedOps;
    stats.unequalPairs += r.unequalLeaves ? 1 : 0;
  }
  if (stats.tuples == 0)
    return stats;

  deadCodeElim(work);
  std::erase_if(work.carried, [&](const CarriedEdge &e) {
    return !work.typeOf(e.from) || !work.typeOf(e.to);
  });
  if (auto diags = validate(work); !diags.empty())
    throw PassError(PassError::Kind::InvalidOutput,
                    pass.name() + " produced invalid IR: " +
                        diags.front().message);
  f = std::move(work);
  return stats;
}

std::string IrBuilder::emit(Instruction inst, std::string_view stem) {
  if (inst.op != Opcode::Store && inst.op != Opcode::Ret)
    inst.result = f_.freshName(stem);
  std::string name = inst.result;
  f_.insert(pos_++, std::move(inst));
  return name;
}

std::string IrBuilder::extract(const std::string &from, Type t,
                               unsigned offset) {
  Instruction inst;
  inst.op = Opcode::Extract;
  inst.type = t;
  inst.operands.push_back(Operand::value(from, *f_.typeOf(from)));
  inst.bitOffset = offset;
  return emit(std::move(inst));
}

std::string IrBuilder::cast(Opcode op, const std::string &from, Type fromType,
                            Type to) {
  Instruction inst;
  inst.op = op;
  inst.type = to;
  inst.operands.push_back(Operand::value(from, fromType));
  return emit(std::move(inst));
}

std::string IrBuilder::laneTo(const std::string &word, unsigned offset,
                              unsigned laneBits, bool laneSigned, Type to) {
  if (to.bits <= laneBits)
    return extract(word, to, offset);
  Type lane{laneBits, laneSigned ? Signedness::Signed : Signedness::Unsigned};
  std::string field = extract(word, lane, offset);
  return cast(laneSigned ? Opcode::SExt : Opcode::ZExt, field, lane, to);
}

std::string IrBuilder::narrow(const Operand &o, const EffectiveWidth &eff) {
  if (o.type == eff.type)
    return o.name;
  if (!eff.source.empty() && f_.typeOf(eff.source) == eff.type)
    return eff.source;
  if (eff.type.bits >= o.type.bits)
    throw PassError(PassError::Kind::Internal,
                    "cannot narrow %" + o.name + " to " + toString(eff.type));
  return cast(Opcode::Trunc, o.name, o.type, eff.type);
}

} // namespace dspslp
