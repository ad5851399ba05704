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

#include "dspslp/analysis.h"

#include <algorithm>
#include <unordered_set>

namespace dspslp {

std::map<std::string, UseDef> useDefChains(const Function &f) {
  std::map<std::string, UseDef> chains;
  for (const Argument &a : f.args)
    chains[a.name].def = -1;
  for (size_t i = 0; i < f.body.size(); ++i) {
    const Instruction &inst = f.body[i];
    for (const Operand &o : inst.operands) {
      if (!o.isValue())
        continue;
      auto &uses = chains[o.name].uses;
      if (uses.empty() || uses.back() != static_cast<long>(i))
        uses.push_back(static_cast<long>(i));
    }
    if (inst.hasResult())
      chains[inst.result].def = static_cast<long>(i);
  }
  return chains;
}

bool isPureCallee(std::string_view callee) {
  return callee.rfind("silvia.", 0) == 0;
}

namespace {

bool isBarrierCall(const Instruction &inst) {
  return inst.op == Opcode::Call && !isPureCallee(inst.callee);
}

bool isMemOp(const Instruction &inst) {
  return inst.op == Opcode::Load || inst.op == Opcode::Store;
}

bool sameLocation(const Instruction &a, const Instruction &b) {
  const Operand &ma = a.op == Opcode::Load ? a.operands[0] : a.operands[1];
  const Operand &mb = b.op == Opcode::Load ? b.operands[0] : b.operands[1];
  return ma.name == mb.name && ma.payload == mb.payload;
}

} // namespace

std::optional<OrderReason> mustPrecede(const Function &f, size_t first,
                                       size_t second) {
  const Instruction &a = f.body[first];
  const Instruction &b = f.body[second];
  if (a.hasResult() && b.uses(a.result))
    return OrderReason::DataDep;
  if (isMemOp(a) && isMemOp(b)) {
    if ((a.op == Opcode::Store || b.op == Opcode::Store) && sameLocation(a, b))
      return OrderReason::MemAlias;
    return std::nullopt;
  }
  if ((isBarrierCall(a) && (isMemOp(b) || isBarrierCall(b))) ||
      (isBarrierCall(b) && isMemOp(a)))
    return OrderReason::CallBarrier;
  return std::nullopt;
}

std::vector<OrderConstraint> orderConstraints(const Function &f) {
  std::vector<OrderConstraint> out;
  for (size_t i = 0; i < f.body.size(); ++i)
    for (size_t j = i + 1; j < f.body.size(); ++j)
      if (auto reason = mustPrecede(f, i, j))
        out.push_back({static_cast<long>(i), static_cast<long>(j), *reason});
  return out;
}

Interval entityInterval(const Function &f, std::span<const InstId> members) {
  std::unordered_set<InstId> inside(members.begin(), members.end());
  std::unordered_set<std::string> results;
  for (const Instruction &inst : f.body)
    if (inside.count(inst.id) && inst.hasResult())
      results.insert(inst.result);

  Interval iv{-1, static_cast<long>(f.body.size())};
  for (size_t i = 0; i < f.body.size(); ++i) {
    const Instruction &inst = f.body[i];
    bool member = inside.count(inst.id) != 0;
    for (const Operand &o : inst.operands) {
      if (!o.isValue())
        continue;
      if (member && !results.count(o.name)) {
        size_t def = f.defIndex(o.name);
        if (def != Function::npos)
          iv.lastDef = std::max(iv.lastDef, static_cast<long>(def));
      } else if (!member && results.count(o.name)) {
        iv.firstUse = std::min(iv.firstUse, static_cast<long>(i));
      }
    }
  }
  return iv;
}

bool intervalsIntersect(const Interval &a, const Interval &b) {
  return a.lastDef < b.firstUse && b.lastDef < a.firstUse;
}

EffectiveWidth effectiveWidth(const Function &f, std::string_view value) {
  if (const Argument *a = f.findArg(value))
    return {a->type, a->name};
  size_t idx = f.defIndex(value);
  if (idx == Function::npos)
    return {Type{}, {}};
  const Instruction &inst = f.body[idx];
  EffectiveWidth self{inst.type, inst.result};
  if (inst.op != Opcode::SExt && inst.op != Opcode::ZExt)
    return self;

  const Operand &src = inst.operands[0];
  Type from = src.type;
  EffectiveWidth inner = src.isValue() ? effectiveWidth(f, src.name)
                                       : EffectiveWidth{from, {}};
  // A narrower unsigned payload has a clear sign bit, so either extension
  // preserves it.
  if (!inner.type.isSigned() && inner.type.bits < from.bits)
    return inner;

  if (inst.op == Opcode::SExt) {
    if (from.isSigned())
      return inner;
    // Unsigned source reinterpreted as signed: only the container's low
    // bits carry the payload.
    return {Type::s(from.bits), {}};
  }
  if (!from.isSigned() && !inner.type.isSigned())
    return inner;
  return {Type::u(from.bits), from.isSigned() ? std::string() : src.name};
}

} // namespace dspslp
