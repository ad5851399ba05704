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

#include "dspslp/pass_add.h"

#include <algorithm>

namespace dspslp {
namespace {

/// How one add/sub maps onto a lane.
struct LanePlan {
  bool eligible = false;
  /// Result fits the lane width: the lane wraps exactly like the scalar op.
  bool direct = false;
  /// For wider results the exact sum must fit the lane; this says how the
  /// lane field is read back.
  bool laneSigned = true;
  EffectiveWidth lhs, rhs;
};

LanePlan planLane(const Function &f, const Instruction &inst, unsigned w) {
  LanePlan plan;
  if (!inst.operands[0].isValue() || !inst.operands[1].isValue())
    return plan;
  plan.lhs = effectiveWidth(f, inst.operands[0].name);
  plan.rhs = effectiveWidth(f, inst.operands[1].name);
  if (plan.lhs.type.bits > w || plan.rhs.type.bits > w)
    return plan;
  if (inst.type.bits <= w) {
    plan.eligible = plan.direct = true;
    return plan;
  }
  // Exact result range of the narrow operands.
  __int128 lo, hi;
  if (inst.op == Opcode::Add) {
    lo = __int128{minValue(plan.lhs.type)} + minValue(plan.rhs.type);
    hi = __int128{maxValue(plan.lhs.type)} + maxValue(plan.rhs.type);
  } else {
    lo = __int128{minValue(plan.lhs.type)} - maxValue(plan.rhs.type);
    hi = __int128{maxValue(plan.lhs.type)} - minValue(plan.rhs.type);
  }
  if (lo >= minValue(Type::s(w)) && hi <= maxValue(Type::s(w))) {
    plan.eligible = true;
    plan.laneSigned = true;
  } else if (lo >= 0 && hi <= maxValue(Type::u(w))) {
    plan.eligible = true;
    plan.laneSigned = false;
  }
  return plan;
}

} // namespace

std::string simdAddCallee(dsp::SimdAddMode mode, bool subtract) {
  return std::string("silvia.") + (subtract ? "sub" : "add") +
         std::to_string(dsp::lanes(mode)) + "x" +
         std::to_string(dsp::laneWidth(mode));
}

std::string AddPass::name() const {
  return std::string(cfg_.inst == Opcode::Sub ? "sub" : "add") + ":" +
         std::to_string(dsp::laneWidth(cfg_.mode));
}

std::vector<Candidate> AddPass::getCandidates(const Function &f) const {
  std::vector<Candidate> out;
  const unsigned w = dsp::laneWidth(cfg_.mode);
  for (const Instruction &inst : f.body) {
    if (inst.op != cfg_.inst)
      continue;
    LanePlan plan = planLane(f, inst, w);
    if (!plan.eligible)
      continue;
    Candidate c;
    c.kind = CandidateKind::AddSub;
    c.members = {inst.id};
    c.root = inst.id;
    c.leaves = {inst.id};
    c.operandType = plan.lhs.type.bits >= plan.rhs.type.bits ? plan.lhs.type
                                                             : plan.rhs.type;
    out.push_back(std::move(c));
  }
  return out;
}

bool AddPass::canPack(const Function &, const Tuple &, const Candidate &) const {
  // A SIMD DSP adds any independent operands.
  return true;
}

bool AddPass::isTupleFull(const Tuple &t) const {
  return t.size() == dsp::lanes(cfg_.mode);
}

PackResult AddPass::packTuple(Function &f, const Tuple &t,
                              size_t insertAt) const {
  const unsigned w = dsp::laneWidth(cfg_.mode);
  IrBuilder b(f, insertAt);

  std::vector<LanePlan> plans;
  Instruction call;
  call.op = Opcode::Call;
  call.callee = simdAddCallee(cfg_.mode, cfg_.inst == Opcode::Sub);
  call.type = Type::s(dsp::kAccumulatorBits);
  for (const Candidate &c : t.members) {
    const Instruction inst = f.body[f.indexOf(c.root)];
    LanePlan plan = planLane(f, inst, w);
    if (!plan.eligible)
      throw PassError(PassError::Kind::Internal, "candidate lost eligibility");
    for (unsigned k = 0; k < 2; ++k) {
      const Operand &o = inst.operands[k];
      std::string v = plan.direct ? o.name
                                  : b.narrow(o, k == 0 ? plan.lhs : plan.rhs);
      call.operands.push_back(Operand::value(v, *f.typeOf(v)));
    }
    plans.push_back(plan);
  }
  std::string word = b.emit(std::move(call));

  PackResult r;
  for (size_t k = 0; k < t.members.size(); ++k) {
    const Instruction inst = f.body[f.indexOf(t.members[k].root)];
    std::string lane =
        b.laneTo(word, static_cast<unsigned>(k) * w, w, plans[k].laneSigned,
                 inst.type);
    r.replacements.emplace_back(inst.result, lane);
  }
  r.calls = 1;
  r.units = 1;
  r.packedOps = static_cast<unsigned>(t.members.size());
  return r;
}

} // namespace dspslp
