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

#include "dspslp/interp.h"

#include <array>
#include <charconv>
#include <random>
#include <sstream>
#include <unordered_map>

#include "dspslp/dsp_model.h"
#include "dspslp/pass_muladd.h"

namespace dspslp {
namespace {

enum class CallKind { None, SimdAdd, MadChain, Quad4 };

struct CallInfo {
  CallKind kind = CallKind::None;
  dsp::SimdAddMode mode = dsp::SimdAddMode::Four12;
  bool subtract = false;
  unsigned length = 1;
};

bool parseUnsigned(std::string_view s, unsigned &out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

CallInfo classify(const Instruction &inst) {
  CallInfo ci;
  std::string_view c = inst.callee;
  const size_t n = inst.operands.size();
  if (c == "silvia.add4x12" || c == "silvia.sub4x12" ||
      c == "silvia.add2x24" || c == "silvia.sub2x24") {
    ci.mode = c.ends_with("4x12") ? dsp::SimdAddMode::Four12
                                  : dsp::SimdAddMode::Two24;
    ci.subtract = c.starts_with("silvia.sub");
    if (n >= 2 && n % 2 == 0 && n / 2 <= dsp::lanes(ci.mode))
      ci.kind = CallKind::SimdAdd;
  } else if (c == "silvia.mul2x8") {
    if (n == 3)
      ci.kind = CallKind::MadChain;
  } else if (c.starts_with("silvia.mad2x8.chain")) {
    unsigned len = 0;
    if (parseUnsigned(c.substr(19), len) && len >= 1 && n == 3 * len) {
      ci.kind = CallKind::MadChain;
      ci.length = len;
    }
  } else if (c == "silvia.mul4x4") {
    if (n == 5)
      ci.kind = CallKind::Quad4;
  }
  return ci;
}

struct Step {
  const Instruction *inst;
  long result = -1;
  std::vector<long> operands; // slot per Value operand, -1 otherwise
  CallInfo call;
};

} // namespace

struct Interpreter::Impl {
  const Function *f = nullptr;
  std::vector<Type> slotTypes;
  std::vector<std::pair<std::string, long>> args;
  std::vector<Step> steps;

  uint64_t operandBits(const Step &s, size_t k,
                       const std::vector<uint64_t> &slots) const {
    const Operand &o = s.inst->operands[k];
    return o.isValue() ? slots[static_cast<size_t>(s.operands[k])] : o.payload;
  }
  int64_t operandValue(const Step &s, size_t k,
                       const std::vector<uint64_t> &slots) const {
    const Operand &o = s.inst->operands[k];
    Type t = o.isValue() ? slotTypes[static_cast<size_t>(s.operands[k])]
                         : o.type;
    return valueOf(operandBits(s, k, slots), t);
  }
  Type operandType(const Step &s, size_t k) const {
    const Operand &o = s.inst->operands[k];
    return o.isValue() ? slotTypes[static_cast<size_t>(s.operands[k])] : o.type;
  }

  uint64_t call(const Step &s, const std::vector<uint64_t> &slots) const;
};

uint64_t Interpreter::Impl::call(const Step &s,
                                 const std::vector<uint64_t> &slots) const {
  const Instruction &inst = *s.inst;
  const size_t n = inst.operands.size();
  try {
    switch (s.call.kind) {
    case CallKind::SimdAdd: {
      std::vector<int64_t> xs, ys;
      for (size_t k = 0; k < n; k += 2) {
        xs.push_back(operandValue(s, k, slots));
        ys.push_back(operandValue(s, k + 1, slots));
      }
      return dsp::simdAddWord(s.call.mode, xs, ys, s.call.subtract);
    }
    case CallKind::MadChain: {
      const unsigned len = s.call.length;
      std::vector<int64_t> a, b, c;
      std::vector<Type> ab, ct;
      for (size_t k = 0; k < len; ++k) {
        a.push_back(operandValue(s, k, slots));
        b.push_back(operandValue(s, len + k, slots));
        c.push_back(operandValue(s, 2 * len + k, slots));
        ab.push_back(operandType(s, k));
        ab.push_back(operandType(s, len + k));
        ct.push_back(operandType(s, 2 * len + k));
      }
      dsp::MadChainParams p = madParamsFor(ab, ct, len);
      auto [pa, pb] = dsp::madChainExtract(dsp::madChainPack(a, b, c, p), p);
      return (truncBits(static_cast<uint64_t>(pa), 32) << 32) |
             truncBits(static_cast<uint64_t>(pb), 32);
    }
    case CallKind::Quad4: {
      std::array<int64_t, 4> a{};
      for (size_t k = 0; k < 4; ++k)
        a[k] = operandValue(s, k, slots);
      const bool bSigned = operandType(s, 4).isSigned();
      dsp::Quad4Result q = dsp::quad4Pack(a, operandValue(s, 4, slots), bSigned);
      auto p = dsp::quad4Extract(q.dspOut, q.lutFix, bSigned);
      uint64_t word = 0;
      for (size_t k = 0; k < 4; ++k)
        word |= truncBits(static_cast<uint64_t>(p[k]), 16) << (16 * k);
      return word;
    }
    case CallKind::None:
      break;
    }
  } catch (const dsp::DspError &e) {
    throw InterpError(InterpError::Kind::WidthViolation,
                      "@" + inst.callee + ": " + e.what());
  }
  throw InterpError(InterpError::Kind::UnknownCallee,
                    "unknown callee @" + inst.callee);
}

Interpreter::Interpreter(const Function &f) : impl_(std::make_unique<Impl>()) {
  impl_->f = &f;
  std::unordered_map<std::string, long> slotOf;
  auto newSlot = [&](const std::string &name, Type t) {
    long id = static_cast<long>(impl_->slotTypes.size());
    impl_->slotTypes.push_back(t);
    slotOf[name] = id;
    return id;
  };
  for (const Argument &a : f.args)
    impl_->args.emplace_back(a.name, newSlot(a.name, a.type));
  for (const Instruction &inst : f.body) {
    Step s;
    s.inst = &inst;
    for (const Operand &o : inst.operands) {
      long slot = -1;
      if (o.isValue()) {
        auto it = slotOf.find(o.name);
        if (it == slotOf.end())
          throw InterpError(InterpError::Kind::UninitializedRead,
                            "%" + o.name + " read before definition");
        slot = it->second;
      }
      s.operands.push_back(slot);
    }
    if (inst.op == Opcode::Call)
      s.call = classify(inst);
    if (inst.hasResult())
      s.result = newSlot(inst.result, inst.type);
    impl_->steps.push_back(std::move(s));
  }
}

Interpreter::~Interpreter() = default;
Interpreter::Interpreter(Interpreter &&) noexcept = default;

Observation Interpreter::run(const Env &env) const {
  const Impl &m = *impl_;
  std::vector<uint64_t> slots(m.slotTypes.size(), 0);
  for (const auto &[name, slot] : m.args) {
    auto it = env.scalars.find(name);
    if (it == env.scalars.end())
      throw InterpError(InterpError::Kind::UninitializedRead,
                        "no value for argument %" + name);
    Type t = m.slotTypes[static_cast<size_t>(slot)];
    if (!fitsIn(it->second, t))
      throw InterpError(InterpError::Kind::WidthViolation,
                        "argument %" + name + " = " +
                            std::to_string(it->second) + " does not fit " +
                            toString(t));
    slots[static_cast<size_t>(slot)] =
        truncBits(static_cast<uint64_t>(it->second), t.bits);
  }

  Observation obs;
  obs.arrays = env.arrays;
  for (const Step &s : m.steps) {
    const Instruction &inst = *s.inst;
    const unsigned bits = inst.type.bits;
    uint64_t r = 0;
    switch (inst.op) {
    case Opcode::Add:
      r = m.operandBits(s, 0, slots) + m.operandBits(s, 1, slots);
      break;
    case Opcode::Sub:
      r = m.operandBits(s, 0, slots) - m.operandBits(s, 1, slots);
      break;
    case Opcode::Mul:
      r = m.operandBits(s, 0, slots) * m.operandBits(s, 1, slots);
      break;
    case Opcode::SExt:
      r = static_cast<uint64_t>(
          signExtend(m.operandBits(s, 0, slots), m.operandType(s, 0).bits));
      break;
    case Opcode::ZExt:
    case Opcode::Trunc:
      r = m.operandBits(s, 0, slots);
      break;
    case Opcode::Extract:
      r = m.operandBits(s, 0, slots) >> inst.bitOffset;
      break;
    case Opcode::Load: {
      const Operand &loc = inst.operands[0];
      auto arr = obs.arrays.find(loc.name);
      if (arr == obs.arrays.end() || !arr->second.count(loc.payload))
        throw InterpError(InterpError::Kind::UninitializedRead,
                          "read of uninitialized @" + loc.name + "[" +
                              std::to_string(loc.payload) + "]");
      int64_t v = arr->second.at(loc.payload);
      if (!fitsIn(v, inst.type))
        throw InterpError(InterpError::Kind::WidthViolation,
                          "@" + loc.name + "[" + std::to_string(loc.payload) +
                              "] = " + std::to_string(v) + " does not fit " +
                              toString(inst.type));
      r = static_cast<uint64_t>(v);
      break;
    }
    case Opcode::Store: {
      const Operand &loc = inst.operands[1];
      obs.arrays[loc.name][loc.payload] = m.operandValue(s, 0, slots);
      continue;
    }
    case Opcode::Call:
      r = m.call(s, slots);
      if (!inst.hasResult())
        continue;
      break;
    case Opcode::Ret:
      if (!inst.operands.empty())
        obs.returnValue = m.operandValue(s, 0, slots);
      return obs;
    }
    slots[static_cast<size_t>(s.result)] = truncBits(r, bits);
  }
  return obs;
}

Observation run(const Function &f, const Env &env) {
  return Interpreter(f).run(env);
}

std::map<std::pair<std::string, uint64_t>, Type>
loadedCells(const Function &f) {
  std::map<std::pair<std::string, uint64_t>, Type> cells;
  for (const Instruction &inst : f.body)
    if (inst.op == Opcode::Load)
      cells.emplace(std::pair{inst.operands[0].name, inst.operands[0].payload},
                    inst.type);
  return cells;
}

namespace {

enum class Corner { Zero, Max, Min, Alternating };

/// Environment inputs in a fixed order: arguments first, then array cells.
struct InputShape {
  std::vector<std::pair<std::string, Type>> scalars;
  std::vector<std::pair<std::pair<std::string, uint64_t>, Type>> cells;
};

InputShape shapeOf(const Function &f1, const Function &f2) {
  auto sig = [](const Function &f) {
    std::vector<std::pair<std::string, Type>> out;
    for (const Argument &a : f.args)
      out.emplace_back(a.name, a.type);
    return out;
  };
  InputShape shape;
  shape.scalars = sig(f1);
  if (shape.scalars != sig(f2))
    throw InterpError(InterpError::Kind::SignatureMismatch,
                      "argument lists of @" + f1.name + " and @" + f2.name +
                          " differ");
  auto cells = loadedCells(f1);
  for (const auto &[cell, t] : loadedCells(f2)) {
    auto [it, inserted] = cells.emplace(cell, t);
    if (!inserted && !(it->second == t))
      throw InterpError(InterpError::Kind::SignatureMismatch,
                        "@" + cell.first + "[" + std::to_string(cell.second) +
                            "] is read as " + toString(it->second) + " and " +
                            toString(t));
  }
  shape.cells.assign(cells.begin(), cells.end());
  return shape;
}

template <typename Pick> Env makeEnv(const InputShape &shape, Pick pick) {
  Env env;
  size_t k = 0;
  for (const auto &[name, t] : shape.scalars)
    env.scalars[name] = pick(t, k++);
  for (const auto &[cell, t] : shape.cells)
    env.arrays[cell.first][cell.second] = pick(t, k++);
  return env;
}

Env cornerEnv(const InputShape &shape, Corner c) {
  return makeEnv(shape, [c](Type t, size_t k) -> int64_t {
    switch (c) {
    case Corner::Zero:
      return 0;
    case Corner::Max:
      return maxValue(t);
    case Corner::Min:
      return minValue(t);
    case Corner::Alternating:
      return k % 2 == 0 ? maxValue(t) : minValue(t);
    }
    return 0;
  });
}

std::string outcome(const Interpreter &interp, const Env &env,
                    std::optional<Observation> &obs) {
  try {
    obs = interp.run(env);
    return printObservation(*obs);
  } catch (const InterpError &e) {
    obs.reset();
    return std::string("error: ") + e.what();
  }
}

} // namespace

Equivalence equivalent(const Function &f1, const Function &f2, unsigned trials,
                       uint64_t seed) {
  const InputShape shape = shapeOf(f1, f2);
  const Interpreter lhs(f1), rhs(f2);
  std::mt19937_64 rng(seed);

  Equivalence result;
  auto check = [&](const Env &env) {
    ++result.trials;
    std::optional<Observation> a, b;
    std::string ra = outcome(lhs, env, a);
    std::string rb = outcome(rhs, env, b);
    if (a && b && *a == *b)
      return true;
    result.equal = false;
    result.counterexample = env;
    result.lhsReport = std::move(ra);
    result.rhsReport = std::move(rb);
    return false;
  };

  for (Corner c : {Corner::Zero, Corner::Max, Corner::Min, Corner::Alternating})
    if (!check(cornerEnv(shape, c)))
      return result;
  for (unsigned i = 0; i < trials; ++i) {
    Env env = makeEnv(shape, [&](Type t, size_t) {
      std::uniform_int_distribution<int64_t> d(minValue(t), maxValue(t));
      return d(rng);
    });
    if (!check(env))
      return result;
  }
  return result;
}

Env parseEnv(std::string_view text) {
  Env env;
  std::istringstream in{std::string(text)};
  std::string line;
  unsigned lineNo = 0;
  auto fail = [&](const std::string &why) {
    throw std::invalid_argument("env line " + std::to_string(lineNo) + ": " +
                                why);
  };
  auto number = [&](std::string s) {
    s.erase(0, s.find_first_not_of(" \t"));
    s.erase(s.find_last_not_of(" \t") + 1);
    int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty())
      fail("bad integer '" + s + "'");
    return v;
  };
  while (std::getline(in, line)) {
    ++lineNo;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      fail("expected 'name = value'");
    std::string name = line.substr(0, eq);
    name.erase(0, name.find_first_not_of(" \t%@"));
    name.erase(name.find_last_not_of(" \t") + 1);
    std::string rhs = line.substr(eq + 1);
    rhs.erase(0, rhs.find_first_not_of(" \t"));
    rhs.erase(rhs.find_last_not_of(" \t\r") + 1);
    if (name.empty())
      fail("missing name");
    if (!rhs.empty() && rhs.front() == '[') {
      if (rhs.back() != ']')
        fail("unterminated array");
      auto &arr = env.arrays[name];
      std::istringstream items(rhs.substr(1, rhs.size() - 2));
      std::string item;
      uint64_t idx = 0;
      while (std::getline(items, item, ','))
        if (item.find_first_not_of(" \t") != std::string::npos)
          arr[idx++] = number(item);
    } else if (auto br = name.find('['); br != std::string::npos) {
      if (name.back() != ']')
        fail("bad cell reference");
      std::string arr = name.substr(0, br);
      int64_t idx = number(name.substr(br + 1, name.size() - br - 2));
      if (idx < 0)
        fail("negative index");
      env.arrays[arr][static_cast<uint64_t>(idx)] = number(rhs);
    } else {
      env.scalars[name] = number(rhs);
    }
  }
  return env;
}

namespace {

void printArrays(std::ostream &os, const ArrayImage &arrays) {
  for (const auto &[name, cells] : arrays) {
    bool dense = !cells.empty() && cells.rbegin()->first + 1 == cells.size();
    if (dense) {
      os << name << " = [";
      for (const auto &[i, v] : cells)
        os << (i ? ", " : "") << v;
      os << "]\n";
    } else {
      for (const auto &[i, v] : cells)
        os << name << "[" << i << "] = " << v << "\n";
    }
  }
}

} // namespace

std::string printEnv(const Env &env) {
  std::ostringstream os;
  for (const auto &[name, v] : env.scalars)
    os << name << " = " << v << "\n";
  printArrays(os, env.arrays);
  return os.str();
}

std::string printObservation(const Observation &obs) {
  std::ostringstream os;
  printArrays(os, obs.arrays);
  if (obs.returnValue)
    os << "ret = " << *obs.returnValue << "\n";
  return os.str();
}

} // namespace dspslp
