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

#include "dspslp/ir.h"

#include <algorithm>
#include <sstream>
#include <unordered_map>

namespace dspslp {

std::string toString(Type t) {
  return (t.isSigned() ? "i" : "u") + std::to_string(t.bits);
}

uint64_t truncBits(uint64_t raw, unsigned bits) {
  if (bits >= 64)
    return raw;
  return raw & ((uint64_t{1} << bits) - 1);
}

int64_t signExtend(uint64_t raw, unsigned bits) {
  if (bits >= 64)
    return static_cast<int64_t>(raw);
  raw = truncBits(raw, bits);
  uint64_t sign = uint64_t{1} << (bits - 1);
  return static_cast<int64_t>((raw ^ sign) - sign);
}

int64_t valueOf(uint64_t raw, Type t) {
  return t.isSigned() ? signExtend(raw, t.bits)
                      : static_cast<int64_t>(truncBits(raw, t.bits));
}

int64_t minValue(Type t) {
  if (!t.isSigned())
    return 0;
  return t.bits >= 64 ? INT64_MIN : -(int64_t{1} << (t.bits - 1));
}

int64_t maxValue(Type t) {
  if (t.isSigned())
    return t.bits >= 64 ? INT64_MAX : (int64_t{1} << (t.bits - 1)) - 1;
  return t.bits >= 63 ? INT64_MAX : (int64_t{1} << t.bits) - 1;
}

bool fitsIn(int64_t v, Type t) { return v >= minValue(t) && v <= maxValue(t); }

std::string_view opcodeName(Opcode op) {
  switch (op) {
  case Opcode::Add:
    return "add";
  case Opcode::Sub:
    return "sub";
  case Opcode::Mul:
    return "mul";
  case Opcode::SExt:
    return "sext";
  case Opcode::ZExt:
    return "zext";
  case Opcode::Trunc:
    return "trunc";
  case Opcode::Load:
    return "load";
  case Opcode::Store:
    return "store";
  case Opcode::Call:
    return "call";
  case Opcode::Extract:
    return "extract";
  case Opcode::Ret:
    return "ret";
  }
  return "?";
}

bool isBinary(Opcode op) {
  return op == Opcode::Add || op == Opcode::Sub || op == Opcode::Mul;
}

bool isCast(Opcode op) {
  return op == Opcode::SExt || op == Opcode::ZExt || op == Opcode::Trunc;
}

bool hasSideEffects(Opcode op) {
  return op == Opcode::Store || op == Opcode::Call || op == Opcode::Ret;
}

bool Instruction::uses(std::string_view value) const {
  return std::any_of(operands.begin(), operands.end(), [&](const Operand &o) {
    return o.isValue() && o.name == value;
  });
}

bool Instruction::sameAs(const Instruction &o) const {
  return op == o.op && result == o.result && type == o.type &&
         operands == o.operands && callee == o.callee &&
         bitOffset == o.bitOffset;
}

Instruction &Function::append(Instruction inst) {
  inst.id = nextId_++;
  body.push_back(std::move(inst));
  return body.back();
}

Instruction &Function::insert(size_t index, Instruction inst) {
  inst.id = nextId_++;
  auto it = body.insert(body.begin() + static_cast<long>(index), std::move(inst));
  return *it;
}

std::string Function::freshName(std::string_view stem) const {
  for (unsigned n = 0;; ++n) {
    std::string candidate = std::string(stem) + std::to_string(n);
    if (!typeOf(candidate))
      return candidate;
  }
}

size_t Function::indexOf(InstId id) const {
  for (size_t i = 0; i < body.size(); ++i)
    if (body[i].id == id)
      return i;
  return npos;
}

size_t Function::defIndex(std::string_view value) const {
  for (size_t i = 0; i < body.size(); ++i)
    if (body[i].result == value)
      return i;
  return npos;
}

const Argument *Function::findArg(std::string_view value) const {
  for (const Argument &a : args)
    if (a.name == value)
      return &a;
  return nullptr;
}

std::optional<Type> Function::typeOf(std::string_view value) const {
  if (const Argument *a = findArg(value))
    return a->type;
  size_t i = defIndex(value);
  if (i == npos)
    return std::nullopt;
  return body[i].type;
}

bool Function::structurallyEquals(const Function &o) const {
  if (name != o.name || args != o.args || carried != o.carried ||
      body.size() != o.body.size())
    return false;
  for (size_t i = 0; i < body.size(); ++i)
    if (!body[i].sameAs(o.body[i]))
      return false;
  return true;
}

std::string_view diagKindName(DiagKind k) {
  switch (k) {
  case DiagKind::DuplicateDef:
    return "DuplicateDef";
  case DiagKind::UseBeforeDef:
    return "UseBeforeDef";
  case DiagKind::UndefinedValue:
    return "UndefinedValue";
  case DiagKind::WidthMismatch:
    return "WidthMismatch";
  case DiagKind::BadCast:
    return "BadCast";
  case DiagKind::BadOperands:
    return "BadOperands";
  case DiagKind::ConstantOutOfRange:
    return "ConstantOutOfRange";
  case DiagKind::BadExtract:
    return "BadExtract";
  case DiagKind::MisplacedRet:
    return "MisplacedRet";
  }
  return "?";
}

namespace {

class Validator {
public:
  explicit Validator(const Function &f) : f_(f) {}

  std::vector<Diagnostic> run() {
    for (const Argument &a : f_.args)
      define(a.name, -1);
    for (size_t i = 0; i < f_.body.size(); ++i)
      if (f_.body[i].hasResult())
        define(f_.body[i].result, static_cast<long>(i));
    for (size_t i = 0; i < f_.body.size(); ++i)
      check(static_cast<long>(i), f_.body[i]);
    if (f_.body.empty() || f_.body.back().op != Opcode::Ret)
      report(DiagKind::MisplacedRet, -1, "block does not end with ret");
    return std::move(diags_);
  }

private:
  void report(DiagKind kind, long index, std::string msg) {
    diags_.push_back({kind, index, std::move(msg)});
  }

  void define(const std::string &name, long index) {
    auto [it, inserted] = defs_.emplace(name, index);
    if (!inserted)
      report(DiagKind::DuplicateDef, index, "%" + name + " defined twice");
  }

  std::optional<Type> defType(const std::string &name) const {
    return f_.typeOf(name);
  }

  /// Returns false if a diagnostic was emitted for this operand.
  bool checkValueOperand(long index, const Operand &o) {
    if (o.isConstant()) {
      if (truncBits(o.payload, o.type.bits) != o.payload) {
        report(DiagKind::ConstantOutOfRange, index,
               "constant does not fit " + toString(o.type));
        return false;
      }
      return true;
    }
    if (!o.isValue()) {
      report(DiagKind::BadOperands, index, "memory operand not allowed here");
      return false;
    }
    auto it = defs_.find(o.name);
    if (it == defs_.end()) {
      report(DiagKind::UndefinedValue, index, "%" + o.name + " is undefined");
      return false;
    }
    if (it->second >= index) {
      report(DiagKind::UseBeforeDef, index,
             "%" + o.name + " used before its definition");
      return false;
    }
    if (defType(o.name) != o.type) {
      report(DiagKind::WidthMismatch, index,
             "%" + o.name + " used as " + toString(o.type));
      return false;
    }
    return true;
  }

  bool checkAllValues(long index, const Instruction &inst) {
    bool ok = true;
    for (const Operand &o : inst.operands)
      ok = checkValueOperand(index, o) && ok;
    return ok;
  }

  void check(long index, const Instruction &inst) {
    auto needResult = [&](bool want) {
      if (inst.hasResult() != want) {
        report(DiagKind::BadOperands, index,
               std::string(opcodeName(inst.op)) +
                   (want ? " needs a result" : " cannot have a result"));
        return false;
      }
      return true;
    };
    auto needArity = [&](size_t n) {
      if (inst.operands.size() != n) {
        report(DiagKind::BadOperands, index,
               std::string(opcodeName(inst.op)) + " takes " +
                   std::to_string(n) + " operands");
        return false;
      }
      return true;
    };
    if (inst.type.bits < 1 || inst.type.bits > 64) {
      report(DiagKind::WidthMismatch, index, "width out of range");
      return;
    }

    switch (inst.op) {
    case Opcode::Add:
    case Opcode::Sub:
    case Opcode::Mul: {
      if (!needResult(true) || !needArity(2) || !checkAllValues(index, inst))
        return;
      for (const Operand &o : inst.operands)
        if (o.type.bits != inst.type.bits) {
          report(DiagKind::WidthMismatch, index,
                 "operand width differs from result width");
          return;
        }
      return;
    }
    case Opcode::SExt:
    case Opcode::ZExt:
    case Opcode::Trunc: {
      if (!needResult(true) || !needArity(1) || !checkAllValues(index, inst))
        return;
      unsigned from = inst.operands[0].type.bits;
      bool ok = inst.op == Opcode::Trunc ? inst.type.bits < from
                                         : inst.type.bits > from;
      if (!ok)
        report(DiagKind::BadCast, index,
               std::string(opcodeName(inst.op)) + " from " +
                   std::to_string(from) + " to " +
                   std::to_string(inst.type.bits) + " bits");
      return;
    }
    case Opcode::Load:
      if (!needResult(true) || !needArity(1))
        return;
      if (!inst.operands[0].isMemory())
        report(DiagKind::BadOperands, index, "load needs a memory operand");
      return;
    case Opcode::Store:
      if (!needResult(false) || !needArity(2))
        return;
      if (!inst.operands[1].isMemory()) {
        report(DiagKind::BadOperands, index, "store needs a memory operand");
        return;
      }
      if (checkValueOperand(index, inst.operands[0]) &&
          inst.operands[0].type != inst.type)
        report(DiagKind::WidthMismatch, index, "stored value type differs");
      return;
    case Opcode::Call:
      if (inst.callee.empty())
        report(DiagKind::BadOperands, index, "call without callee");
      for (const Operand &o : inst.operands)
        if (!o.isValue()) {
          report(DiagKind::BadOperands, index, "call operands must be values");
          return;
        }
      checkAllValues(index, inst);
      return;
    case Opcode::Extract:
      if (!needResult(true) || !needArity(1) || !checkAllValues(index, inst))
        return;
      if (inst.bitOffset + inst.type.bits > inst.operands[0].type.bits)
        report(DiagKind::BadExtract, index, "field exceeds source width");
      return;
    case Opcode::Ret:
      if (index + 1 != static_cast<long>(f_.body.size()))
        report(DiagKind::MisplacedRet, index, "ret must be the last instruction");
      if (inst.hasResult() || inst.operands.size() > 1) {
        report(DiagKind::BadOperands, index, "malformed ret");
        return;
      }
      if (inst.operands.size() == 1 &&
          checkValueOperand(index, inst.operands[0]) &&
          inst.operands[0].type != inst.type)
        report(DiagKind::WidthMismatch, index, "returned value type differs");
      return;
    }
  }

  const Function &f_;
  std::unordered_map<std::string, long> defs_;
  std::vector<Diagnostic> diags_;
};

std::string operandText(const Operand &o) {
  switch (o.kind) {
  case Operand::Kind::Value:
    return "%" + o.name;
  case Operand::Kind::Constant:
    if (!o.type.isSigned() && o.type.bits == 64)
      return std::to_string(o.payload);
    return std::to_string(valueOf(o.payload, o.type));
  case Operand::Kind::Memory:
    return "@" + o.name + "[" + std::to_string(o.payload) + "]";
  }
  return "?";
}

} // namespace

std::vector<Diagnostic> validate(const Function &f) {
  return Validator(f).run();
}

std::string print(const Instruction &inst) {
  std::ostringstream os;
  if (inst.hasResult())
    os << "%" << inst.result << " = ";
  os << opcodeName(inst.op);
  switch (inst.op) {
  case Opcode::Add:
  case Opcode::Sub:
  case Opcode::Mul:
    os << " " << toString(inst.type) << " " << operandText(inst.operands[0])
       << ", " << operandText(inst.operands[1]);
    break;
  case Opcode::SExt:
  case Opcode::ZExt:
  case Opcode::Trunc:
    os << " " << toString(inst.operands[0].type) << " "
       << operandText(inst.operands[0]) << " to " << toString(inst.type);
    break;
  case Opcode::Load:
    os << " " << toString(inst.type) << " " << operandText(inst.operands[0]);
    break;
  case Opcode::Store:
    os << " " << toString(inst.type) << " " << operandText(inst.operands[0])
       << ", " << operandText(inst.operands[1]);
    break;
  case Opcode::Call: {
    os << " " << (inst.hasResult() ? toString(inst.type) : "void") << " @"
       << inst.callee << "(";
    for (size_t i = 0; i < inst.operands.size(); ++i)
      os << (i ? ", " : "") << operandText(inst.operands[i]);
    os << ")";
    break;
  }
  case Opcode::Extract:
    os << " " << toString(inst.type) << " " << operandText(inst.operands[0])
       << ", " << inst.bitOffset;
    break;
  case Opcode::Ret:
    if (!inst.operands.empty())
      os << " " << toString(inst.type) << " " << operandText(inst.operands[0]);
    break;
  }
  return os.str();
}

std::string print(const Function &f) {
  std::ostringstream os;
  os << "func @" << f.name << "(";
  for (size_t i = 0; i < f.args.size(); ++i)
    os << (i ? ", " : "") << toString(f.args[i].type) << " %" << f.args[i].name;
  os << ") {\n";
  for (const Instruction &inst : f.body)
    os << "  " << print(inst) << "\n";
  os << "}\n";
  for (const CarriedEdge &e : f.carried)
    os << ";; carried %" << e.from << " -> %" << e.to << " distance "
       << e.distance << "\n";
  return os.str();
}

ParseError::ParseError(Kind kind, unsigned line, unsigned col,
                       const std::string &msg)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) +
                         ": " + msg),
      kind_(kind), line_(line), col_(col) {}

} // namespace dspslp
