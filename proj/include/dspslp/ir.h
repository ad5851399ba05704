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
// Minimal straight-line SSA IR: bit-width typed values, one basic block per
// function, named arrays with constant indices as the only memory.
//
//===----------------------------------------------------------------------===//

#ifndef DSPSLP_IR_H_
#define DSPSLP_IR_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dspslp {

enum class Signedness { Signed, Unsigned };

/// Integer type: 1..64 bits plus an explicit signedness attribute.
/// Printed as `i<bits>` (signed) or `u<bits>` (unsigned).
struct Type {
  unsigned bits = 32;
  Signedness sign = Signedness::Signed;

  bool isSigned() const { return sign == Signedness::Signed; }
  bool operator==(const Type &) const = default;

  static Type s(unsigned bits) { return {bits, Signedness::Signed}; }
  static Type u(unsigned bits) { return {bits, Signedness::Unsigned}; }
};

std::string toString(Type t);

/// Low `bits` of `raw` with everything above cleared.
uint64_t truncBits(uint64_t raw, unsigned bits);
/// Two's complement interpretation of the low `bits` of `raw`.
int64_t signExtend(uint64_t raw, unsigned bits);
/// Logical value of a bit pattern under `t` (unsigned 64-bit values above
/// INT64_MAX are not representable and wrap).
int64_t valueOf(uint64_t raw, Type t);
/// True if the mathematical integer `v` is representable in `t`.
bool fitsIn(int64_t v, Type t);
/// Smallest/largest representable values of `t`.
int64_t minValue(Type t);
int64_t maxValue(Type t);

enum class Opcode {
  Add,
  Sub,
  Mul,
  SExt,
  ZExt,
  Trunc,
  Load,
  Store,
  Call,
  Extract,
  Ret,
};

std::string_view opcodeName(Opcode op);
bool isBinary(Opcode op);
bool isCast(Opcode op);
bool hasSideEffects(Opcode op);

/// One operand: an SSA value, an immediate, or a memory location.
struct Operand {
  enum class Kind { Value, Constant, Memory };

  Kind kind = Kind::Value;
  /// SSA name (Value) or array name (Memory), without sigil.
  std::string name;
  /// Constant bit pattern, or the array index for Memory.
  uint64_t payload = 0;
  /// Type of the value as seen at the use site; unused for Memory.
  Type type;

  static Operand value(std::string name, Type t) {
    return {Kind::Value, std::move(name), 0, t};
  }
  static Operand constant(int64_t v, Type t) {
    return {Kind::Constant, {}, truncBits(static_cast<uint64_t>(v), t.bits), t};
  }
  static Operand memory(std::string array, uint64_t index) {
    return {Kind::Memory, std::move(array), index, {}};
  }

  bool isValue() const { return kind == Kind::Value; }
  bool isConstant() const { return kind == Kind::Constant; }
  bool isMemory() const { return kind == Kind::Memory; }
  bool operator==(const Operand &) const = default;
};

using InstId = uint32_t;

struct Instruction {
  /// Stable identity inside a function; survives reordering. Not part of
  /// structural equality.
  InstId id = 0;
  Opcode op = Opcode::Ret;
  /// Result name, empty when the instruction produces no value.
  std::string result;
  /// Result type; for Store/Ret the type of the stored/returned value.
  Type type;
  std::vector<Operand> operands;
  /// Call target without the `@` sigil.
  std::string callee;
  /// Extract: bit offset of the field inside the source value.
  unsigned bitOffset = 0;

  bool hasResult() const { return !result.empty(); }
  bool uses(std::string_view value) const;
  bool sameAs(const Instruction &o) const;
};

struct Argument {
  std::string name;
  Type type;
  bool operator==(const Argument &) const = default;
};

/// Loop-carried dependence annotation (`;; carried %x -> %y distance d`).
struct CarriedEdge {
  std::string from;
  std::string to;
  unsigned distance = 1;
  bool operator==(const CarriedEdge &) const = default;
};

class Function {
public:
  std::string name;
  std::vector<Argument> args;
  std::vector<Instruction> body;
  std::vector<CarriedEdge> carried;

  /// Appends an instruction, assigning it a fresh id.
  Instruction &append(Instruction inst);
  /// Inserts before position `index`, assigning a fresh id.
  Instruction &insert(size_t index, Instruction inst);
  InstId freshId() { return nextId_++; }
  /// Returns an unused value name starting with `stem`.
  std::string freshName(std::string_view stem) const;

  /// Position of the instruction with id `id`, or npos.
  size_t indexOf(InstId id) const;
  /// Position of the instruction defining `value`, or npos.
  size_t defIndex(std::string_view value) const;
  const Argument *findArg(std::string_view value) const;
  /// Type of an argument or instruction result.
  std::optional<Type> typeOf(std::string_view value) const;

  /// Structural equality: ignores instruction ids.
  bool structurallyEquals(const Function &o) const;

  static constexpr size_t npos = static_cast<size_t>(-1);

private:
  InstId nextId_ = 0;
};

enum class DiagKind {
  DuplicateDef,
  UseBeforeDef,
  UndefinedValue,
  WidthMismatch,
  BadCast,
  BadOperands,
  ConstantOutOfRange,
  BadExtract,
  MisplacedRet,
};

std::string_view diagKindName(DiagKind k);

struct Diagnostic {
  DiagKind kind;
  /// Instruction index, or -1 for function-level problems.
  long index = -1;
  std::string message;
};

/// Checks every type/SSA invariant; empty result iff `f` is valid.
std::vector<Diagnostic> validate(const Function &f);

/// Canonical text form.
std::string print(const Function &f);
std::string print(const Instruction &inst);

class ParseError : public std::runtime_error {
public:
  enum class Kind { Syntax, UseBeforeDef, DuplicateDef, WidthMismatch };

  ParseError(Kind kind, unsigned line, unsigned col, const std::string &msg);

  Kind kind() const { return kind_; }
  unsigned line() const { return line_; }
  unsigned col() const { return col_; }

private:
  Kind kind_;
  unsigned line_;
  unsigned col_;
};

/// Parses one function in `.sir` text format. Throws ParseError.
Function parse(std::string_view text);

} // namespace dspslp

#endif // DSPSLP_IR_H_
