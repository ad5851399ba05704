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
// Generic packing driver. A concrete pass supplies four hooks
// (getCandidates, canPack, isTupleFull, packTuple); the driver sinks the
// candidates' uses as late as possible, groups candidates into tuples
// first-fit in program order, emits one packed call per full tuple, rewires
// the old results and removes the dead scalar code.
//
//===----------------------------------------------------------------------===//

#ifndef DSPSLP_PASS_H_
#define DSPSLP_PASS_H_

#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dspslp/analysis.h"
#include "dspslp/ir.h"

namespace dspslp {

enum class CandidateKind { AddSub, MadTree };

/// A packable unit: one add/sub, or a tree of adds whose leaves are muls.
struct Candidate {
  CandidateKind kind = CandidateKind::AddSub;
  /// Every instruction of the unit, in program order.
  std::vector<InstId> members;
  /// Instruction whose result leaves the unit.
  InstId root = 0;
  /// Mul leaves of a MAD tree in program order; {root} for AddSub.
  std::vector<InstId> leaves;
  /// Widest effective operand type over the unit.
  Type operandType;

  /// Scalar arithmetic operations this unit stands for (adds or products).
  unsigned opCount() const { return static_cast<unsigned>(leaves.size()); }
};

struct Tuple {
  std::vector<Candidate> members;
  Interval interval;

  size_t size() const { return members.size(); }
};

/// What packTuple produced.
struct PackResult {
  /// Old root result -> value now holding the same number.
  std::vector<std::pair<std::string, std::string>> replacements;
  /// Packed calls emitted.
  unsigned calls = 0;
  /// DSP slices used by those calls (a cascade of L stages counts L).
  unsigned units = 0;
  /// Scalar operations absorbed into the packed calls.
  unsigned packedOps = 0;
  /// True when factor-2 trees had different leaf counts.
  bool unequalLeaves = false;
};

class PassError : public std::runtime_error {
public:
  enum class Kind { NoInsertionPoint, InvalidInput, InvalidOutput, Internal };

  PassError(Kind kind, const std::string &msg)
      : std::runtime_error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

private:
  Kind kind_;
};

class PackingPass {
public:
  virtual ~PackingPass() = default;

  /// Spec string, e.g. `add:12` or `muladd:8`.
  virtual std::string name() const = 0;
  virtual std::vector<Candidate> getCandidates(const Function &f) const = 0;
  virtual bool canPack(const Function &f, const Tuple &t,
                       const Candidate &c) const = 0;
  virtual bool isTupleFull(const Tuple &t) const = 0;
  /// Emits the packed code starting at position `insertAt`.
  virtual PackResult packTuple(Function &f, const Tuple &t,
                               size_t insertAt) const = 0;
};

struct PassStats {
  std::string pass;
  unsigned candidates = 0;
  /// Scalar operations covered by the candidates.
  unsigned opsMatched = 0;
  /// Full tuples that were packed.
  unsigned tuples = 0;
  unsigned calls = 0;
  unsigned units = 0;
  unsigned packedOps = 0;
  unsigned unequalPairs = 0;

  unsigned leftoverOps() const { return opsMatched - packedOps; }
};

/// Sinks every use of `c`'s results to the latest position allowed by the
/// ordering constraints, together with the uses of those uses. Everything
/// else keeps its relative order.
void moveUsesALAP(Function &f, const Candidate &c);

Interval candidateInterval(const Function &f, const Candidate &c);
Interval tupleInterval(const Function &f, const Tuple &t);

/// Greedy first-fit grouping in program order. Returns every tuple,
/// including ones that never filled up.
std::vector<Tuple> getTuples(const Function &f, std::span<const Candidate> cands,
                             const PackingPass &pass);

/// Earliest legal position for the packed code: lastDef + 1.
/// Throws NoInsertionPoint if the tuple's interval is empty.
size_t insertionPoint(const Function &f, const Tuple &t);

/// Redirects every use of a replaced result outside the tuple.
void replaceTuple(Function &f, const Tuple &t,
                  std::span<const std::pair<std::string, std::string>> repl);

/// Removes unused side-effect-free instructions until a fixpoint.
/// Returns the number of removed instructions.
size_t deadCodeElim(Function &f);

/// Runs the whole flow on the single block of `f`. `f` is left untouched
/// when no tuple gets packed.
PassStats runOnBasicBlock(Function &f, const PackingPass &pass);

/// Appends instructions at a moving cursor.
class IrBuilder {
public:
  IrBuilder(Function &f, size_t pos) : f_(f), pos_(pos) {}

  /// Inserts `inst` with a fresh result name (if it has a result type).
  std::string emit(Instruction inst, std::string_view stem = "pk");

  std::string extract(const std::string &from, Type t, unsigned offset);
  std::string cast(Opcode op, const std::string &from, Type fromType, Type to);
  /// Read a lane field of `laneBits` bits (signed if `laneSigned`) from
  /// `word` into a value of type `to`.
  std::string laneTo(const std::string &word, unsigned offset,
                     unsigned laneBits, bool laneSigned, Type to);
  /// Value of type `eff.type` holding the payload of operand `o`.
  std::string narrow(const Operand &o, const EffectiveWidth &eff);

  size_t position() const { return pos_; }

private:
  Function &f_;
  size_t pos_;
};

} // namespace dspslp

#endif // DSPSLP_PASS_H_
