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
// Multiply-add packing.
//
// opSize 8 (factor 2): pairs of MAD trees whose products share one factor
// each, sum_i a_i*c_i and sum_i b_i*c_i, become cascaded DSP chains
// `silvia.mul2x8` (one stage) or `silvia.mad2x8.chain<L>`. Operands are
// a_1..a_L, b_1..b_L, c_1..c_L; the i64 result holds sum a*c in bits
// [63:32] and sum b*c in bits [31:0], both two's complement.
//
// opSize 4 (factor 4): four single multiplications of unsigned <=4-bit
// values by one common <=4-bit factor become `silvia.mul4x4(a0..a3, b)`;
// product i sits in bits [16i+15:16i] of the i64 result.
//
//===----------------------------------------------------------------------===//

#ifndef DSPSLP_PASS_MULADD_H_
#define DSPSLP_PASS_MULADD_H_

#include <optional>

#include "dspslp/dsp_model.h"
#include "dspslp/pass.h"

namespace dspslp {

struct MuladdConfig {
  /// 8: factor-2 MAD packing; 4: factor-4 multiplication packing.
  unsigned opSize = 8;
  /// User cap on cascade length; the field-separation bound always applies.
  std::optional<unsigned> maxChainLen;
};

/// One matched pair of products across two trees: (a*c, b*c).
struct LeafPair {
  InstId leafA = 0;
  InstId leafB = 0;
  Operand a, b, c;
};

/// Greedy matching of `A`'s leaves to `B`'s leaves on a shared operand,
/// in program order.
std::vector<LeafPair> matchLeaves(const Function &f, const Candidate &A,
                                  const Candidate &B);

/// Chain parameters for the given operand types: signed if any operand is
/// signed, with unsigned operands widened by one bit in that case.
dsp::MadChainParams madParamsFor(std::span<const Type> abTypes,
                                 std::span<const Type> cTypes, unsigned length);

/// Sizes of ceil(k / cap) chains differing by at most one, largest first.
std::vector<unsigned> balancedChains(unsigned k, unsigned cap);

class MuladdPass : public PackingPass {
public:
  explicit MuladdPass(MuladdConfig cfg) : cfg_(cfg) {}

  std::string name() const override;
  std::vector<Candidate> getCandidates(const Function &f) const override;
  bool canPack(const Function &f, const Tuple &t,
               const Candidate &c) const override;
  bool isTupleFull(const Tuple &t) const override;
  PackResult packTuple(Function &f, const Tuple &t,
                       size_t insertAt) const override;

  /// Effective cascade cap for a set of matched pairs.
  unsigned chainCap(const Function &f, std::span<const LeafPair> pairs) const;

  const MuladdConfig &config() const { return cfg_; }

private:
  std::optional<std::string> sharedFactor(const Function &f,
                                          std::span<const Candidate> muls) const;
  PackResult packFactor2(Function &f, const Tuple &t, size_t insertAt) const;
  PackResult packFactor4(Function &f, const Tuple &t, size_t insertAt) const;

  MuladdConfig cfg_;
};

} // namespace dspslp

#endif // DSPSLP_PASS_MULADD_H_
