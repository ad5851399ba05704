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
// Bit-exact model of the packed DSP48 operations: SIMD add/sub in four12 and
// two24 modes, factor-2 multiply-add chains sharing one factor, and factor-4
// 4-bit multiplications by a common factor with a LUT-side fix-up.
//
// The accumulator is 48 bits wide. A factor-2 chain places the upper product
// field in bits [47:18] and the lower one in bits [17:0].
//
//===----------------------------------------------------------------------===//

#ifndef DSPSLP_DSP_MODEL_H_
#define DSPSLP_DSP_MODEL_H_

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace dspslp::dsp {

inline constexpr unsigned kAccumulatorBits = 48;
inline constexpr unsigned kLowFieldBits = 18;
inline constexpr uint64_t kAccumulatorMask = (uint64_t{1} << 48) - 1;

class DspError : public std::runtime_error {
public:
  enum class Kind { LaneOverflowInput, ChainTooLong, OperandOverflow };

  DspError(Kind kind, const std::string &msg)
      : std::runtime_error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

private:
  Kind kind_;
};

enum class SimdAddMode { Four12, Two24 };

constexpr unsigned lanes(SimdAddMode m) { return m == SimdAddMode::Four12 ? 4 : 2; }
constexpr unsigned laneWidth(SimdAddMode m) {
  return m == SimdAddMode::Four12 ? 12 : 24;
}

/// Places each lane value (two's complement, truncated) into its field of
/// the 48-bit word. Throws LaneOverflowInput if a value is outside
/// [-2^(w-1), 2^w - 1].
uint64_t packLanes(SimdAddMode mode, std::span<const int64_t> values);

/// Lane-wise x+y (or x-y) on the 48-bit ALU with carries cut at lane
/// boundaries. Returns the raw accumulator word.
uint64_t simdAddWord(SimdAddMode mode, std::span<const int64_t> xs,
                     std::span<const int64_t> ys, bool subtract);

/// Same as simdAddWord, split into unsigned lane fields.
std::vector<uint64_t> simdAdd(SimdAddMode mode, std::span<const int64_t> xs,
                              std::span<const int64_t> ys, bool subtract);

struct MadChainParams {
  unsigned m = 8; ///< width of the a_i and b_i operands
  unsigned n = 8; ///< width of the shared c_i operands
  bool signedProduct = true;
  unsigned length = 1;
};

/// Longest cascade that keeps the lower sum inside its 18-bit field.
/// Zero when even a single product does not fit.
uint64_t maxChainLen(unsigned m, unsigned n, bool signedProduct);

/// 48-bit accumulator image of sum_i (a_i * 2^18 + b_i) * c_i.
struct PackedWord {
  uint64_t raw = 0;
};

PackedWord madChainPack(std::span<const int64_t> a, std::span<const int64_t> b,
                        std::span<const int64_t> c, const MadChainParams &p);

/// Recovers (sum a_i c_i, sum b_i c_i) from the accumulator.
std::pair<int64_t, int64_t> madChainExtract(PackedWord w,
                                            const MadChainParams &p);

/// Factor-4 packing: a0..a2 and the three MSBs of a3 on the 27-bit port,
/// each 4-bit field followed by four zero bits; b on the other port.
struct Quad4Result {
  int64_t dspOut = 0; ///< port27 * b, two's complement
  int64_t lutFix = 0; ///< a3[0] * b
};

uint32_t quad4Port(const std::array<int64_t, 4> &a);
Quad4Result quad4Pack(const std::array<int64_t, 4> &a, int64_t b, bool bSigned);
std::array<int64_t, 4> quad4Extract(int64_t dspOut, int64_t lutFix,
                                    bool bSigned);

} // namespace dspslp::dsp

#endif // DSPSLP_DSP_MODEL_H_
