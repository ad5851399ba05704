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

#include "dspslp/dsp_model.h"

#include <string>

namespace dspslp::dsp {
namespace {

int64_t signExtend(uint64_t raw, unsigned bits) {
  uint64_t mask = (uint64_t{1} << bits) - 1;
  uint64_t sign = uint64_t{1} << (bits - 1);
  return static_cast<int64_t>(((raw & mask) ^ sign) - sign);
}

/// MSB of every lane.
uint64_t laneMsbMask(SimdAddMode mode) {
  uint64_t mask = 0;
  for (unsigned k = 0; k < lanes(mode); ++k)
    mask |= uint64_t{1} << ((k + 1) * laneWidth(mode) - 1);
  return mask;
}

bool fitsWidth(int64_t v, unsigned bits, bool isSigned) {
  if (bits >= 63)
    return isSigned || v >= 0;
  if (isSigned)
    return v >= -(int64_t{1} << (bits - 1)) && v < (int64_t{1} << (bits - 1));
  return v >= 0 && v < (int64_t{1} << bits);
}

} // namespace

uint64_t packLanes(SimdAddMode mode, std::span<const int64_t> values) {
  const unsigned w = laneWidth(mode);
  if (values.size() != lanes(mode))
    throw DspError(DspError::Kind::LaneOverflowInput, "wrong lane count");
  uint64_t word = 0;
  for (unsigned k = 0; k < values.size(); ++k) {
    int64_t v = values[k];
    if (v < -(int64_t{1} << (w - 1)) || v > (int64_t{1} << w) - 1)
      throw DspError(DspError::Kind::LaneOverflowInput,
                     "value " + std::to_string(v) + " does not fit a " +
                         std::to_string(w) + "-bit lane");
    word |= (static_cast<uint64_t>(v) & ((uint64_t{1} << w) - 1)) << (k * w);
  }
  return word;
}

uint64_t simdAddWord(SimdAddMode mode, std::span<const int64_t> xs,
                     std::span<const int64_t> ys, bool subtract) {
  const uint64_t x = packLanes(mode, xs);
  const uint64_t y = packLanes(mode, ys);
  const uint64_t h = laneMsbMask(mode);
  // Add/subtract everything below each lane MSB, then fix the MSB with a
  // carry-less XOR so no carry or borrow crosses into the next lane.
  uint64_t z = subtract ? ((x | h) - (y & ~h)) ^ ((x ^ ~y) & h)
                        : ((x & ~h) + (y & ~h)) ^ ((x ^ y) & h);
  return z & kAccumulatorMask;
}

std::vector<uint64_t> simdAdd(SimdAddMode mode, std::span<const int64_t> xs,
                              std::span<const int64_t> ys, bool subtract) {
  const uint64_t word = simdAddWord(mode, xs, ys, subtract);
  const unsigned w = laneWidth(mode);
  std::vector<uint64_t> out(lanes(mode));
  for (unsigned k = 0; k < out.size(); ++k)
    out[k] = (word >> (k * w)) & ((uint64_t{1} << w) - 1);
  return out;
}

uint64_t maxChainLen(unsigned m, unsigned n, bool signedProduct) {
  using u128 = unsigned __int128;
  if (m < 1 || n < 1)
    return 0;
  if (signedProduct) {
    u128 num = (u128{1} << (kLowFieldBits - 1)) - 1;
    unsigned shift = (m - 1) + (n - 1);
    if (shift >= 127)
      return 0;
    return static_cast<uint64_t>(num / (u128{1} << shift));
  }
  u128 num = (u128{1} << kLowFieldBits) - 1;
  u128 am = m >= 64 ? ~u128{0} >> 64 : (u128{1} << m) - 1;
  u128 an = n >= 64 ? ~u128{0} >> 64 : (u128{1} << n) - 1;
  return static_cast<uint64_t>(num / (am * an));
}

PackedWord madChainPack(std::span<const int64_t> a, std::span<const int64_t> b,
                        std::span<const int64_t> c, const MadChainParams &p) {
  if (a.size() != p.length || b.size() != p.length || c.size() != p.length)
    throw DspError(DspError::Kind::OperandOverflow,
                   "operand count does not match chain length");
  if (p.length < 1 || p.length > maxChainLen(p.m, p.n, p.signedProduct))
    throw DspError(DspError::Kind::ChainTooLong,
                   "chain of " + std::to_string(p.length) +
                       " exceeds the field-separation bound");
  __int128 acc = 0;
  for (unsigned i = 0; i < p.length; ++i) {
    if (!fitsWidth(a[i], p.m, p.signedProduct) ||
        !fitsWidth(b[i], p.m, p.signedProduct) ||
        !fitsWidth(c[i], p.n, p.signedProduct))
      throw DspError(DspError::Kind::OperandOverflow,
                     "operand does not fit the chain parameters");
    // One DSP per stage: pre-packed port times c, added to the cascade.
    __int128 port = (static_cast<__int128>(a[i]) << kLowFieldBits) + b[i];
    acc += port * c[i];
  }
  return {static_cast<uint64_t>(acc) & kAccumulatorMask};
}

std::pair<int64_t, int64_t> madChainExtract(PackedWord w,
                                            const MadChainParams &p) {
  const int64_t full = signExtend(w.raw, kAccumulatorBits);
  const uint64_t lowMask = (uint64_t{1} << kLowFieldBits) - 1;
  const int64_t low = p.signedProduct
                          ? signExtend(w.raw, kLowFieldBits)
                          : static_cast<int64_t>(w.raw & lowMask);
  // A negative lower field borrowed one from the upper field; subtracting
  // it before the shift returns that borrow.
  const int64_t high = (full - low) >> kLowFieldBits;
  return {high, low};
}

uint32_t quad4Port(const std::array<int64_t, 4> &a) {
  return static_cast<uint32_t>(a[0] | (a[1] << 8) | (a[2] << 16) |
                               ((a[3] >> 1) << 24));
}

Quad4Result quad4Pack(const std::array<int64_t, 4> &a, int64_t b,
                      bool bSigned) {
  for (int64_t v : a)
    if (v < 0 || v > 15)
      throw DspError(DspError::Kind::OperandOverflow,
                     "factor-4 operands are unsigned 4-bit");
  if (!fitsWidth(b, 4, bSigned))
    throw DspError(DspError::Kind::OperandOverflow,
                   "common factor does not fit 4 bits");
  return {static_cast<int64_t>(quad4Port(a)) * b, (a[3] & 1) * b};
}

std::array<int64_t, 4> quad4Extract(int64_t dspOut, int64_t lutFix,
                                    bool bSigned) {
  std::array<int64_t, 4> p{};
  int64_t rest = dspOut;
  for (unsigned i = 0; i < 3; ++i) {
    int64_t field = bSigned ? signExtend(static_cast<uint64_t>(rest), 8)
                            : (rest & 0xFF);
    p[i] = field;
    // Negative fields borrowed from the next one; give it back.
    rest = (rest - field) >> 8;
  }
  p[3] = rest * 2 + lutFix;
  return p;
}

} // namespace dspslp::dsp
