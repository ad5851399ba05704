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

#include "dspslp/pass_muladd.h"

#include <numeric>

#include <gtest/gtest.h>

#include "dspslp/interp.h"
#include "test_util.h"

using namespace dspslp;

namespace {

Function load(const std::string &rel) {
  return parse(testutil::readText(testutil::corpus(rel)));
}

/// Two dot products of length `k` sharing the c operands.
Function twoDots(unsigned k, const std::string &ty = "i8") {
  std::string t = "func @d() {\n";
  for (unsigned i = 0; i < k; ++i) {
    std::string s = std::to_string(i);
    t += "  %a" + s + " = load " + ty + " @a[" + s + "]\n";
    t += "  %b" + s + " = load " + ty + " @b[" + s + "]\n";
    t += "  %c" + s + " = load " + ty + " @c[" + s + "]\n";
    t += "  %aw" + s + " = sext " + ty + " %a" + s + " to i32\n";
    t += "  %bw" + s + " = sext " + ty + " %b" + s + " to i32\n";
    t += "  %cw" + s + " = sext " + ty + " %c" + s + " to i32\n";
  }
  for (const char *v : {"a", "b"}) {
    std::string prev;
    for (unsigned i = 0; i < k; ++i) {
      std::string s = std::to_string(i);
      std::string p = std::string("p") + v + s;
      t += "  %" + p + " = mul i32 %" + v + "w" + s + ", %cw" + s + "\n";
      if (i == 0) {
        prev = p;
      } else {
        std::string acc = std::string("s") + v + s;
        t += "  %" + acc + " = add i32 %" + prev + ", %" + p + "\n";
        prev = acc;
      }
    }
    t += "  store i32 %" + prev + ", @o" + v + "[0]\n";
  }
  return parse(t + "  ret\n}\n");
}

std::vector<unsigned> chainLengths(const Function &f) {
  std::vector<unsigned> out;
  for (const Instruction &i : f.body) {
    if (i.op != Opcode::Call)
      continue;
    if (i.callee == "silvia.mul2x8")
      out.push_back(1);
    else if (i.callee.starts_with("silvia.mad2x8.chain"))
      out.push_back(static_cast<unsigned>(std::stoul(i.callee.substr(19))));
  }
  return out;
}

size_t countOp(const Function &f, Opcode op) {
  return static_cast<size_t>(std::count_if(
      f.body.begin(), f.body.end(),
      [&](const Instruction &i) { return i.op == op; }));
}

const MuladdPass kMul8{MuladdConfig{8, {}}};
const MuladdPass kMul4{MuladdConfig{4, {}}};

} // namespace

TEST(MuladdCandidates, Trees) {
  Function dot = parse("func @d(i8 %a0, i8 %a1, i8 %c0, i8 %c1) {\n"
                       "  %p0 = mul i8 %a0, %c0\n  %p1 = mul i8 %a1, %c1\n"
                       "  %d = add i8 %p0, %p1\n  ret i8 %d\n}\n");
  auto c = kMul8.getCandidates(dot);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].leaves.size(), 2u);
  EXPECT_EQ(c[0].members.size(), 3u);
  EXPECT_EQ(c[0].kind, CandidateKind::MadTree);

  Function lone = parse("func @l(i8 %a, i8 %c) {\n  %p = mul i8 %a, %c\n"
                        "  ret i8 %p\n}\n");
  c = kMul8.getCandidates(lone);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].leaves.size(), 1u);

  // The +d add is not a product sum; only the mul is a candidate.
  Function axpy = parse("func @x(i8 %a, i8 %c, i8 %d) {\n"
                        "  %p = mul i8 %a, %c\n  %r = add i8 %p, %d\n"
                        "  ret i8 %r\n}\n");
  c = kMul8.getCandidates(axpy);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].members.size(), 1u);

  Function wide = parse("func @w(i16 %a, i16 %c) {\n  %p = mul i16 %a, %c\n"
                        "  ret i16 %p\n}\n");
  EXPECT_TRUE(kMul8.getCandidates(wide).empty());
}

TEST(MuladdCandidates, Factor4Width) {
  // zext u4 -> i8 keeps a 4-bit unsigned payload.
  Function f = parse("func @q(u4 %x, i4 %w) {\n  %xw = zext u4 %x to i8\n"
                     "  %ww = sext i4 %w to i8\n  %p = mul i8 %xw, %ww\n"
                     "  ret i8 %p\n}\n");
  EXPECT_EQ(kMul4.getCandidates(f).size(), 1u);
  EXPECT_EQ(effectiveWidth(f, "xw").type, Type::u(4));
}

TEST(MuladdCanPack, Factor2) {
  Function f = twoDots(3);
  auto c = kMul8.getCandidates(f);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_TRUE(kMul8.canPack(f, Tuple{{c[0]}, {}}, c[1]));
  EXPECT_TRUE(kMul8.canPack(f, Tuple{}, c[0]));
  EXPECT_EQ(matchLeaves(f, c[0], c[1]).size(), 3u);

  Function g = parse("func @n(i8 %a, i8 %b, i8 %c, i8 %d) {\n"
                     "  %p = mul i8 %a, %b\n  %q = mul i8 %c, %d\n"
                     "  ret\n}\n");
  auto n = kMul8.getCandidates(g);
  EXPECT_FALSE(kMul8.canPack(g, Tuple{{n[0]}, {}}, n[1]));
}

TEST(MuladdCanPack, Factor4) {
  Function f = load("kernels/mmm4b.sir");
  auto c = kMul4.getCandidates(f);
  ASSERT_EQ(c.size(), 64u);
  Tuple t{{c[0], c[1], c[2]}, {}};
  EXPECT_TRUE(kMul4.canPack(f, t, c[3]));
  // c[4] multiplies by the next weight.
  EXPECT_FALSE(kMul4.canPack(f, t, c[4]));
  t.members.push_back(c[3]);
  EXPECT_TRUE(kMul4.isTupleFull(t));
}

TEST(MuladdPack, ChainPartition) {
  EXPECT_EQ(balancedChains(7, 7), (std::vector<unsigned>{7}));
  EXPECT_EQ(balancedChains(8, 7), (std::vector<unsigned>{4, 4}));
  EXPECT_EQ(balancedChains(7, 3), (std::vector<unsigned>{3, 2, 2}));
  EXPECT_EQ(balancedChains(32, 3).size(), 11u);
  for (unsigned k = 1; k < 40; ++k)
    for (unsigned cap = 1; cap < 9; ++cap) {
      auto s = balancedChains(k, cap);
      EXPECT_EQ(s.size(), (k + cap - 1) / cap);
      EXPECT_EQ(std::accumulate(s.begin(), s.end(), 0u), k);
      EXPECT_LE(*std::max_element(s.begin(), s.end()), cap);
      EXPECT_LE(*std::max_element(s.begin(), s.end()) -
                    *std::min_element(s.begin(), s.end()),
                1u);
    }
}

TEST(MuladdPack, ChainsAndAdderTree) {
  struct Case {
    unsigned k;
    std::optional<unsigned> cap;
    std::vector<unsigned> chains;
  };
  for (const Case &c : {Case{7, {}, {7}}, Case{8, {}, {4, 4}},
                        Case{7, 3u, {3, 2, 2}}}) {
    Function f = twoDots(c.k);
    Function orig = f;
    MuladdPass pass(MuladdConfig{8, c.cap});
    PassStats s = runOnBasicBlock(f, pass);
    EXPECT_EQ(chainLengths(f), c.chains) << c.k;
    EXPECT_EQ(countOp(f, Opcode::Mul), 0u);
    // One external add per extra chain and lane.
    EXPECT_EQ(countOp(f, Opcode::Add), 2 * (c.chains.size() - 1));
    EXPECT_EQ(s.units, c.k);
    EXPECT_EQ(s.packedOps, 2 * c.k);
    EXPECT_TRUE(equivalent(orig, f, 1000, c.k).equal);
  }
}

TEST(MuladdPack, UnsignedBound) {
  Function f = load("kernels/mmm.sir");
  Function orig = f;
  runOnBasicBlock(f, kMul8);
  for (unsigned len : chainLengths(f))
    EXPECT_LE(len, 4u);
  EXPECT_TRUE(equivalent(orig, f, 300, 4).equal);
}

TEST(MuladdPack, UnequalTrees) {
  // Three products on one side, two on the other.
  Function f = parse("func @u(i8 %a0, i8 %a1, i8 %a2, i8 %b0, i8 %b1,"
                     " i8 %c0, i8 %c1, i8 %c2) {\n"
                     "  %pa0 = mul i8 %a0, %c0\n  %pa1 = mul i8 %a1, %c1\n"
                     "  %pa2 = mul i8 %a2, %c2\n  %sa1 = add i8 %pa0, %pa1\n"
                     "  %sa2 = add i8 %sa1, %pa2\n"
                     "  %pb0 = mul i8 %b0, %c0\n  %pb1 = mul i8 %b1, %c1\n"
                     "  %sb = add i8 %pb0, %pb1\n"
                     "  store i8 %sa2, @o[0]\n  store i8 %sb, @o[1]\n"
                     "  ret\n}\n");
  Function orig = f;
  PassStats s = runOnBasicBlock(f, kMul8);
  EXPECT_EQ(s.unequalPairs, 1u);
  EXPECT_EQ(countOp(f, Opcode::Mul), 1u); // %pa2 stays scalar
  EXPECT_TRUE(equivalent(orig, f, 1000, 8).equal);
}

TEST(MuladdPack, Factor4) {
  Function f = load("kernels/mmm4b.sir");
  Function orig = f;
  PassStats s = runOnBasicBlock(f, kMul4);
  EXPECT_EQ(s.calls, 16u);
  EXPECT_EQ(s.units, 16u);
  EXPECT_EQ(s.packedOps, 64u);
  EXPECT_EQ(countOp(f, Opcode::Mul), 0u);
  EXPECT_TRUE(equivalent(orig, f, 1000, 9).equal);
}

TEST(MuladdParams, MixedSignedness) {
  std::vector<Type> ab{Type::u(8), Type::s(8)}, c{Type::u(8)};
  auto p = madParamsFor(ab, c, 2);
  EXPECT_TRUE(p.signedProduct);
  EXPECT_EQ(p.m, 9u);
  EXPECT_EQ(p.n, 9u);
  std::vector<Type> uab{Type::u(8), Type::u(8)};
  p = madParamsFor(uab, c, 1);
  EXPECT_FALSE(p.signedProduct);
  EXPECT_EQ(p.m, 8u);
}
