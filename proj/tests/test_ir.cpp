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

#include <gtest/gtest.h>

#include "test_util.h"

using namespace dspslp;

namespace {

const char *kFig3 = R"(func @fig3(i8 %b) {
  %a0 = load i8 @a[0]
  %c0 = mul i8 %a0, %b
  store i8 %c0, @c[0]
  %a1 = load i8 @a[1]
  %c1 = mul i8 %a1, %b
  store i8 %c1, @c[1]
  ret
}
)";

ParseError::Kind parseErrorKind(std::string_view text) {
  try {
    parse(text);
  } catch (const ParseError &e) {
    return e.kind();
  }
  ADD_FAILURE() << "no parse error for:\n" << text;
  return ParseError::Kind::Syntax;
}

} // namespace

TEST(Bits, Helpers) {
  EXPECT_EQ(truncBits(0x1ff, 8), 0xffu);
  EXPECT_EQ(truncBits(~uint64_t{0}, 64), ~uint64_t{0});
  EXPECT_EQ(signExtend(0x80, 8), -128);
  EXPECT_EQ(signExtend(0x7f, 8), 127);
  EXPECT_EQ(valueOf(0xff, Type::u(8)), 255);
  EXPECT_EQ(valueOf(0xff, Type::s(8)), -1);
  EXPECT_TRUE(fitsIn(-8, Type::s(4)));
  EXPECT_FALSE(fitsIn(8, Type::s(4)));
  EXPECT_FALSE(fitsIn(-1, Type::u(4)));
  EXPECT_EQ(minValue(Type::s(12)), -2048);
  EXPECT_EQ(maxValue(Type::u(12)), 4095);
  EXPECT_EQ(toString(Type::u(4)), "u4");
  EXPECT_EQ(toString(Type::s(24)), "i24");
}

TEST(Parse, Fig3Kernel) {
  Function f = parse(kFig3);
  EXPECT_EQ(f.name, "fig3");
  ASSERT_EQ(f.body.size(), 7u); // six instructions and the terminator
  EXPECT_EQ(f.body[1].op, Opcode::Mul);
  EXPECT_EQ(f.body[2].op, Opcode::Store);
  EXPECT_EQ(f.body[2].operands[1].name, "c");
  EXPECT_EQ(f.body[2].operands[1].payload, 0u);
  EXPECT_EQ(f.body.back().op, Opcode::Ret);
  EXPECT_TRUE(validate(f).empty());
}

TEST(Parse, EmptyBody) {
  Function f = parse("func @e() { ret }");
  ASSERT_EQ(f.body.size(), 1u);
  EXPECT_EQ(f.body[0].op, Opcode::Ret);
}

TEST(Parse, Errors) {
  EXPECT_EQ(parseErrorKind("func @f(i8 %z) {\n  %x = add i8 %y, %z\n"
                           "  %y = add i8 %z, %z\n  ret\n}\n"),
            ParseError::Kind::UseBeforeDef);
  EXPECT_EQ(parseErrorKind("func @f(i8 %z) {\n  %x = add i8 %z, %z\n"
                           "  %x = add i8 %z, %z\n  ret\n}\n"),
            ParseError::Kind::DuplicateDef);
  EXPECT_EQ(parseErrorKind("func @f(i8 %y, i12 %z) {\n  %x = add i8 %y, %z\n"
                           "  ret\n}\n"),
            ParseError::Kind::WidthMismatch);
  EXPECT_EQ(parseErrorKind("func @f() {\n  %x = frob i8 1, 2\n  ret\n}\n"),
            ParseError::Kind::Syntax);
  EXPECT_EQ(parseErrorKind("func @f() {\n  %x = add i8 300, 2\n  ret\n}\n"),
            ParseError::Kind::Syntax);
}

TEST(Parse, ErrorPosition) {
  try {
    parse("func @f() {\n  ret\n  %x = frob i8 1, 2\n}\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_GE(e.col(), 1u);
  }
}

TEST(Print, ConstantAdd) {
  Function f = parse("func @k() {\n  %x = add i8 3, -4\n  ret i8 %x\n}\n");
  EXPECT_EQ(print(f), "func @k() {\n  %x = add i8 3, -4\n  ret i8 %x\n}\n");
}

TEST(Print, RoundTripCorpus) {
  for (const auto &p : testutil::corpusFiles()) {
    SCOPED_TRACE(p.string());
    Function f = parse(testutil::readText(p));
    std::string once = print(f);
    Function g = parse(once);
    EXPECT_TRUE(f.structurallyEquals(g));
    EXPECT_EQ(print(g), once);
  }
}

TEST(Print, CarriedAnnotations) {
  Function f = parse(testutil::readText(testutil::corpus("edge/fig4.sir")));
  ASSERT_EQ(f.carried.size(), 2u);
  EXPECT_EQ(f.carried[0], (CarriedEdge{"c", "a", 1}));
  EXPECT_NE(print(f).find(";; carried %d -> %b distance 1"), std::string::npos);
}

TEST(Validate, Diagnostics) {
  Function f = parse(kFig3);
  EXPECT_TRUE(validate(f).empty());

  Function dup = f;
  dup.body[4].result = "c0"; // second definition of %c0
  auto d = validate(dup);
  ASSERT_FALSE(d.empty());
  EXPECT_EQ(d.front().kind, DiagKind::DuplicateDef);

  Function wide = f;
  wide.body[1].operands[1].type = Type::s(12);
  d = validate(wide);
  ASSERT_FALSE(d.empty());
  EXPECT_EQ(d.front().kind, DiagKind::WidthMismatch);

  Function cast = parse("func @c(i8 %x) {\n  %y = sext i8 %x to i16\n"
                        "  ret i16 %y\n}\n");
  cast.body[0].type = Type::s(4); // sext that narrows
  d = validate(cast);
  ASSERT_FALSE(d.empty());
  EXPECT_EQ(d.front().kind, DiagKind::BadCast);

  Function noRet = f;
  noRet.body.pop_back();
  d = validate(noRet);
  ASSERT_FALSE(d.empty());
  EXPECT_EQ(d.front().kind, DiagKind::MisplacedRet);
}

TEST(Validate, Extract) {
  Function f = parse("func @e(i64 %w) {\n  %lo = extract i32 %w, 0\n"
                     "  %hi = extract i32 %w, 32\n  ret i32 %hi\n}\n");
  EXPECT_TRUE(validate(f).empty());
  f.body[1].bitOffset = 40;
  auto d = validate(f);
  ASSERT_FALSE(d.empty());
  EXPECT_EQ(d.front().kind, DiagKind::BadExtract);
}

TEST(Function, FreshNamesAndIds) {
  Function f = parse(kFig3);
  EXPECT_EQ(f.freshName("c"), "c2");
  EXPECT_EQ(f.freshName("pk"), "pk0");
  InstId before = f.body[3].id;
  Instruction extra;
  extra.op = Opcode::Load;
  extra.result = "z";
  extra.type = Type::s(8);
  extra.operands.push_back(Operand::memory("a", 9));
  f.insert(0, extra);
  EXPECT_EQ(f.body[4].id, before);
  EXPECT_EQ(f.indexOf(before), 4u);
  EXPECT_EQ(f.defIndex("z"), 0u);
  EXPECT_EQ(*f.typeOf("b"), Type::s(8));
}
