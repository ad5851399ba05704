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
// Line-oriented parser for the `.sir` text format.
//
//===----------------------------------------------------------------------===//

#include "dspslp/ir.h"

#include <cctype>
#include <charconv>
#include <unordered_map>
#include <unordered_set>

namespace dspslp {
namespace {

bool isNameChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

class LineCursor {
public:
  LineCursor(std::string_view text, unsigned line) : text_(text), line_(line) {}

  unsigned col() const { return static_cast<unsigned>(pos_) + 1; }
  unsigned line() const { return line_; }

  void skipSpace() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' ||
                                   text_[pos_] == '\r'))
      ++pos_;
  }

  bool atEnd() {
    skipSpace();
    return pos_ >= text_.size();
  }

  [[noreturn]] void fail(const std::string &msg) const {
    throw ParseError(ParseError::Kind::Syntax, line_, col(), msg);
  }

  bool tryConsume(std::string_view tok) {
    skipSpace();
    if (text_.substr(pos_, tok.size()) != tok)
      return false;
    // Keywords must not run into a following identifier character.
    if (std::isalpha(static_cast<unsigned char>(tok.back())) &&
        pos_ + tok.size() < text_.size() && isNameChar(text_[pos_ + tok.size()]))
      return false;
    pos_ += tok.size();
    return true;
  }

  void expect(std::string_view tok) {
    if (!tryConsume(tok))
      fail("expected '" + std::string(tok) + "'");
  }

  std::string word() {
    skipSpace();
    size_t start = pos_;
    while (pos_ < text_.size() && isNameChar(text_[pos_]))
      ++pos_;
    if (start == pos_)
      fail("expected identifier");
    return std::string(text_.substr(start, pos_ - start));
  }

  /// `%name` or `@name` with the given sigil.
  std::string sigilName(char sigil) {
    skipSpace();
    if (pos_ >= text_.size() || text_[pos_] != sigil)
      fail(std::string("expected '") + sigil + "'");
    ++pos_;
    if (pos_ >= text_.size() || !isNameChar(text_[pos_]))
      fail("expected name after sigil");
    return word();
  }

  bool peek(char c) {
    skipSpace();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  Type type() {
    skipSpace();
    unsigned at = col();
    if (pos_ >= text_.size() || (text_[pos_] != 'i' && text_[pos_] != 'u'))
      fail("expected type");
    Signedness sign = text_[pos_] == 'i' ? Signedness::Signed
                                         : Signedness::Unsigned;
    ++pos_;
    unsigned bits = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_,
                                     text_.data() + text_.size(), bits);
    if (ec != std::errc() || bits < 1 || bits > 64)
      throw ParseError(ParseError::Kind::Syntax, line_, at, "bad type");
    pos_ = static_cast<size_t>(ptr - text_.data());
    if (pos_ < text_.size() && isNameChar(text_[pos_]))
      throw ParseError(ParseError::Kind::Syntax, line_, at, "bad type");
    return {bits, sign};
  }

  /// Signed or unsigned decimal literal; returns the raw 64-bit pattern and
  /// whether it was negative.
  std::pair<uint64_t, bool> integer() {
    skipSpace();
    bool neg = tryConsume("-");
    uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_,
                                     text_.data() + text_.size(), v);
    if (ec != std::errc())
      fail("expected integer");
    pos_ = static_cast<size_t>(ptr - text_.data());
    return {neg ? ~v + 1 : v, neg};
  }

private:
  std::string_view text_;
  unsigned line_;
  size_t pos_ = 0;
};

class Parser {
public:
  explicit Parser(std::string_view text) : text_(text) {}

  Function run() {
    enum class State { Header, Body, Done } state = State::Header;
    unsigned lineNo = 0;
    size_t start = 0;
    while (start <= text_.size()) {
      size_t end = text_.find('\n', start);
      if (end == std::string_view::npos)
        end = text_.size();
      std::string_view line = text_.substr(start, end - start);
      ++lineNo;
      start = end + 1;

      size_t first = line.find_first_not_of(" \t\r");
      if (first != std::string_view::npos &&
          line.substr(first).rfind(";;", 0) == 0) {
        LineCursor c(line, lineNo);
        c.expect(";;");
        if (c.tryConsume("carried")) {
          parseCarried(c);
          continue;
        }
      }
      size_t semi = line.find(';');
      if (semi != std::string_view::npos)
        line = line.substr(0, semi);
      LineCursor c(line, lineNo);
      if (c.atEnd())
        continue;

      switch (state) {
      case State::Header:
        parseHeader(c);
        state = State::Body;
        if (c.tryConsume("ret")) {
          // Single-line form `func @f() { ret }`.
          parseRet(c);
          c.expect("}");
          state = State::Done;
        }
        break;
      case State::Body:
        if (c.tryConsume("}")) {
          state = State::Done;
          break;
        }
        parseInstruction(c);
        break;
      case State::Done:
        c.fail("unexpected text after function body");
      }
      if (!c.atEnd())
        c.fail("unexpected trailing text");
    }
    if (state != State::Done)
      throw ParseError(ParseError::Kind::Syntax, lineNo, 1,
                       state == State::Header ? "missing function"
                                              : "missing '}'");
    finish();
    return std::move(f_);
  }

private:
  void parseHeader(LineCursor &c) {
    c.expect("func");
    f_.name = c.sigilName('@');
    c.expect("(");
    if (!c.tryConsume(")")) {
      do {
        Type t = c.type();
        unsigned col = c.col();
        std::string name = c.sigilName('%');
        defineName(name, c.line(), col);
        f_.args.push_back({name, t});
      } while (c.tryConsume(","));
      c.expect(")");
    }
    c.expect("{");
  }

  void parseCarried(LineCursor &c) {
    CarriedEdge e;
    e.from = c.sigilName('%');
    c.expect("->");
    e.to = c.sigilName('%');
    c.expect("distance");
    auto [v, neg] = c.integer();
    if (neg || v > 1'000'000)
      c.fail("bad distance");
    e.distance = static_cast<unsigned>(v);
    if (!c.atEnd())
      c.fail("unexpected trailing text");
    f_.carried.push_back(std::move(e));
  }

  void defineName(const std::string &name, unsigned line, unsigned col) {
    if (!defined_.insert(name).second)
      throw ParseError(ParseError::Kind::DuplicateDef, line, col,
                       "%" + name + " defined twice");
  }

  Operand valueRef(LineCursor &c, std::optional<Type> stated) {
    unsigned col = c.col();
    if (!c.peek('%')) {
      if (!stated)
        c.fail("expected value");
      auto [raw, neg] = c.integer();
      int64_t v = static_cast<int64_t>(raw);
      bool ok = stated->isSigned()
                    ? fitsIn(v, *stated)
                    : (!neg && (stated->bits == 64 ||
                                raw <= static_cast<uint64_t>(maxValue(*stated))));
      if (!ok)
        throw ParseError(ParseError::Kind::Syntax, c.line(), col,
                         "constant does not fit " + toString(*stated));
      return {Operand::Kind::Constant, {}, truncBits(raw, stated->bits),
              *stated};
    }
    std::string name = c.sigilName('%');
    if (!defined_.count(name))
      throw ParseError(ParseError::Kind::UseBeforeDef, c.line(), col,
                       "%" + name + " used before definition");
    Type t = stated ? *stated : *f_.typeOf(name);
    return Operand::value(std::move(name), t);
  }

  Operand memRef(LineCursor &c) {
    std::string array = c.sigilName('@');
    c.expect("[");
    auto [v, neg] = c.integer();
    if (neg)
      c.fail("negative index");
    c.expect("]");
    return Operand::memory(std::move(array), v);
  }

  void parseRet(LineCursor &c) {
    Instruction inst;
    inst.op = Opcode::Ret;
    if (!c.atEnd() && !c.peek('}')) {
      inst.type = c.type();
      inst.operands.push_back(valueRef(c, inst.type));
    }
    push(std::move(inst), c.line());
  }

  void parseInstruction(LineCursor &c) {
    Instruction inst;
    unsigned resultCol = 0;
    if (c.peek('%')) {
      resultCol = c.col();
      inst.result = c.sigilName('%');
      c.expect("=");
    }
    unsigned opCol = c.col();
    std::string opName = c.word();

    if (opName == "add" || opName == "sub" || opName == "mul") {
      inst.op = opName == "add"   ? Opcode::Add
                : opName == "sub" ? Opcode::Sub
                                  : Opcode::Mul;
      inst.type = c.type();
      inst.operands.push_back(valueRef(c, inst.type));
      c.expect(",");
      inst.operands.push_back(valueRef(c, inst.type));
    } else if (opName == "sext" || opName == "zext" || opName == "trunc") {
      inst.op = opName == "sext"   ? Opcode::SExt
                : opName == "zext" ? Opcode::ZExt
                                   : Opcode::Trunc;
      Type from = c.type();
      inst.operands.push_back(valueRef(c, from));
      c.expect("to");
      inst.type = c.type();
    } else if (opName == "load") {
      inst.op = Opcode::Load;
      inst.type = c.type();
      inst.operands.push_back(memRef(c));
    } else if (opName == "store") {
      inst.op = Opcode::Store;
      inst.type = c.type();
      inst.operands.push_back(valueRef(c, inst.type));
      c.expect(",");
      inst.operands.push_back(memRef(c));
    } else if (opName == "call") {
      inst.op = Opcode::Call;
      if (!c.tryConsume("void"))
        inst.type = c.type();
      inst.callee = c.sigilName('@');
      c.expect("(");
      if (!c.tryConsume(")")) {
        do
          inst.operands.push_back(valueRef(c, std::nullopt));
        while (c.tryConsume(","));
        c.expect(")");
      }
    } else if (opName == "extract") {
      inst.op = Opcode::Extract;
      inst.type = c.type();
      inst.operands.push_back(valueRef(c, std::nullopt));
      c.expect(",");
      auto [v, neg] = c.integer();
      if (neg || v > 63)
        c.fail("bad bit offset");
      inst.bitOffset = static_cast<unsigned>(v);
    } else if (opName == "ret") {
      if (inst.hasResult())
        throw ParseError(ParseError::Kind::Syntax, c.line(), opCol,
                         "ret has no result");
      parseRet(c);
      return;
    } else {
      throw ParseError(ParseError::Kind::Syntax, c.line(), opCol,
                       "unknown opcode '" + opName + "'");
    }

    if (inst.hasResult())
      defineName(inst.result, c.line(), resultCol);
    push(std::move(inst), c.line());
  }

  void push(Instruction inst, unsigned line) {
    f_.append(std::move(inst));
    lines_.push_back(line);
  }

  void finish() {
    for (const Diagnostic &d : validate(f_)) {
      unsigned line = d.index >= 0 ? lines_[static_cast<size_t>(d.index)] : 1;
      ParseError::Kind kind = ParseError::Kind::Syntax;
      if (d.kind == DiagKind::WidthMismatch)
        kind = ParseError::Kind::WidthMismatch;
      else if (d.kind == DiagKind::DuplicateDef)
        kind = ParseError::Kind::DuplicateDef;
      else if (d.kind == DiagKind::UseBeforeDef ||
               d.kind == DiagKind::UndefinedValue)
        kind = ParseError::Kind::UseBeforeDef;
      throw ParseError(kind, line, 1, d.message);
    }
  }

  std::string_view text_;
  Function f_;
  std::unordered_set<std::string> defined_;
  std::vector<unsigned> lines_;
};

} // namespace

Function parse(std::string_view text) { return Parser(text).run(); }

} // namespace dspslp
