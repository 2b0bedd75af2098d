/*
 * This file is part of vogrid, a desk-scale virtual-organization grid.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "vogrid/jdl.hpp"

#include <algorithm>
#include <cctype>

#include "vogrid/errors.hpp"
#include "vogrid/util.hpp"

namespace vogrid::jdl {

ExprPtr lit(Value v) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Lit;
  e->lit = std::move(v);
  return e;
}

ExprPtr ref(Scope s, std::string name, bool explicit_scope) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Ref;
  e->scope = s;
  e->name = std::move(name);
  e->explicit_scope = explicit_scope;
  return e;
}

ExprPtr unary(UnOp op, ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Unary;
  e->un = op;
  e->a = std::move(a);
  return e;
}

ExprPtr binary(BinOp op, ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Binary;
  e->bin = op;
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}

ExprPtr list_expr(std::vector<ExprPtr> items) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::List;
  e->items = std::move(items);
  return e;
}

ExprPtr member_expr(ExprPtr list, ExprPtr value) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Member;
  e->a = std::move(list);
  e->b = std::move(value);
  return e;
}

ExprPtr true_expr() { return lit(Value::boolean(true)); }

void ClassAd::set(const std::string& name, ExprPtr e) {
  for (auto& [n, expr] : attrs_) {
    if (iequals(n, name)) {
      expr = std::move(e);
      return;
    }
  }
  attrs_.emplace_back(name, std::move(e));
}

ExprPtr ClassAd::find(const std::string& name) const {
  for (const auto& [n, expr] : attrs_)
    if (iequals(n, name)) return expr;
  return nullptr;
}

void ClassAd::erase(const std::string& name) {
  attrs_.erase(std::remove_if(attrs_.begin(), attrs_.end(),
                              [&](const auto& p) { return iequals(p.first, name); }),
               attrs_.end());
}

// --------------------------------------------------------------------------
// Lexer / parser
// --------------------------------------------------------------------------

namespace {

enum class Tok {
  End, LBracket, RBracket, LBrace, RBrace, LParen, RParen, Semi, Comma, Assign,
  Eq, Ne, Lt, Le, Gt, Ge, And, Or, Not, Plus, Minus, Star, Slash, Dot,
  Ident, Int, Real, Str,
};

struct Token {
  Tok kind;
  std::string text;
  std::int64_t ival = 0;
  double rval = 0.0;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

  [[noreturn]] void error(const std::string& msg, const Token& at) const {
    fail(Errc::ParseError,
         "line " + std::to_string(at.line) + ", col " + std::to_string(at.col) + ": " + msg);
  }

 private:
  void advance() {
    skip_ws();
    tok_ = Token{};
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= src_.size()) {
      tok_.kind = Tok::End;
      return;
    }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        tok_.text += get();
      tok_.kind = Tok::Ident;
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      number();
      return;
    }
    if (c == '"') {
      string_lit();
      return;
    }
    get();
    switch (c) {
      case '[': tok_.kind = Tok::LBracket; return;
      case ']': tok_.kind = Tok::RBracket; return;
      case '{': tok_.kind = Tok::LBrace; return;
      case '}': tok_.kind = Tok::RBrace; return;
      case '(': tok_.kind = Tok::LParen; return;
      case ')': tok_.kind = Tok::RParen; return;
      case ';': tok_.kind = Tok::Semi; return;
      case ',': tok_.kind = Tok::Comma; return;
      case '.': tok_.kind = Tok::Dot; return;
      case '+': tok_.kind = Tok::Plus; return;
      case '-': tok_.kind = Tok::Minus; return;
      case '*': tok_.kind = Tok::Star; return;
      case '/': tok_.kind = Tok::Slash; return;
      case '=':
        if (match('=')) tok_.kind = Tok::Eq;
        else tok_.kind = Tok::Assign;
        return;
      case '!':
        if (match('=')) tok_.kind = Tok::Ne;
        else tok_.kind = Tok::Not;
        return;
      case '<':
        if (match('=')) tok_.kind = Tok::Le;
        else tok_.kind = Tok::Lt;
        return;
      case '>':
        if (match('=')) tok_.kind = Tok::Ge;
        else tok_.kind = Tok::Gt;
        return;
      case '&':
        if (match('&')) { tok_.kind = Tok::And; return; }
        break;
      case '|':
        if (match('|')) { tok_.kind = Tok::Or; return; }
        break;
      default: break;
    }
    fail(Errc::ParseError, "line " + std::to_string(tok_.line) + ", col " +
                               std::to_string(tok_.col) + ": unexpected character '" +
                               std::string(1, c) + "'");
  }

  void number() {
    std::string text;
    bool real = false;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) text += get();
    if (pos_ < src_.size() && src_[pos_] == '.' && pos_ + 1 < src_.size() &&
        std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
      real = true;
      text += get();
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) text += get();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      std::string exp;
      exp += get();
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) exp += get();
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) exp += get();
        text += exp;
        real = true;
      } else {
        pos_ = save;  // not an exponent after all
      }
    }
    tok_.text = text;
    if (real) {
      tok_.kind = Tok::Real;
      tok_.rval = parse_real(text).value_or(0.0);
    } else {
      auto v = parse_int(text);
      if (!v)
        fail(Errc::ParseError, "line " + std::to_string(tok_.line) + ": integer '" + text +
                                   "' out of range");
      tok_.kind = Tok::Int;
      tok_.ival = *v;
    }
  }

  void string_lit() {
    get();  // opening quote
    std::string out;
    while (pos_ < src_.size() && src_[pos_] != '"') {
      char c = get();
      if (c == '\\' && pos_ < src_.size()) {
        char esc = get();
        switch (esc) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: out += esc; break;
        }
      } else {
        out += c;
      }
    }
    if (pos_ >= src_.size())
      fail(Errc::ParseError, "line " + std::to_string(tok_.line) + ", col " +
                                 std::to_string(tok_.col) + ": unterminated string");
    get();  // closing quote
    tok_.kind = Tok::Str;
    tok_.text = std::move(out);
  }

  void skip_ws() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') get();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        get();
      } else {
        break;
      }
    }
  }

  char get() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  bool match(char c) {
    if (pos_ < src_.size() && src_[pos_] == c) {
      get();
      return true;
    }
    return false;
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

class Parser {
 public:
  explicit Parser(const std::string& src) : lex_(src) {}

  ClassAd parse_ad() {
    expect(Tok::LBracket, "expected '['");
    ClassAd ad;
    while (lex_.peek().kind != Tok::RBracket) {
      Token name = lex_.take();
      if (name.kind != Tok::Ident) lex_.error("expected attribute name", name);
      if (is_keyword(name.text)) lex_.error("reserved word '" + name.text + "' cannot name an attribute", name);
      if (ad.has(name.text)) lex_.error("duplicate attribute '" + name.text + "'", name);
      expect(Tok::Assign, "expected '=' after attribute name");
      ad.set(name.text, expr());
      if (lex_.peek().kind == Tok::Semi) {
        lex_.take();
      } else if (lex_.peek().kind != Tok::RBracket) {
        lex_.error("expected ';' or ']'", lex_.peek());
      }
    }
    lex_.take();  // ']'
    Token end = lex_.take();
    if (end.kind != Tok::End) lex_.error("trailing input after ']'", end);
    return ad;
  }

  ExprPtr parse_single_expr() {
    ExprPtr e = expr();
    Token end = lex_.take();
    if (end.kind != Tok::End) lex_.error("trailing input after expression", end);
    return e;
  }

 private:
  static bool is_keyword(const std::string& s) {
    return iequals(s, "true") || iequals(s, "false") || iequals(s, "undefined") ||
           iequals(s, "self") || iequals(s, "other") || iequals(s, "member");
  }

  ExprPtr expr() { return or_expr(); }

  ExprPtr or_expr() {
    ExprPtr e = and_expr();
    while (lex_.peek().kind == Tok::Or) {
      lex_.take();
      e = binary(BinOp::Or, e, and_expr());
    }
    return e;
  }

  ExprPtr and_expr() {
    ExprPtr e = cmp_expr();
    while (lex_.peek().kind == Tok::And) {
      lex_.take();
      e = binary(BinOp::And, e, cmp_expr());
    }
    return e;
  }

  ExprPtr cmp_expr() {
    ExprPtr e = add_expr();
    for (;;) {
      BinOp op;
      switch (lex_.peek().kind) {
        case Tok::Eq: op = BinOp::Eq; break;
        case Tok::Ne: op = BinOp::Ne; break;
        case Tok::Lt: op = BinOp::Lt; break;
        case Tok::Le: op = BinOp::Le; break;
        case Tok::Gt: op = BinOp::Gt; break;
        case Tok::Ge: op = BinOp::Ge; break;
        default: return e;
      }
      lex_.take();
      e = binary(op, e, add_expr());
    }
  }

  ExprPtr add_expr() {
    ExprPtr e = mul_expr();
    for (;;) {
      if (lex_.peek().kind == Tok::Plus) {
        lex_.take();
        e = binary(BinOp::Add, e, mul_expr());
      } else if (lex_.peek().kind == Tok::Minus) {
        lex_.take();
        e = binary(BinOp::Sub, e, mul_expr());
      } else {
        return e;
      }
    }
  }

  ExprPtr mul_expr() {
    ExprPtr e = unary_expr();
    for (;;) {
      if (lex_.peek().kind == Tok::Star) {
        lex_.take();
        e = binary(BinOp::Mul, e, unary_expr());
      } else if (lex_.peek().kind == Tok::Slash) {
        lex_.take();
        e = binary(BinOp::Div, e, unary_expr());
      } else {
        return e;
      }
    }
  }

  ExprPtr unary_expr() {
    if (lex_.peek().kind == Tok::Not) {
      lex_.take();
      return unary(UnOp::Not, unary_expr());
    }
    if (lex_.peek().kind == Tok::Minus) {
      lex_.take();
      return unary(UnOp::Neg, unary_expr());
    }
    return primary();
  }

  ExprPtr primary() {
    Token t = lex_.take();
    switch (t.kind) {
      case Tok::Int: return lit(Value::integer(t.ival));
      case Tok::Real: return lit(Value::real(t.rval));
      case Tok::Str: return lit(Value::str(t.text));
      case Tok::LParen: {
        ExprPtr e = expr();
        expect(Tok::RParen, "expected ')'");
        return e;
      }
      case Tok::LBrace: {
        std::vector<ExprPtr> items;
        if (lex_.peek().kind != Tok::RBrace) {
          items.push_back(expr());
          while (lex_.peek().kind == Tok::Comma) {
            lex_.take();
            items.push_back(expr());
          }
        }
        expect(Tok::RBrace, "expected '}'");
        return list_expr(std::move(items));
      }
      case Tok::Ident: {
        if (iequals(t.text, "true")) return lit(Value::boolean(true));
        if (iequals(t.text, "false")) return lit(Value::boolean(false));
        if (iequals(t.text, "undefined")) return lit(Value::undefined());
        if (iequals(t.text, "member")) {
          expect(Tok::LParen, "expected '(' after member");
          ExprPtr l = expr();
          expect(Tok::Comma, "expected ',' in member()");
          ExprPtr v = expr();
          expect(Tok::RParen, "expected ')'");
          return member_expr(std::move(l), std::move(v));
        }
        if (iequals(t.text, "self") || iequals(t.text, "other")) {
          Scope sc = iequals(t.text, "self") ? Scope::Self : Scope::Other;
          expect(Tok::Dot, "expected '.' after scope");
          Token name = lex_.take();
          if (name.kind != Tok::Ident || is_keyword(name.text))
            lex_.error("expected attribute name after scope", name);
          return ref(sc, name.text, true);
        }
        return ref(Scope::Self, t.text, false);
      }
      default:
        lex_.error("unexpected token", t);
    }
  }

  void expect(Tok k, const std::string& msg) {
    Token t = lex_.take();
    if (t.kind != k) lex_.error(msg, t);
  }

  Lexer lex_;
};

}  // namespace

ClassAd parse_classad(const std::string& text) { return Parser(text).parse_ad(); }

ExprPtr parse_expr(const std::string& text) { return Parser(text).parse_single_expr(); }

// --------------------------------------------------------------------------
// Printing
// --------------------------------------------------------------------------

namespace {

int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Binary:
      switch (e.bin) {
        case BinOp::Or: return 1;
        case BinOp::And: return 2;
        case BinOp::Eq: case BinOp::Ne: case BinOp::Lt:
        case BinOp::Le: case BinOp::Gt: case BinOp::Ge: return 3;
        case BinOp::Add: case BinOp::Sub: return 4;
        case BinOp::Mul: case BinOp::Div: return 5;
      }
      return 0;
    case Expr::Kind::Unary: return 6;
    default: return 7;
  }
}

const char* op_text(BinOp op) {
  switch (op) {
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::And: return "&&";
    case BinOp::Or: return "||";
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
  }
  return "?";
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c; break;
    }
  }
  return out;
}

std::string print_value(const Value& v) {
  switch (v.kind) {
    case Value::Kind::Undefined: return "undefined";
    case Value::Kind::Bool: return v.b ? "true" : "false";
    case Value::Kind::Int: return std::to_string(v.i);
    case Value::Kind::Real: return format_real(v.r);
    case Value::Kind::Str: return "\"" + escape(v.s) + "\"";
    case Value::Kind::List: {
      std::string out = "{";
      for (std::size_t i = 0; i < v.list.size(); ++i) {
        if (i) out += ",";
        out += print_value(v.list[i]);
      }
      return out + "}";
    }
  }
  return "undefined";
}

std::string print_rec(const Expr& e, int parent_prec) {
  std::string out;
  int prec = precedence(e);
  switch (e.kind) {
    case Expr::Kind::Lit:
      out = print_value(e.lit);
      break;
    case Expr::Kind::Ref:
      if (e.explicit_scope) out = (e.scope == Scope::Self ? "self." : "other.") + e.name;
      else out = e.name;
      break;
    case Expr::Kind::Unary:
      out = (e.un == UnOp::Not ? "!" : "-") + print_rec(*e.a, prec);
      break;
    case Expr::Kind::Binary:
      out = print_rec(*e.a, prec) + " " + op_text(e.bin) + " " + print_rec(*e.b, prec + 1);
      break;
    case Expr::Kind::List: {
      out = "{";
      for (std::size_t i = 0; i < e.items.size(); ++i) {
        if (i) out += ",";
        out += print_rec(*e.items[i], 0);
      }
      out += "}";
      break;
    }
    case Expr::Kind::Member:
      out = "member(" + print_rec(*e.a, 0) + "," + print_rec(*e.b, 0) + ")";
      break;
  }
  if (prec < parent_prec) return "(" + out + ")";
  return out;
}

}  // namespace

std::string print_expr(const Expr& e) { return print_rec(e, 0); }

std::string print(const ClassAd& ad) {
  std::vector<std::pair<std::string, ExprPtr>> sorted(ad.attrs().begin(), ad.attrs().end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return to_lower(a.first) < to_lower(b.first);
  });
  std::string out = "[ ";
  for (const auto& [name, expr] : sorted) out += name + " = " + print_expr(*expr) + "; ";
  out += "]";
  return out;
}

// --------------------------------------------------------------------------
// Structural equality
// --------------------------------------------------------------------------

namespace {

bool value_equal(const Value& a, const Value& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Value::Kind::Undefined: return true;
    case Value::Kind::Bool: return a.b == b.b;
    case Value::Kind::Int: return a.i == b.i;
    case Value::Kind::Real: return a.r == b.r;
    case Value::Kind::Str: return a.s == b.s;
    case Value::Kind::List:
      if (a.list.size() != b.list.size()) return false;
      for (std::size_t i = 0; i < a.list.size(); ++i)
        if (!value_equal(a.list[i], b.list[i])) return false;
      return true;
  }
  return false;
}

}  // namespace

bool equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::Lit: return value_equal(a.lit, b.lit);
    case Expr::Kind::Ref:
      return a.scope == b.scope && a.explicit_scope == b.explicit_scope && iequals(a.name, b.name);
    case Expr::Kind::Unary: return a.un == b.un && equal(*a.a, *b.a);
    case Expr::Kind::Binary: return a.bin == b.bin && equal(*a.a, *b.a) && equal(*a.b, *b.b);
    case Expr::Kind::List:
      if (a.items.size() != b.items.size()) return false;
      for (std::size_t i = 0; i < a.items.size(); ++i)
        if (!equal(*a.items[i], *b.items[i])) return false;
      return true;
    case Expr::Kind::Member: return equal(*a.a, *b.a) && equal(*a.b, *b.b);
  }
  return false;
}

bool equal(const ClassAd& a, const ClassAd& b) {
  if (a.attrs().size() != b.attrs().size()) return false;
  for (const auto& [name, expr] : a.attrs()) {
    ExprPtr other = b.find(name);
    if (!other || !equal(*expr, *other)) return false;
  }
  return true;
}

// --------------------------------------------------------------------------
// Evaluation
// --------------------------------------------------------------------------

namespace {

constexpr int kMaxRefDepth = 32;

Value eval_rec(const Expr& e, const ClassAd& self, const ClassAd& other, int depth);

Value compare(BinOp op, const Value& a, const Value& b) {
  if (a.is_undefined() || b.is_undefined()) return Value::undefined();
  int cmp;
  if (a.numeric() && b.numeric()) {
    if (a.kind == Value::Kind::Int && b.kind == Value::Kind::Int)
      cmp = a.i < b.i ? -1 : a.i > b.i ? 1 : 0;
    else {
      double x = a.as_real(), y = b.as_real();
      cmp = x < y ? -1 : x > y ? 1 : 0;
    }
  } else if (a.kind == Value::Kind::Str && b.kind == Value::Kind::Str) {
    cmp = a.s < b.s ? -1 : a.s > b.s ? 1 : 0;  // case-sensitive
  } else if (a.kind == Value::Kind::Bool && b.kind == Value::Kind::Bool) {
    if (op != BinOp::Eq && op != BinOp::Ne) return Value::undefined();
    cmp = a.b == b.b ? 0 : 1;
  } else {
    return Value::undefined();  // type confusion, including lists
  }
  switch (op) {
    case BinOp::Eq: return Value::boolean(cmp == 0);
    case BinOp::Ne: return Value::boolean(cmp != 0);
    case BinOp::Lt: return Value::boolean(cmp < 0);
    case BinOp::Le: return Value::boolean(cmp <= 0);
    case BinOp::Gt: return Value::boolean(cmp > 0);
    case BinOp::Ge: return Value::boolean(cmp >= 0);
    default: return Value::undefined();
  }
}

Value arith(BinOp op, const Value& a, const Value& b) {
  if (!a.numeric() || !b.numeric()) return Value::undefined();
  if (a.kind == Value::Kind::Int && b.kind == Value::Kind::Int) {
    switch (op) {
      case BinOp::Add: return Value::integer(a.i + b.i);
      case BinOp::Sub: return Value::integer(a.i - b.i);
      case BinOp::Mul: return Value::integer(a.i * b.i);
      case BinOp::Div:
        if (b.i == 0) return Value::undefined();
        return Value::integer(a.i / b.i);
      default: return Value::undefined();
    }
  }
  double x = a.as_real(), y = b.as_real();
  switch (op) {
    case BinOp::Add: return Value::real(x + y);
    case BinOp::Sub: return Value::real(x - y);
    case BinOp::Mul: return Value::real(x * y);
    case BinOp::Div:
      if (y == 0.0) return Value::undefined();
      return Value::real(x / y);
    default: return Value::undefined();
  }
}

// Three-valued logic. Non-boolean operands degrade to undefined.
Value logic(BinOp op, const Value& a, const Value& b) {
  auto tri = [](const Value& v) -> int {  // 0=false 1=true 2=undefined
    if (v.kind == Value::Kind::Bool) return v.b ? 1 : 0;
    return 2;
  };
  int x = tri(a), y = tri(b);
  if (op == BinOp::And) {
    if (x == 0 || y == 0) return Value::boolean(false);
    if (x == 2 || y == 2) return Value::undefined();
    return Value::boolean(true);
  }
  if (x == 1 || y == 1) return Value::boolean(true);
  if (x == 2 || y == 2) return Value::undefined();
  return Value::boolean(false);
}

Value eval_member(const Value& list, const Value& needle) {
  if (list.kind != Value::Kind::List || needle.is_undefined()) return Value::undefined();
  bool saw_undefined = false;
  for (const auto& item : list.list) {
    Value eq = compare(BinOp::Eq, item, needle);
    if (eq.is_true()) return Value::boolean(true);
    if (eq.is_undefined()) saw_undefined = true;
  }
  return saw_undefined ? Value::undefined() : Value::boolean(false);
}

Value eval_rec(const Expr& e, const ClassAd& self, const ClassAd& other, int depth) {
  if (depth > kMaxRefDepth) return Value::undefined();
  switch (e.kind) {
    case Expr::Kind::Lit:
      return e.lit;
    case Expr::Kind::Ref: {
      const ClassAd& scope_ad = e.scope == Scope::Self ? self : other;
      ExprPtr target = scope_ad.find(e.name);
      if (!target) return Value::undefined();
      // Dereferencing other.X evaluates X in the other ad's own frame.
      if (e.scope == Scope::Other) return eval_rec(*target, other, self, depth + 1);
      return eval_rec(*target, self, other, depth + 1);
    }
    case Expr::Kind::Unary: {
      Value v = eval_rec(*e.a, self, other, depth);
      if (e.un == UnOp::Not) {
        if (v.kind != Value::Kind::Bool) return Value::undefined();
        return Value::boolean(!v.b);
      }
      if (v.kind == Value::Kind::Int) return Value::integer(-v.i);
      if (v.kind == Value::Kind::Real) return Value::real(-v.r);
      return Value::undefined();
    }
    case Expr::Kind::Binary: {
      Value a = eval_rec(*e.a, self, other, depth);
      Value b = eval_rec(*e.b, self, other, depth);
      switch (e.bin) {
        case BinOp::And: case BinOp::Or: return logic(e.bin, a, b);
        case BinOp::Add: case BinOp::Sub: case BinOp::Mul: case BinOp::Div:
          return arith(e.bin, a, b);
        default: return compare(e.bin, a, b);
      }
    }
    case Expr::Kind::List: {
      std::vector<Value> items;
      items.reserve(e.items.size());
      for (const auto& item : e.items) items.push_back(eval_rec(*item, self, other, depth));
      return Value::list_of(std::move(items));
    }
    case Expr::Kind::Member: {
      Value l = eval_rec(*e.a, self, other, depth);
      Value v = eval_rec(*e.b, self, other, depth);
      return eval_member(l, v);
    }
  }
  return Value::undefined();
}

}  // namespace

Value eval(const Expr& e, const ClassAd& self, const ClassAd& other) {
  return eval_rec(e, self, other, 0);
}

bool matches(const ClassAd& job, const ClassAd& resource) {
  auto requires_ok = [](const ClassAd& s, const ClassAd& o) {
    ExprPtr req = s.find("Requirements");
    if (!req) return true;
    return eval(*req, s, o).is_true();
  };
  return requires_ok(job, resource) && requires_ok(resource, job);
}

double rank(const ClassAd& job, const ClassAd& resource) {
  ExprPtr r = job.find("Rank");
  if (!r) return 0.0;
  Value v = eval(*r, job, resource);
  if (!v.numeric()) return 0.0;
  return v.as_real();
}

// --------------------------------------------------------------------------
// Conventions
// --------------------------------------------------------------------------

ClassAd with_default_requirements(ClassAd ad) {
  if (!ad.has("Requirements")) ad.set("Requirements", true_expr());
  return ad;
}

std::vector<std::string> string_list(const ClassAd& ad, const std::string& attr) {
  ExprPtr e = ad.find(attr);
  if (!e) return {};
  Value v = eval(*e, ad, ad);
  std::vector<std::string> out;
  if (v.kind == Value::Kind::Str) {
    out.push_back(v.s);
  } else if (v.kind == Value::Kind::List) {
    for (const auto& item : v.list)
      if (item.kind == Value::Kind::Str) out.push_back(item.s);
  }
  return out;
}

std::optional<std::string> string_attr(const ClassAd& ad, const std::string& attr) {
  ExprPtr e = ad.find(attr);
  if (!e) return std::nullopt;
  Value v = eval(*e, ad, ad);
  if (v.kind != Value::Kind::Str) return std::nullopt;
  return v.s;
}

std::optional<std::int64_t> int_attr(const ClassAd& ad, const std::string& attr) {
  ExprPtr e = ad.find(attr);
  if (!e) return std::nullopt;
  Value v = eval(*e, ad, ad);
  if (v.kind != Value::Kind::Int) return std::nullopt;
  return v.i;
}

void validate_job_ad(const ClassAd& ad) {
  auto exe = string_attr(ad, "Executable");
  if (!exe || exe->empty()) fail(Errc::ParseError, "JobAd needs a nonempty Executable");
}

void validate_resource_ad(const ClassAd& ad) {
  if (!string_attr(ad, "Name")) fail(Errc::ParseError, "ResourceAd needs a Name");
  auto free_slots = int_attr(ad, "FreeSlots");
  auto max_slots = int_attr(ad, "MaxSlots");
  if (free_slots && max_slots && (*free_slots < 0 || *free_slots > *max_slots))
    fail(Errc::ParseError, "ResourceAd violates 0 <= FreeSlots <= MaxSlots");
}

ClassAd make_resource_ad(const std::string& name, const std::string& site,
                         const std::string& platform, int free_slots, int max_slots,
                         const std::vector<std::string>& installed_packages,
                         const std::vector<std::string>& close_se,
                         const std::string& grid_partition) {
  ClassAd ad;
  ad.set("Name", lit(Value::str(name)));
  ad.set("Site", lit(Value::str(site)));
  ad.set("Platform", lit(Value::str(platform)));
  ad.set("FreeSlots", lit(Value::integer(free_slots)));
  ad.set("MaxSlots", lit(Value::integer(max_slots)));
  auto str_list = [](const std::vector<std::string>& items) {
    std::vector<ExprPtr> out;
    out.reserve(items.size());
    for (const auto& s : items) out.push_back(lit(Value::str(s)));
    return list_expr(std::move(out));
  };
  ad.set("InstalledPackages", str_list(installed_packages));
  ad.set("CloseSE", str_list(close_se));
  ad.set("GridPartition", lit(Value::str(grid_partition)));
  ad.set("Requirements", true_expr());
  return ad;
}

}  // namespace vogrid::jdl
