#include <cctype>
#include <charconv>
#include <optional>

#include "falsify/stl.hpp"

namespace falsify::stl {

ParseError::ParseError(const std::string& msg, std::size_t line, std::size_t column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
      line_(line),
      column_(column) {}

namespace {

enum class Tok {
  Number, Ident, LParen, RParen, LBrack, RBrack, Comma,
  Bang, AndAnd, OrOr, Arrow, Box, Diamond, Until,
  Lt, Le, Gt, Ge, EqEq,
  Plus, Minus, Star,
  True, False, Inf, Abs, Min, Max,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  double number = 0.0;
  std::size_t line = 1;
  std::size_t column = 1;
};

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (s[i] == '\n') { ++line; col = 1; } else { ++col; }
    }
  };
  auto push = [&](Tok k, std::size_t len) {
    out.push_back(Token{k, std::string(s.substr(i, len)), 0.0, line, col});
    advance(len);
  };
  while (i < s.size()) {
    const char c = s[i];
    const char d = i + 1 < s.size() ? s[i + 1] : '\0';
    if (std::isspace(static_cast<unsigned char>(c))) { advance(1); continue; }
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && std::isdigit(static_cast<unsigned char>(d)))) {
      std::size_t j = i;
      while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.')) ++j;
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
          j = k;
          while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        }
      }
      Token t{Tok::Number, std::string(s.substr(i, j - i)), 0.0, line, col};
      auto [p, ec] = std::from_chars(s.data() + i, s.data() + j, t.number);
      if (ec != std::errc() || p != s.data() + j) {
        throw ParseError("malformed number '" + t.text + "'", line, col);
      }
      out.push_back(std::move(t));
      advance(j - i);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      const std::string_view w = s.substr(i, j - i);
      Tok k = Tok::Ident;
      if (w == "U") k = Tok::Until;
      else if (w == "true") k = Tok::True;
      else if (w == "false") k = Tok::False;
      else if (w == "inf") k = Tok::Inf;
      else if (w == "abs") k = Tok::Abs;
      else if (w == "min") k = Tok::Min;
      else if (w == "max") k = Tok::Max;
      push(k, j - i);
      continue;
    }
    switch (c) {
      case '(': push(Tok::LParen, 1); continue;
      case ')': push(Tok::RParen, 1); continue;
      case ',': push(Tok::Comma, 1); continue;
      case ']': push(Tok::RBrack, 1); continue;
      case '+': push(Tok::Plus, 1); continue;
      case '*': push(Tok::Star, 1); continue;
      case '[': if (d == ']') push(Tok::Box, 2); else push(Tok::LBrack, 1); continue;
      case '-': if (d == '>') push(Tok::Arrow, 2); else push(Tok::Minus, 1); continue;
      case '!': push(Tok::Bang, 1); continue;
      case '&': if (d == '&') { push(Tok::AndAnd, 2); continue; } break;
      case '|': if (d == '|') { push(Tok::OrOr, 2); continue; } break;
      case '=': if (d == '=') { push(Tok::EqEq, 2); continue; } break;
      case '<':
        if (d == '>') push(Tok::Diamond, 2);
        else if (d == '=') push(Tok::Le, 2);
        else push(Tok::Lt, 1);
        continue;
      case '>': if (d == '=') push(Tok::Ge, 2); else push(Tok::Gt, 1); continue;
      default: break;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line, col);
  }
  out.push_back(Token{Tok::End, "", 0.0, line, col});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Formula parse_all() {
    Formula f = formula();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "' after formula");
    return f;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++pos_;
    return true;
  }
  void expect(Tok k, const char* what) {
    if (!accept(k)) fail(std::string("expected ") + what);
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(msg + " (found " + found + ")", t.line, t.column);
  }

  Formula formula() {
    Formula lhs = implication();
    while (accept(Tok::Until)) {
      TimeInterval i = optional_interval();
      lhs = until(i, std::move(lhs), implication());
    }
    return lhs;
  }

  Formula implication() {
    Formula lhs = disjunction();
    if (accept(Tok::Arrow)) return implies(std::move(lhs), implication());
    return lhs;
  }

  Formula disjunction() {
    Formula lhs = conjunction();
    while (accept(Tok::OrOr)) lhs = disj(std::move(lhs), conjunction());
    return lhs;
  }

  Formula conjunction() {
    Formula lhs = unary();
    while (accept(Tok::AndAnd)) lhs = conj(std::move(lhs), unary());
    return lhs;
  }

  Formula unary() {
    if (accept(Tok::Bang)) return negation(unary());
    if (accept(Tok::Box)) {
      TimeInterval i = optional_interval();
      return always(i, unary());
    }
    if (accept(Tok::Diamond)) {
      TimeInterval i = optional_interval();
      return eventually(i, unary());
    }
    if (accept(Tok::True)) return truth();
    if (accept(Tok::False)) return falsum();
    if (peek().kind == Tok::LParen) {
      // Either a parenthesised formula or an atom whose lhs starts with '('.
      const std::size_t save = pos_;
      try {
        return comparison();
      } catch (const ParseError& as_atom) {
        const std::size_t atom_reach = pos_;
        pos_ = save;
        try {
          expect(Tok::LParen, "'('");
          Formula f = formula();
          expect(Tok::RParen, "')'");
          return f;
        } catch (const ParseError&) {
          if (atom_reach > pos_) throw as_atom;
          throw;
        }
      }
    }
    return comparison();
  }

  Formula comparison() {
    Expr lhs = expr();
    const Tok op = peek().kind;
    if (op == Tok::EqEq) fail("'==' is not supported in atoms");
    if (op != Tok::Lt && op != Tok::Le && op != Tok::Gt && op != Tok::Ge) {
      fail("expected comparison operator");
    }
    ++pos_;
    Expr rhs = expr();
    const bool rhs_zero = rhs.op == Expr::Op::Const && rhs.value == 0.0;
    Expr margin = rhs_zero ? std::move(lhs)
                           : Expr::binary(Expr::Op::Sub, std::move(lhs), std::move(rhs));
    if (op == Tok::Gt || op == Tok::Ge) return atom(std::move(margin));
    return negation(atom(std::move(margin)));
  }

  TimeInterval optional_interval() {
    if (peek().kind != Tok::LBrack) return TimeInterval{};
    const Token& open = peek();
    ++pos_;
    const double lo = signed_number();
    expect(Tok::Comma, "','");
    const double hi = accept(Tok::Inf) ? kInf : signed_number();
    expect(Tok::RBrack, "']'");
    if (!(lo >= 0.0)) throw ParseError("interval lower bound must be non-negative", open.line, open.column);
    if (!(lo < hi)) {
      throw ParseError("interval must satisfy lo < hi (singular or empty interval)", open.line,
                       open.column);
    }
    return TimeInterval(lo, hi);
  }

  double signed_number() {
    const bool neg = accept(Tok::Minus);
    if (peek().kind != Tok::Number) fail("expected number");
    const double v = peek().number;
    ++pos_;
    return neg ? -v : v;
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept(Tok::Plus)) lhs = Expr::binary(Expr::Op::Add, std::move(lhs), term());
      else if (accept(Tok::Minus)) lhs = Expr::binary(Expr::Op::Sub, std::move(lhs), term());
      else return lhs;
    }
  }

  Expr term() {
    Expr lhs = factor();
    while (accept(Tok::Star)) lhs = Expr::binary(Expr::Op::Mul, std::move(lhs), factor());
    return lhs;
  }

  Expr factor() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Minus:
        ++pos_;
        if (peek().kind == Tok::Number) {
          const double v = peek().number;
          ++pos_;
          return Expr::constant(-v);
        }
        return Expr::unary(Expr::Op::Neg, factor());
      case Tok::Number: ++pos_; return Expr::constant(t.number);
      case Tok::Ident: ++pos_; return Expr::var(t.text);
      case Tok::LParen: {
        ++pos_;
        Expr e = expr();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Abs: {
        ++pos_;
        expect(Tok::LParen, "'('");
        Expr e = expr();
        expect(Tok::RParen, "')'");
        return Expr::unary(Expr::Op::Abs, std::move(e));
      }
      case Tok::Min:
      case Tok::Max: {
        ++pos_;
        expect(Tok::LParen, "'('");
        Expr a = expr();
        expect(Tok::Comma, "','");
        Expr b = expr();
        expect(Tok::RParen, "')'");
        return Expr::binary(t.kind == Tok::Min ? Expr::Op::Min : Expr::Op::Max, std::move(a),
                            std::move(b));
      }
      default: fail("expected expression");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse(std::string_view text) { return Parser(lex(text)).parse_all(); }

}  // namespace falsify::stl
