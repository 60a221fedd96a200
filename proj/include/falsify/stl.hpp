#pragma once

#include <cstddef>
#include <limits>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "falsify/signal.hpp"

namespace falsify::stl {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Arithmetic term over signal variables; the left-hand side of an atom.
struct Expr {
  enum class Op { Const, Var, Neg, Add, Sub, Mul, Abs, Min, Max };

  Op op = Op::Const;
  double value = 0.0;    // Const
  std::string name;      // Var
  std::vector<Expr> args;

  static Expr constant(double v);
  static Expr var(std::string n);
  static Expr unary(Op op, Expr a);
  static Expr binary(Op op, Expr a, Expr b);

  friend bool operator==(const Expr&, const Expr&) = default;
};

/// Closed interval [lo, hi] with 0 <= lo < hi; hi may be +inf.
struct TimeInterval {
  double lo = 0.0;
  double hi = kInf;

  TimeInterval() = default;
  TimeInterval(double lo_, double hi_);

  bool unbounded() const { return hi == kInf; }
  friend bool operator==(const TimeInterval&, const TimeInterval&) = default;
};

/// STL formula in core syntax: atom (f > 0), false, not, and, until.
/// Derived operators are desugared at construction.
struct Formula {
  enum class Kind { Atom, False, Not, And, Until };

  Kind kind = Kind::False;
  Expr atom;                      // Atom: robustness is atom(w(0))
  TimeInterval interval;          // Until
  std::vector<Formula> children;  // Not: 1, And/Until: 2 (left, right)

  friend bool operator==(const Formula&, const Formula&) = default;
};

Formula atom(Expr f);
Formula falsum();
Formula truth();
Formula negation(Formula f);
Formula conj(Formula a, Formula b);
Formula disj(Formula a, Formula b);
Formula implies(Formula a, Formula b);
Formula until(TimeInterval i, Formula a, Formula b);
Formula eventually(TimeInterval i, Formula f);
Formula always(TimeInterval i, Formula f);

std::size_t depth(const Formula& f);
std::set<std::string> variables(const Formula& f);

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Thrown when a formula references a variable the signal lacks.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses the concrete syntax:
///
///   formula := until
///   until   := implies ('U' interval? implies)*        (left-binding)
///   implies := disj ('->' implies)?
///   disj    := conj ('||' conj)*
///   conj    := unary ('&&' unary)*
///   unary   := '!' unary | '[]' interval? unary | '<>' interval? unary
///            | '(' formula ')' | 'true' | 'false' | expr cmp expr
///   interval:= '[' number ',' (number | 'inf') ']'
///   expr    := term (('+'|'-') term)*;  term := factor ('*' factor)*
///   factor  := '-' factor | number | ident | '(' expr ')'
///            | 'abs' '(' expr ')' | ('min'|'max') '(' expr ',' expr ')'
///
/// `a > b` and `a >= b` become atom(a - b); `a < b` and `a <= b` become
/// !(a - b > 0). A right-hand side of literal 0 is not subtracted.
Formula parse(std::string_view text);

/// Canonical core-syntax text; parse(to_string(f)) == f.
std::string to_string(const Formula& f);
std::string to_string(const Expr& e);

double evaluate(const Expr& e, const Signal& w, std::size_t sample);

/// Robustness at every sample instant, evaluated with the OpenMP kernels.
/// Sup/inf range over grid instants; unbounded intervals are clipped to the
/// signal horizon. Throws EvaluationError for unknown variables.
std::vector<double> robustness_trace(const Signal& w, const Formula& f);
double robustness(const Signal& w, const Formula& f);

/// Boolean satisfaction on the same sample grid.
std::vector<char> satisfaction_trace(const Signal& w, const Formula& f);
bool boolean_sat(const Signal& w, const Formula& f);

namespace serial {
/// Single-threaded reference for robustness_trace; same recurrences, no
/// OpenMP. Kept for testing and benchmarking the parallel kernels.
std::vector<double> robustness_trace(const Signal& w, const Formula& f);
double robustness(const Signal& w, const Formula& f);
}  // namespace serial

}  // namespace falsify::stl
