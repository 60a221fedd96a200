#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

#include "falsify/stl.hpp"

namespace falsify::stl {

Expr Expr::constant(double v) {
  Expr e;
  e.op = Op::Const;
  e.value = v;
  return e;
}

Expr Expr::var(std::string n) {
  Expr e;
  e.op = Op::Var;
  e.name = std::move(n);
  return e;
}

Expr Expr::unary(Op op, Expr a) {
  Expr e;
  e.op = op;
  e.args.push_back(std::move(a));
  return e;
}

Expr Expr::binary(Op op, Expr a, Expr b) {
  Expr e;
  e.op = op;
  e.args.push_back(std::move(a));
  e.args.push_back(std::move(b));
  return e;
}

TimeInterval::TimeInterval(double lo_, double hi_) : lo(lo_), hi(hi_) {
  if (!(std::isfinite(lo) && lo >= 0.0)) {
    throw std::invalid_argument("interval lower bound must be finite and non-negative");
  }
  if (std::isnan(hi) || !(lo < hi)) {
    throw std::invalid_argument("interval must be non-singular with lo < hi");
  }
}

Formula atom(Expr f) {
  Formula r;
  r.kind = Formula::Kind::Atom;
  r.atom = std::move(f);
  return r;
}

Formula falsum() { return Formula{}; }

Formula truth() { return negation(falsum()); }

Formula negation(Formula f) {
  Formula r;
  r.kind = Formula::Kind::Not;
  r.children.push_back(std::move(f));
  return r;
}

Formula conj(Formula a, Formula b) {
  Formula r;
  r.kind = Formula::Kind::And;
  r.children.push_back(std::move(a));
  r.children.push_back(std::move(b));
  return r;
}

Formula disj(Formula a, Formula b) {
  return negation(conj(negation(std::move(a)), negation(std::move(b))));
}

Formula implies(Formula a, Formula b) { return disj(negation(std::move(a)), std::move(b)); }

Formula until(TimeInterval i, Formula a, Formula b) {
  Formula r;
  r.kind = Formula::Kind::Until;
  r.interval = i;
  r.children.push_back(std::move(a));
  r.children.push_back(std::move(b));
  return r;
}

Formula eventually(TimeInterval i, Formula f) { return until(i, truth(), std::move(f)); }

Formula always(TimeInterval i, Formula f) {
  return negation(eventually(i, negation(std::move(f))));
}

std::size_t depth(const Formula& f) {
  std::size_t d = 0;
  for (const auto& c : f.children) d = std::max(d, depth(c));
  return f.children.empty() ? 0 : d + 1;
}

namespace {

void collect(const Expr& e, std::set<std::string>& out) {
  if (e.op == Expr::Op::Var) out.insert(e.name);
  for (const auto& a : e.args) collect(a, out);
}

std::string number(double v) {
  if (v == kInf) return "inf";
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

}  // namespace

std::set<std::string> variables(const Formula& f) {
  std::set<std::string> out;
  if (f.kind == Formula::Kind::Atom) collect(f.atom, out);
  for (const auto& c : f.children) out.merge(variables(c));
  return out;
}

std::string to_string(const Expr& e) {
  using Op = Expr::Op;
  switch (e.op) {
    case Op::Const: return number(e.value);
    case Op::Var: return e.name;
    case Op::Neg: return "-(" + to_string(e.args[0]) + ")";
    case Op::Add: return "(" + to_string(e.args[0]) + " + " + to_string(e.args[1]) + ")";
    case Op::Sub: return "(" + to_string(e.args[0]) + " - " + to_string(e.args[1]) + ")";
    case Op::Mul: return "(" + to_string(e.args[0]) + " * " + to_string(e.args[1]) + ")";
    case Op::Abs: return "abs(" + to_string(e.args[0]) + ")";
    case Op::Min: return "min(" + to_string(e.args[0]) + ", " + to_string(e.args[1]) + ")";
    case Op::Max: return "max(" + to_string(e.args[0]) + ", " + to_string(e.args[1]) + ")";
  }
  return {};
}

std::string to_string(const Formula& f) {
  using Kind = Formula::Kind;
  switch (f.kind) {
    case Kind::Atom: return to_string(f.atom) + " > 0";
    case Kind::False: return "false";
    case Kind::Not: return "!(" + to_string(f.children[0]) + ")";
    case Kind::And:
      return "(" + to_string(f.children[0]) + " && " + to_string(f.children[1]) + ")";
    case Kind::Until:
      return "(" + to_string(f.children[0]) + " U[" + number(f.interval.lo) + "," +
             number(f.interval.hi) + "] " + to_string(f.children[1]) + ")";
  }
  return {};
}

double evaluate(const Expr& e, const Signal& w, std::size_t sample) {
  using Op = Expr::Op;
  switch (e.op) {
    case Op::Const: return e.value;
    case Op::Var: {
      auto idx = w.index_of(e.name);
      if (!idx) throw EvaluationError("unknown variable '" + e.name + "'");
      return w.at(sample, *idx);
    }
    case Op::Neg: return -evaluate(e.args[0], w, sample);
    case Op::Add: return evaluate(e.args[0], w, sample) + evaluate(e.args[1], w, sample);
    case Op::Sub: return evaluate(e.args[0], w, sample) - evaluate(e.args[1], w, sample);
    case Op::Mul: return evaluate(e.args[0], w, sample) * evaluate(e.args[1], w, sample);
    case Op::Abs: return std::abs(evaluate(e.args[0], w, sample));
    case Op::Min:
      return std::min(evaluate(e.args[0], w, sample), evaluate(e.args[1], w, sample));
    case Op::Max:
      return std::max(evaluate(e.args[0], w, sample), evaluate(e.args[1], w, sample));
  }
  return 0.0;
}

}  // namespace falsify::stl
