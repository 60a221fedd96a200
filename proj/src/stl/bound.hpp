#pragma once

// Formula trees with variable names resolved to signal columns and time
// intervals resolved to sample offsets. Shared by the parallel kernels and
// the serial reference.

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "falsify/stl.hpp"

namespace falsify::stl::detail {

inline constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

struct BoundExpr {
  Expr::Op op;
  double value = 0.0;
  std::size_t column = 0;
  std::vector<BoundExpr> args;

  double operator()(const double* row) const {
    using Op = Expr::Op;
    switch (op) {
      case Op::Const: return value;
      case Op::Var: return row[column];
      case Op::Neg: return -args[0](row);
      case Op::Add: return args[0](row) + args[1](row);
      case Op::Sub: return args[0](row) - args[1](row);
      case Op::Mul: return args[0](row) * args[1](row);
      case Op::Abs: return std::abs(args[0](row));
      case Op::Min: return std::min(args[0](row), args[1](row));
      case Op::Max: return std::max(args[0](row), args[1](row));
    }
    return 0.0;
  }
};

/// Offsets j - i (in samples) admitted by an interval: [lo, hi].
struct Window {
  std::size_t lo = 0;
  std::size_t hi = kUnbounded;
};

inline BoundExpr bind(const Expr& e, const Signal& w) {
  BoundExpr b{e.op, e.value, 0, {}};
  if (e.op == Expr::Op::Var) {
    auto idx = w.index_of(e.name);
    if (!idx) throw EvaluationError("unknown variable '" + e.name + "'");
    b.column = *idx;
  }
  for (const auto& a : e.args) b.args.push_back(bind(a, w));
  return b;
}

inline Window window(const TimeInterval& iv, double step) {
  const double lo = iv.lo / step;
  Window out;
  out.lo = static_cast<std::size_t>(std::ceil(lo - kGridTolerance * std::max(1.0, lo)));
  if (!iv.unbounded()) {
    const double hi = iv.hi / step;
    const double f = std::floor(hi + kGridTolerance * std::max(1.0, hi));
    out.hi = f >= static_cast<double>(kUnbounded) ? kUnbounded : static_cast<std::size_t>(f);
  }
  return out;
}

/// Last sample index reachable from i within the window, clipped to n - 1.
inline std::size_t last_index(std::size_t i, const Window& win, std::size_t n) {
  if (win.hi == kUnbounded || win.hi >= n) return n - 1;
  return std::min(n - 1, i + win.hi);
}

}  // namespace falsify::stl::detail
