#include <algorithm>

#include "bound.hpp"
#include "falsify/stl.hpp"

namespace falsify::stl {

namespace {

using detail::BoundExpr;
using detail::Window;

// Below this many samples the OpenMP fork/join costs more than the loops.
constexpr std::ptrdiff_t kParallelMinSamples = 128;

std::vector<double> atom_trace(const BoundExpr& f, const Signal& w) {
  const auto n = static_cast<std::ptrdiff_t>(w.size());
  const double* base = w.values().data();
  const std::size_t dim = w.dim();
  std::vector<double> out(w.size());
#pragma omp parallel for schedule(static) if (n >= kParallelMinSamples)
  for (std::ptrdiff_t j = 0; j < n; ++j) out[j] = f(base + j * dim);
  return out;
}

// out[i] = max_{j in i+win} min(rhs[j], min_{i <= k < j} lhs[k])
std::vector<double> until_trace(const std::vector<double>& lhs, const std::vector<double>& rhs,
                                const Window& win) {
  const std::size_t n = lhs.size();
  std::vector<double> out(n, -kInf);
#pragma omp parallel for schedule(dynamic, 16) if (static_cast<std::ptrdiff_t>(n) >= kParallelMinSamples)
  for (std::ptrdiff_t si = 0; si < static_cast<std::ptrdiff_t>(n); ++si) {
    const auto i = static_cast<std::size_t>(si);
    if (win.lo > n - 1 - i) continue;
    const std::size_t first = i + win.lo;
    const std::size_t last = detail::last_index(i, win, n);
    double best = -kInf;
    double prefix = kInf;
    for (std::size_t j = i; j <= last; ++j) {
      if (j >= first) best = std::max(best, std::min(rhs[j], prefix));
      prefix = std::min(prefix, lhs[j]);
      // every later candidate is bounded by prefix
      if (prefix <= best) break;
    }
    out[i] = best;
  }
  return out;
}

std::vector<double> trace(const Signal& w, const Formula& f) {
  using Kind = Formula::Kind;
  switch (f.kind) {
    case Kind::Atom: return atom_trace(detail::bind(f.atom, w), w);
    case Kind::False: return std::vector<double>(w.size(), -kInf);
    case Kind::Not: {
      auto r = trace(w, f.children[0]);
      for (double& v : r) v = -v;
      return r;
    }
    case Kind::And: {
      auto a = trace(w, f.children[0]);
      const auto b = trace(w, f.children[1]);
      for (std::size_t j = 0; j < a.size(); ++j) a[j] = std::min(a[j], b[j]);
      return a;
    }
    case Kind::Until:
      return until_trace(trace(w, f.children[0]), trace(w, f.children[1]),
                         detail::window(f.interval, w.step()));
  }
  return {};
}

std::vector<char> sat_trace(const Signal& w, const Formula& f) {
  using Kind = Formula::Kind;
  const std::size_t n = w.size();
  switch (f.kind) {
    case Kind::Atom: {
      const auto r = atom_trace(detail::bind(f.atom, w), w);
      std::vector<char> out(n);
      for (std::size_t j = 0; j < n; ++j) out[j] = r[j] > 0.0;
      return out;
    }
    case Kind::False: return std::vector<char>(n, 0);
    case Kind::Not: {
      auto s = sat_trace(w, f.children[0]);
      for (char& v : s) v = !v;
      return s;
    }
    case Kind::And: {
      auto a = sat_trace(w, f.children[0]);
      const auto b = sat_trace(w, f.children[1]);
      for (std::size_t j = 0; j < n; ++j) a[j] = a[j] && b[j];
      return a;
    }
    case Kind::Until: {
      const auto lhs = sat_trace(w, f.children[0]);
      const auto rhs = sat_trace(w, f.children[1]);
      const Window win = detail::window(f.interval, w.step());
      std::vector<char> out(n, 0);
      for (std::size_t i = 0; i < n; ++i) {
        if (win.lo > n - 1 - i) continue;
        const std::size_t last = detail::last_index(i, win, n);
        for (std::size_t j = i; j <= last; ++j) {
          if (j >= i + win.lo && rhs[j]) {
            out[i] = 1;
            break;
          }
          if (!lhs[j]) break;
        }
      }
      return out;
    }
  }
  return {};
}

}  // namespace

std::vector<double> robustness_trace(const Signal& w, const Formula& f) { return trace(w, f); }

double robustness(const Signal& w, const Formula& f) { return trace(w, f).front(); }

std::vector<char> satisfaction_trace(const Signal& w, const Formula& f) { return sat_trace(w, f); }

bool boolean_sat(const Signal& w, const Formula& f) { return sat_trace(w, f).front() != 0; }

}  // namespace falsify::stl
