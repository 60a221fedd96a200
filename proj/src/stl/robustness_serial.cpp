#include <algorithm>

#include "bound.hpp"
#include "falsify/stl.hpp"

namespace falsify::stl::serial {

std::vector<double> robustness_trace(const Signal& w, const Formula& f) {
  using Kind = Formula::Kind;
  const std::size_t n = w.size();
  std::vector<double> out(n);
  switch (f.kind) {
    case Kind::Atom: {
      const auto g = detail::bind(f.atom, w);
      for (std::size_t j = 0; j < n; ++j) out[j] = g(w.sample(j).data());
      break;
    }
    case Kind::False:
      std::fill(out.begin(), out.end(), -kInf);
      break;
    case Kind::Not: {
      const auto a = serial::robustness_trace(w, f.children[0]);
      for (std::size_t j = 0; j < n; ++j) out[j] = -a[j];
      break;
    }
    case Kind::And: {
      const auto a = serial::robustness_trace(w, f.children[0]);
      const auto b = serial::robustness_trace(w, f.children[1]);
      for (std::size_t j = 0; j < n; ++j) out[j] = std::min(a[j], b[j]);
      break;
    }
    case Kind::Until: {
      const auto lhs = serial::robustness_trace(w, f.children[0]);
      const auto rhs = serial::robustness_trace(w, f.children[1]);
      const auto win = detail::window(f.interval, w.step());
      for (std::size_t i = 0; i < n; ++i) {
        double best = -kInf;
        double prefix = kInf;
        for (std::size_t j = i; j < n; ++j) {
          const std::size_t offset = j - i;
          if (offset >= win.lo && offset <= win.hi) best = std::max(best, std::min(rhs[j], prefix));
          prefix = std::min(prefix, lhs[j]);
        }
        out[i] = best;
      }
      break;
    }
  }
  return out;
}

double robustness(const Signal& w, const Formula& f) { return serial::robustness_trace(w, f).front(); }

}  // namespace falsify::stl::serial
