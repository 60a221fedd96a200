#include <cmath>
#include <random>

#include "evaluator.hpp"

namespace falsify::hillclimb {

namespace {

// Folds v back into [0, 1] by mirror reflection.
double reflect(double v) {
  v = std::fmod(std::abs(v), 2.0);
  return v > 1.0 ? 2.0 - v : v;
}

}  // namespace

OptResult minimize_sa(const Objective& f, const BoxDomain& dom, const Budget& budget,
                      std::uint64_t seed, const Options& options) {
  detail::Evaluator ev(f, dom, budget, options);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t n = ev.dim();

  std::vector<double> x(n);
  if (options.start) {
    x = ev.start_unit();
  } else {
    for (double& v : x) v = unif(rng);
  }
  double fx = ev(x);
  while (!std::isfinite(fx) && !ev.done()) {
    for (double& v : x) v = unif(rng);
    fx = ev(x);
  }
  if (ev.done()) return std::move(ev).finish();

  // Objective differences are measured relative to the first finite value.
  const double scale0 = std::abs(fx) > 1e-300 ? std::abs(fx) : 1.0;
  auto scale_of = [&](double cur) { return std::max(std::abs(cur), 1e-3 * scale0); };
  const double steps = static_cast<double>(std::max<std::size_t>(ev.remaining(), 2) - 1);
  const double gamma = std::pow(1e-3, 1.0 / steps);
  double temp = 1.0;

  std::vector<double> y(n);
  while (!ev.done()) {
    const double sigma = 0.1 * std::sqrt(temp);
    for (std::size_t j = 0; j < n; ++j) y[j] = reflect(x[j] + sigma * gauss(rng));
    const double fy = ev(y);
    const double u = unif(rng);
    if (std::isfinite(fy) && (fy <= fx || u < std::exp(-(fy - fx) / (scale_of(fx) * temp)))) {
      x = y;
      fx = fy;
    }
    temp *= gamma;
  }
  return std::move(ev).finish();
}

}  // namespace falsify::hillclimb
