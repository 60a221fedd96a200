#include <algorithm>
#include <cmath>
#include <numeric>

#include "evaluator.hpp"
#include "falsify/random.hpp"

namespace falsify::hillclimb {

namespace {

std::vector<std::uint64_t> first_primes(std::size_t n) {
  std::vector<std::uint64_t> p;
  for (std::uint64_t c = 2; p.size() < n; ++c) {
    if (std::none_of(p.begin(), p.end(), [c](std::uint64_t q) { return c % q == 0; })) {
      p.push_back(c);
    }
  }
  return p;
}

double radical_inverse(std::uint64_t i, std::uint64_t base) {
  double r = 0.0, f = 1.0 / static_cast<double>(base);
  for (; i > 0; i /= base, f /= static_cast<double>(base)) {
    r += f * static_cast<double>(i % base);
  }
  return r;
}

struct Vertex {
  std::vector<double> z;
  double f;
};

double dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return std::sqrt(s);
}

// One Nelder-Mead descent from x0 using at most `share` evaluations.
void descend(detail::Evaluator& ev, std::vector<double> x0, std::size_t share) {
  const std::size_t n = ev.dim();
  const std::size_t stop_at = ev.evals() + share;
  const double tol = 1e-6 * std::sqrt(static_cast<double>(n));
  auto exhausted = [&] { return ev.done() || ev.evals() >= stop_at; };

  std::vector<Vertex> s;
  s.reserve(n + 1);
  double f0 = ev(x0);
  s.push_back({x0, f0});
  for (std::size_t j = 0; j < n && !exhausted(); ++j) {
    std::vector<double> v = x0;
    v[j] += v[j] + 0.1 <= 1.0 ? 0.1 : -0.1;
    const double fv = ev(v);
    s.push_back({std::move(v), fv});
  }
  if (s.size() < n + 1) return;

  std::vector<double> c(n), xr(n), xe(n), xc(n);
  auto blend = [&](double t, const std::vector<double>& toward, std::vector<double>& out) {
    for (std::size_t j = 0; j < n; ++j) out[j] = c[j] + t * (toward[j] - c[j]);
  };

  while (!exhausted()) {
    std::sort(s.begin(), s.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    double diam = 0.0;
    for (std::size_t i = 1; i <= n; ++i) diam = std::max(diam, dist(s[i].z, s[0].z));
    if (diam < tol) return;

    std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) c[j] += s[i].z[j] / static_cast<double>(n);
    }
    Vertex& worst = s[n];
    blend(-1.0, worst.z, xr);
    const double fr = ev(xr);
    if (fr < s[0].f) {
      if (exhausted()) return;
      blend(-2.0, worst.z, xe);
      const double fe = ev(xe);
      if (fe < fr) worst = {xe, fe};
      else worst = {xr, fr};
      continue;
    }
    if (fr < s[n - 1].f) {
      worst = {xr, fr};
      continue;
    }
    if (exhausted()) return;
    // outside contraction when the reflection beat the worst, inside otherwise
    if (fr < worst.f) blend(-0.5, worst.z, xc);
    else blend(0.5, worst.z, xc);
    const double fc = ev(xc);
    if (fc < std::min(fr, worst.f)) {
      worst = {xc, fc};
      continue;
    }
    for (std::size_t i = 1; i <= n && !exhausted(); ++i) {
      for (std::size_t j = 0; j < n; ++j) s[i].z[j] = s[0].z[j] + 0.5 * (s[i].z[j] - s[0].z[j]);
      s[i].f = ev(s[i].z);
    }
  }
}

}  // namespace

OptResult minimize_nm(const Objective& f, const BoxDomain& dom, const Budget& budget,
                      std::uint64_t seed, const Options& options) {
  detail::Evaluator ev(f, dom, budget, options);
  const std::size_t n = ev.dim();
  const auto primes = first_primes(n);
  const std::uint64_t offset = mix64(seed) % 100000 + 1;
  const std::size_t share =
      options.nm_max_restarts == 1
          ? budget.max_evals
          : std::max<std::size_t>(50 * (n + 1), budget.max_evals / 5);

  for (std::size_t r = 0; !ev.done(); ++r) {
    if (options.nm_max_restarts != 0 && r >= options.nm_max_restarts) break;
    std::vector<double> x0(n);
    if (r == 0 && options.start) {
      x0 = ev.start_unit();
    } else {
      for (std::size_t j = 0; j < n; ++j) x0[j] = radical_inverse(offset + r, primes[j]);
    }
    descend(ev, std::move(x0), share);
  }
  return std::move(ev).finish();
}

}  // namespace falsify::hillclimb
