#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "evaluator.hpp"

namespace falsify::hillclimb {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Params {
  std::size_t lambda, mu;
  VectorXd w;
  double mueff, cc, cs, c1, cmu, damps, chi_n;

  explicit Params(std::size_t n) : lambda(cmaes_population(n)), mu(lambda / 2) {
    const double N = static_cast<double>(n);
    w.resize(static_cast<Eigen::Index>(mu));
    for (std::size_t i = 0; i < mu; ++i) {
      w[static_cast<Eigen::Index>(i)] =
          std::log(static_cast<double>(lambda) / 2.0 + 0.5) - std::log(static_cast<double>(i + 1));
    }
    w /= w.sum();
    mueff = 1.0 / w.squaredNorm();
    cc = (4.0 + mueff / N) / (N + 4.0 + 2.0 * mueff / N);
    cs = (mueff + 2.0) / (N + mueff + 5.0);
    c1 = 2.0 / ((N + 1.3) * (N + 1.3) + mueff);
    cmu = std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((N + 2.0) * (N + 2.0) + mueff));
    damps = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (N + 1.0)) - 1.0) + cs;
    chi_n = std::sqrt(N) * (1.0 - 1.0 / (4.0 * N) + 1.0 / (21.0 * N * N));
  }
};

bool in_unit(const VectorXd& x) { return (x.array() >= 0.0).all() && (x.array() <= 1.0).all(); }

// One CMA-ES run from mean m0 until the budget ends or the run degenerates.
void run(detail::Evaluator& ev, const Params& p, VectorXd m, std::mt19937_64& rng) {
  const auto n = static_cast<Eigen::Index>(ev.dim());
  const double N = static_cast<double>(n);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double sigma = 0.3;
  VectorXd pc = VectorXd::Zero(n), ps = VectorXd::Zero(n);
  MatrixXd C = MatrixXd::Identity(n, n), B = C;
  VectorXd D = VectorXd::Ones(n);
  const std::size_t stall_limit = 10 + static_cast<std::size_t>(std::ceil(30.0 * N / p.lambda));
  std::vector<double> recent_best;
  double run_best = detail::kInf;
  std::size_t since_improved = 0;

  std::vector<VectorXd> xs(p.lambda);
  std::vector<double> fs(p.lambda);
  std::vector<std::size_t> order(p.lambda);
  std::vector<double> z(static_cast<std::size_t>(n));

  for (std::size_t gen = 0; !ev.done(); ++gen) {
    std::size_t evaluated = 0;
    for (std::size_t k = 0; k < p.lambda && !ev.done(); ++k) {
      VectorXd x(n);
      for (int tries = 0; tries < 100; ++tries) {
        VectorXd g(n);
        for (Eigen::Index j = 0; j < n; ++j) g[j] = gauss(rng);
        x = m + sigma * (B * D.asDiagonal() * g);
        if (in_unit(x)) break;
      }
      x = x.cwiseMax(0.0).cwiseMin(1.0);
      for (Eigen::Index j = 0; j < n; ++j) z[static_cast<std::size_t>(j)] = x[j];
      fs[k] = ev(z);
      xs[k] = x;
      ++evaluated;
    }
    if (evaluated < p.lambda) return;

    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
    if (!std::isfinite(fs[order[p.mu - 1]])) {
      // too few valid samples to recombine; widen the search instead
      sigma *= 1.5;
      if (sigma > 1.0) return;
      continue;
    }

    const VectorXd old = m;
    m.setZero();
    for (std::size_t i = 0; i < p.mu; ++i) m += p.w[static_cast<Eigen::Index>(i)] * xs[order[i]];

    const VectorXd step = (m - old) / sigma;
    const MatrixXd inv_sqrt = B * D.cwiseInverse().asDiagonal() * B.transpose();
    ps = (1.0 - p.cs) * ps + std::sqrt(p.cs * (2.0 - p.cs) * p.mueff) * (inv_sqrt * step);
    const double gen1 = static_cast<double>(gen + 1);
    const bool hsig = ps.norm() / std::sqrt(1.0 - std::pow(1.0 - p.cs, 2.0 * gen1)) / p.chi_n <
                      1.4 + 2.0 / (N + 1.0);
    pc = (1.0 - p.cc) * pc + (hsig ? std::sqrt(p.cc * (2.0 - p.cc) * p.mueff) : 0.0) * step;

    MatrixXd rank_mu = MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < p.mu; ++i) {
      const VectorXd y = (xs[order[i]] - old) / sigma;
      rank_mu += p.w[static_cast<Eigen::Index>(i)] * y * y.transpose();
    }
    C = (1.0 - p.c1 - p.cmu) * C +
        p.c1 * (pc * pc.transpose() + (hsig ? 0.0 : p.cc * (2.0 - p.cc)) * C) + p.cmu * rank_mu;
    sigma *= std::exp((p.cs / p.damps) * (ps.norm() / p.chi_n - 1.0));

    C = 0.5 * (C + C.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(C);
    if (eig.info() != Eigen::Success) return;
    const VectorXd ev_vals = eig.eigenvalues();
    if (ev_vals.minCoeff() <= 0.0 || ev_vals.maxCoeff() > 1e14 * ev_vals.minCoeff()) return;
    B = eig.eigenvectors();
    D = ev_vals.cwiseSqrt();

    // degeneracy and stagnation
    if (!std::isfinite(sigma) || sigma * D.maxCoeff() < 1e-12) return;
    if (sigma * D.maxCoeff() > 10.0) return;
    const double gen_best = fs[order[0]];
    recent_best.push_back(gen_best);
    if (!std::isfinite(run_best) || gen_best < run_best - 1e-12 * std::max(1.0, std::abs(run_best))) {
      run_best = gen_best;
      since_improved = 0;
    } else if (++since_improved > stall_limit) {
      return;
    }
    if (recent_best.size() > stall_limit) {
      const auto first = recent_best.end() - static_cast<std::ptrdiff_t>(stall_limit);
      const auto [lo, hi] = std::minmax_element(first, recent_best.end());
      if (std::isfinite(*hi) && *hi - *lo < 1e-12 && sigma * D.maxCoeff() < 1e-3) return;
    }
  }
}

}  // namespace

OptResult minimize_cmaes(const Objective& f, const BoxDomain& dom, const Budget& budget,
                         std::uint64_t seed, const Options& options) {
  detail::Evaluator ev(f, dom, budget, options);
  const Params p(ev.dim());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(ev.dim());

  const std::vector<double> s = ev.start_unit();
  VectorXd m = Eigen::Map<const VectorXd>(s.data(), n);
  while (!ev.done()) {
    run(ev, p, m, rng);
    for (Eigen::Index j = 0; j < n; ++j) m[j] = unif(rng);
  }
  return std::move(ev).finish();
}

}  // namespace falsify::hillclimb
