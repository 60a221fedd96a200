#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "falsify/hillclimb.hpp"

using namespace falsify::hillclimb;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

double sphere(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

double rastrigin(std::span<const double> x) {
  double s = 10.0 * static_cast<double>(x.size());
  for (double v : x) s += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
  return s;
}

BoxDomain cube(std::size_t n, double lo, double hi) {
  return BoxDomain(std::vector<double>(n, lo), std::vector<double>(n, hi));
}

int successes(Solver s, const Objective& f, const BoxDomain& dom, std::size_t evals,
              double target) {
  int ok = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const OptResult r = minimize(s, f, dom, Budget{evals, {}}, seed);
    if (r.best_value <= target) ++ok;
  }
  return ok;
}

}  // namespace

TEST_CASE("box domain") {
  CHECK_THROWS_AS(BoxDomain({0.0}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(BoxDomain({0.0, 1.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(BoxDomain({0.0}, {kInf}), std::invalid_argument);
  const BoxDomain d({0.0, -1.0}, {2.0, 1.0});
  CHECK(d.center() == std::vector<double>{1.0, 0.0});
  CHECK(d.diagonal() == doctest::Approx(std::sqrt(8.0)));
  CHECK(d.from_unit(std::vector<double>{0.5, 1.0}) == std::vector<double>{1.0, 1.0});
  CHECK(d.contains(d.clamp(std::vector<double>{5.0, -7.0})));
}

TEST_CASE("solver names") {
  CHECK(parse_solver("cmaes") == Solver::CMAES);
  CHECK(to_string(parse_solver("gnm")) == "gnm");
  CHECK_THROWS_AS(parse_solver("bfgs"), std::invalid_argument);
}

TEST_CASE("cma-es population for n = 4 is 8") {
  CHECK(cmaes_population(4) == 8);
  CHECK(cmaes_population(1) == 4);
  CHECK(cmaes_population(10) == 10);
}

TEST_CASE("calibration: sphere and rastrigin") {
  const BoxDomain d5 = cube(4, -5, 5);
  CHECK(successes(Solver::CMAES, sphere, d5, 3000, 1e-6) >= 9);
  CHECK(successes(Solver::SA, sphere, d5, 5000, 1e-2) >= 8);
  CHECK(successes(Solver::CMAES, rastrigin, cube(4, -5.12, 5.12), 5000, 4.0) >= 8);
}

TEST_CASE("gnm locates the minimum of (x-2)^2 in 200 evaluations") {
  const BoxDomain d({0.0}, {5.0});
  auto f = [](std::span<const double> x) { return (x[0] - 2.0) * (x[0] - 2.0); };
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const OptResult r = minimize_nm(f, d, Budget{200, {}}, seed);
    CHECK(std::abs(r.best_point[0] - 2.0) <= 1e-4);
    CHECK(r.evals_used <= 200);
  }
}

TEST_CASE("gnm restarts escape a plateau that stalls a single descent") {
  // plateau at 1 with a square pit of half-width 0.12 at a random place
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> where(0.15, 0.85);
  const BoxDomain d = cube(2, 0, 1);
  int wins = 0;
  for (int placement = 0; placement < 10; ++placement) {
    const double cx = where(rng), cy = where(rng);
    auto f = [&](std::span<const double> x) {
      const double dx = x[0] - cx, dy = x[1] - cy;
      if (std::max(std::abs(dx), std::abs(dy)) > 0.12) return 1.0;
      return dx * dx + dy * dy - 0.5;
    };
    Options single;
    single.nm_max_restarts = 1;
    const OptResult one = minimize_nm(f, d, Budget{2000, {}}, 7, single);
    const OptResult many = minimize_nm(f, d, Budget{2000, {}}, 7);
    if (many.best_value < 0.0 && one.best_value >= 0.0) ++wins;
  }
  CHECK(wins >= 7);
}

TEST_CASE("solver contract") {
  const BoxDomain d = cube(3, -2, 3);
  auto f = [](std::span<const double> x) { return sphere(x) + x[0]; };
  for (Solver s : {Solver::SA, Solver::GNM, Solver::CMAES}) {
    CAPTURE(to_string(s));
    const OptResult a = minimize(s, f, d, Budget{500, {}}, 11);
    const OptResult b = minimize(s, f, d, Budget{500, {}}, 11);
    CHECK(a.best_value == b.best_value);
    CHECK(a.best_point == b.best_point);
    CHECK(a.history.size() == b.history.size());
    CHECK(a.evals_used <= 500);
    CHECK(a.evals_used == a.history.size());
    CHECK(d.contains(a.best_point));
    double running = kInf;
    for (const auto& e : a.history) {
      CHECK(d.contains(e.point));
      running = std::min(running, e.value);
    }
    CHECK(running == a.best_value);

    SUBCASE("stop on negative") {
      Options o;
      o.stop_on_negative = true;
      auto g = [](std::span<const double> x) { return sphere(x) - 1.0; };
      const OptResult r = minimize(s, g, d, Budget{500, {}}, 3, o);
      CHECK(r.stopped_on_negative);
      CHECK(r.best_value < 0.0);
      CHECK(r.history.back().value < 0.0);
      for (std::size_t i = 0; i + 1 < r.history.size(); ++i) CHECK(r.history[i].value >= 0.0);
    }
    SUBCASE("constant objective") {
      auto g = [](std::span<const double>) { return 4.25; };
      const OptResult r = minimize(s, g, d, Budget{100, {}}, 3);
      CHECK(r.best_value == 4.25);
      CHECK(r.evals_used == 100);
    }
    SUBCASE("rejected evaluations are never best") {
      auto g = [](std::span<const double> x) { return x[1] > 0.0 ? kInf : sphere(x); };
      const OptResult r = minimize(s, g, d, Budget{300, {}}, 5);
      CHECK(std::isfinite(r.best_value));
      CHECK(r.best_point[1] <= 0.0);
    }
    SUBCASE("all rejected") {
      auto g = [](std::span<const double>) { return kInf; };
      const OptResult r = minimize(s, g, d, Budget{50, {}}, 5);
      CHECK(r.best_value == kInf);
      CHECK(r.evals_used == 50);
    }
    SUBCASE("wall clock stops the run") {
      auto slow = [](std::span<const double> x) {
        volatile double s = 0;
        for (int i = 0; i < 200000; ++i) s = s + x[0] * 1e-9;
        return sphere(x);
      };
      const OptResult r = minimize(s, slow, d, Budget{1000000, 0.05}, 5);
      CHECK(r.evals_used < 1000000);
    }
    SUBCASE("warm start is used") {
      Options o;
      o.start = std::vector<double>{0.0, 0.0, 0.0};
      auto g = [](std::span<const double> x) { return sphere(x); };
      const OptResult r = minimize(s, g, d, Budget{1, {}}, 5, o);
      if (s != Solver::CMAES) CHECK(r.best_value == 0.0);
      else CHECK(r.evals_used == 1);
    }
  }
  CHECK_THROWS_AS(minimize_sa(f, d, Budget{0, {}}, 1), std::invalid_argument);
}

TEST_CASE("history csv") {
  const BoxDomain d = cube(2, 0, 1);
  const OptResult r = minimize_sa(sphere, d, Budget{3, {}}, 1);
  std::ostringstream out;
  write_history_csv(out, r);
  const std::string s = out.str();
  CHECK(s.rfind("eval,value,x0,x1\n1,", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 4);
}
