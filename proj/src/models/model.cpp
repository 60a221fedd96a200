#include <algorithm>
#include <cmath>

#include "falsify/models.hpp"

namespace falsify::models {

SimulationError::SimulationError(const std::string& what, double time)
    : std::runtime_error(what), time_(time) {}

Signal SystemModel::simulate(const Signal& u) const {
  const auto& ranges = inputs();
  if (u.dim() != ranges.size()) {
    throw std::invalid_argument(id() + ": expected " + std::to_string(ranges.size()) +
                                " input dimensions, got " + std::to_string(u.dim()));
  }
  std::vector<double> values(u.values().begin(), u.values().end());
  bool clamped = false;
  for (std::size_t j = 0; j < u.size(); ++j) {
    for (std::size_t k = 0; k < ranges.size(); ++k) {
      const auto& r = ranges[k];
      double& v = values[j * ranges.size() + k];
      const double tol =
          kRangeTolerance * std::max({1.0, std::abs(r.lo), std::abs(r.hi), r.width()});
      if (v < r.lo - tol || v > r.hi + tol) {
        throw std::invalid_argument(id() + ": input '" + r.name + "' = " + std::to_string(v) +
                                    " outside [" + std::to_string(r.lo) + ", " +
                                    std::to_string(r.hi) + "] at t = " +
                                    std::to_string(static_cast<double>(j) * u.step()));
      }
      if (v < r.lo || v > r.hi) {
        v = std::clamp(v, r.lo, r.hi);
        clamped = true;
      }
    }
  }
  if (!clamped) return run(u);
  return run(Signal(u.var_names(), u.step(), std::move(values)));
}

Signal rk4_integrate(const Derivative& f, std::vector<double> s0, const Signal& u,
                     std::size_t substeps, std::vector<std::string> state_names) {
  if (substeps == 0) throw std::invalid_argument("rk4: substeps must be >= 1");
  if (state_names.size() != s0.size()) {
    throw std::invalid_argument("rk4: state names do not match state dimension");
  }
  const std::size_t n = s0.size();
  const double h = u.step() / static_cast<double>(substeps);
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  std::vector<double> s = std::move(s0);
  std::vector<double> out;
  out.reserve(u.size() * n);
  out.insert(out.end(), s.begin(), s.end());

  for (std::size_t j = 0; j + 1 < u.size(); ++j) {
    const auto in = u.sample(j);
    for (std::size_t sub = 0; sub < substeps; ++sub) {
      f(s, in, k1);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = s[i] + 0.5 * h * k1[i];
      f(tmp, in, k2);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = s[i] + 0.5 * h * k2[i];
      f(tmp, in, k3);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = s[i] + h * k3[i];
      f(tmp, in, k4);
      for (std::size_t i = 0; i < n; ++i) {
        s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      }
    }
    for (double v : s) {
      if (!std::isfinite(v)) {
        const double t = static_cast<double>(j + 1) * u.step();
        throw SimulationError("rk4: non-finite state at t = " + std::to_string(t), t);
      }
    }
    out.insert(out.end(), s.begin(), s.end());
  }
  return Signal(std::move(state_names), u.step(), std::move(out));
}

std::unique_ptr<SystemModel> make_model(std::string_view id) {
  if (id == "ffr") return std::make_unique<FreeFloatingRobot>();
  if (id == "car") return std::make_unique<SurrogateCar>();
  throw std::invalid_argument("unknown model '" + std::string(id) + "'");
}

std::vector<std::string> builtin_model_ids() { return {"ffr", "car"}; }

}  // namespace falsify::models
