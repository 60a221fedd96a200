#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "falsify/hillclimb.hpp"

namespace falsify::hillclimb {

BoxDomain::BoxDomain(std::vector<double> lo, std::vector<double> hi)
    : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() != hi_.size()) throw std::invalid_argument("domain: lo/hi size mismatch");
  for (std::size_t j = 0; j < lo_.size(); ++j) {
    if (!std::isfinite(lo_[j]) || !std::isfinite(hi_[j]) || !(lo_[j] < hi_[j])) {
      throw std::invalid_argument("domain: coordinate " + std::to_string(j) +
                                  " needs finite lo < hi");
    }
  }
}

double BoxDomain::diagonal() const {
  double s = 0.0;
  for (std::size_t j = 0; j < dim(); ++j) s += width(j) * width(j);
  return std::sqrt(s);
}

std::vector<double> BoxDomain::center() const {
  std::vector<double> c(dim());
  for (std::size_t j = 0; j < dim(); ++j) c[j] = 0.5 * (lo_[j] + hi_[j]);
  return c;
}

bool BoxDomain::contains(std::span<const double> x) const {
  if (x.size() != dim()) return false;
  for (std::size_t j = 0; j < dim(); ++j) {
    if (!(x[j] >= lo_[j] && x[j] <= hi_[j])) return false;
  }
  return true;
}

std::vector<double> BoxDomain::clamp(std::span<const double> x) const {
  std::vector<double> r(dim());
  for (std::size_t j = 0; j < dim(); ++j) r[j] = std::clamp(x[j], lo_[j], hi_[j]);
  return r;
}

std::vector<double> BoxDomain::from_unit(std::span<const double> z) const {
  std::vector<double> x(dim());
  for (std::size_t j = 0; j < dim(); ++j) {
    x[j] = std::clamp(lo_[j] + z[j] * width(j), lo_[j], hi_[j]);
  }
  return x;
}

std::vector<double> BoxDomain::to_unit(std::span<const double> x) const {
  std::vector<double> z(dim());
  for (std::size_t j = 0; j < dim(); ++j) z[j] = std::clamp((x[j] - lo_[j]) / width(j), 0.0, 1.0);
  return z;
}

Solver parse_solver(std::string_view name) {
  if (name == "sa") return Solver::SA;
  if (name == "gnm") return Solver::GNM;
  if (name == "cmaes") return Solver::CMAES;
  throw std::invalid_argument("unknown solver '" + std::string(name) + "' (sa, gnm, cmaes)");
}

std::string_view to_string(Solver s) {
  switch (s) {
    case Solver::SA: return "sa";
    case Solver::GNM: return "gnm";
    case Solver::CMAES: return "cmaes";
  }
  return "?";
}

OptResult minimize(Solver solver, const Objective& f, const BoxDomain& dom, const Budget& budget,
                   std::uint64_t seed, const Options& options) {
  switch (solver) {
    case Solver::SA: return minimize_sa(f, dom, budget, seed, options);
    case Solver::GNM: return minimize_nm(f, dom, budget, seed, options);
    case Solver::CMAES: return minimize_cmaes(f, dom, budget, seed, options);
  }
  throw std::logic_error("minimize: bad solver");
}

std::size_t cmaes_population(std::size_t n) {
  return 4 + static_cast<std::size_t>(std::floor(3.0 * std::log(static_cast<double>(n))));
}

void write_history_csv(std::ostream& out, const OptResult& r) {
  const auto prec = out.precision(17);
  out << "eval,value";
  const std::size_t n = r.history.empty() ? 0 : r.history.front().point.size();
  for (std::size_t j = 0; j < n; ++j) out << ",x" << j;
  out << '\n';
  for (std::size_t i = 0; i < r.history.size(); ++i) {
    out << i + 1 << ',' << r.history[i].value;
    for (double v : r.history[i].point) out << ',' << v;
    out << '\n';
  }
  out.precision(prec);
}

}  // namespace falsify::hillclimb
