#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace falsify::hillclimb {

/// Closed box prod [lo_j, hi_j] with lo_j < hi_j, all finite.
class BoxDomain {
 public:
  BoxDomain() = default;
  BoxDomain(std::vector<double> lo, std::vector<double> hi);

  std::size_t dim() const { return lo_.size(); }
  const std::vector<double>& lo() const { return lo_; }
  const std::vector<double>& hi() const { return hi_; }
  double width(std::size_t j) const { return hi_[j] - lo_[j]; }
  double diagonal() const;
  std::vector<double> center() const;

  bool contains(std::span<const double> x) const;
  std::vector<double> clamp(std::span<const double> x) const;

  /// Maps z in the unit cube to the box. The result is clamped, so it is
  /// always inside even after rounding.
  std::vector<double> from_unit(std::span<const double> z) const;
  std::vector<double> to_unit(std::span<const double> x) const;

  friend bool operator==(const BoxDomain&, const BoxDomain&) = default;

 private:
  std::vector<double> lo_, hi_;
};

struct Budget {
  std::size_t max_evals = 0;
  /// Secondary cap, checked between evaluations.
  std::optional<double> wall_clock_s;
};

/// Returns +inf for a rejected or failed evaluation. NaN is treated as +inf.
using Objective = std::function<double(std::span<const double>)>;

struct Evaluation {
  std::vector<double> point;
  double value;
};

struct OptResult {
  std::vector<double> best_point;
  double best_value = 0.0;
  std::size_t evals_used = 0;
  std::vector<Evaluation> history;
  bool stopped_on_negative = false;
};

struct Options {
  /// Stop as soon as an evaluation returns a negative value.
  bool stop_on_negative = false;
  /// Initial point (SA and the first NM restart start here, CMA-ES uses it as
  /// the initial mean). Clamped into the domain.
  std::optional<std::vector<double>> start;
  bool record_history = true;
  /// Nelder-Mead only: number of restarts, 0 for unlimited.
  std::size_t nm_max_restarts = 0;
};

enum class Solver { SA, GNM, CMAES };

Solver parse_solver(std::string_view name);
std::string_view to_string(Solver s);

OptResult minimize_sa(const Objective& f, const BoxDomain& dom, const Budget& budget,
                      std::uint64_t seed, const Options& options = {});
OptResult minimize_nm(const Objective& f, const BoxDomain& dom, const Budget& budget,
                      std::uint64_t seed, const Options& options = {});
OptResult minimize_cmaes(const Objective& f, const BoxDomain& dom, const Budget& budget,
                         std::uint64_t seed, const Options& options = {});

OptResult minimize(Solver solver, const Objective& f, const BoxDomain& dom,
                   const Budget& budget, std::uint64_t seed, const Options& options = {});

/// CMA-ES population size 4 + floor(3 ln n).
std::size_t cmaes_population(std::size_t n);

/// `eval,value,x0,...` one row per history entry.
void write_history_csv(std::ostream& out, const OptResult& r);

}  // namespace falsify::hillclimb
