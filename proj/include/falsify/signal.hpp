#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace falsify {

/// Relative tolerance used when snapping a time instant onto a sample grid.
inline constexpr double kGridTolerance = 1e-9;

/// Uniformly sampled, time-bounded multi-dimensional signal.
///
/// Sample j sits at t_j = j * step, j = 0..size()-1, so the horizon is
/// (size() - 1) * step. Values are stored row-major (one row per instant).
/// Immutable after construction.
class Signal {
 public:
  Signal(std::vector<std::string> var_names, double step, std::vector<double> values);

  /// Builds a signal from one vector per sample instant.
  static Signal from_rows(std::vector<std::string> var_names, double step,
                          const std::vector<std::vector<double>>& rows);

  std::size_t dim() const { return names_.size(); }
  std::size_t size() const { return values_.size() / names_.size(); }
  double step() const { return step_; }
  double horizon() const { return static_cast<double>(size() - 1) * step_; }

  const std::vector<std::string>& var_names() const { return names_; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  double at(std::size_t sample, std::size_t var) const { return values_[sample * dim() + var]; }
  std::span<const double> sample(std::size_t j) const {
    return {values_.data() + j * dim(), dim()};
  }
  std::vector<double> column(std::size_t var) const;
  std::span<const double> values() const { return values_; }

  /// Index of the grid point at time t. Throws std::invalid_argument when t
  /// is off-grid (beyond kGridTolerance) or outside [0, horizon].
  std::size_t grid_index(double t) const;

  friend bool operator==(const Signal&, const Signal&) = default;

 private:
  std::vector<std::string> names_;
  double step_;
  std::vector<double> values_;
};

/// w followed by w2; the junction instant keeps w's final sample and drops
/// w2's sample at its own time 0.
Signal concat(const Signal& w, const Signal& w2);

/// w restricted to [t1, t2], re-based so that the result starts at time 0.
Signal restrict(const Signal& w, double t1, double t2);

/// t-shift: result(t') = w(t + t').
Signal shift(const Signal& w, double t);

/// Piecewise-constant input made of K control points of M levels each.
struct PiecewiseConstantInput {
  std::size_t control_points = 0;
  std::size_t dims = 0;
  double horizon = 0.0;
  std::vector<double> levels;  // row-major K x M, row i = u_{i+1}

  PiecewiseConstantInput() = default;
  PiecewiseConstantInput(std::size_t k, std::size_t m, double t, std::vector<double> lv);

  double level(std::size_t i, std::size_t j) const { return levels[i * dims + j]; }
  std::span<const double> row(std::size_t i) const { return {levels.data() + i * dims, dims}; }

  friend bool operator==(const PiecewiseConstantInput&, const PiecewiseConstantInput&) = default;
};

/// Samples u on the grid j * step. Segment i covers [iT/K, (i+1)T/K); the
/// final instant T carries the last level. T/K must be a multiple of step.
Signal realize(const PiecewiseConstantInput& u, double step,
               std::vector<std::string> var_names = {});

/// CSV with header `t,<var1>,...` and one row per sample.
void write_csv(std::ostream& out, const Signal& w);
Signal read_csv(std::istream& in);

}  // namespace falsify
