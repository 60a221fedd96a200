#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "falsify/hillclimb.hpp"

namespace falsify::hillclimb::detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Wraps the objective in unit-cube coordinates. Tracks the budget, the best
// point and the history; solvers loop until done().
class Evaluator {
 public:
  Evaluator(const Objective& f, const BoxDomain& dom, const Budget& budget, const Options& opt)
      : f_(f), dom_(dom), budget_(budget), opt_(opt), start_(std::chrono::steady_clock::now()) {
    if (budget.max_evals == 0) throw std::invalid_argument("budget: max_evals must be >= 1");
    if (budget.wall_clock_s && !(*budget.wall_clock_s > 0.0)) {
      throw std::invalid_argument("budget: wall clock must be > 0");
    }
    if (dom.dim() == 0) throw std::invalid_argument("domain: empty");
    result_.best_value = kInf;
    result_.best_point = dom.center();
  }

  bool done() const { return done_; }
  std::size_t dim() const { return dom_.dim(); }
  std::size_t evals() const { return result_.evals_used; }
  std::size_t remaining() const { return budget_.max_evals - result_.evals_used; }
  double best() const { return result_.best_value; }

  // z is clamped into the unit cube in place. Returns +inf once done.
  double operator()(std::vector<double>& z) {
    if (done_) return kInf;
    for (double& v : z) v = std::clamp(v, 0.0, 1.0);
    std::vector<double> x = dom_.from_unit(z);
    double y = f_(x);
    if (std::isnan(y)) y = kInf;
    ++result_.evals_used;
    if (y < result_.best_value) {
      result_.best_value = y;
      result_.best_point = x;
    }
    if (opt_.record_history) result_.history.push_back({std::move(x), y});
    if (opt_.stop_on_negative && y < 0.0) {
      result_.stopped_on_negative = true;
      done_ = true;
    }
    if (result_.evals_used >= budget_.max_evals) done_ = true;
    if (budget_.wall_clock_s) {
      const std::chrono::duration<double> el = std::chrono::steady_clock::now() - start_;
      if (el.count() >= *budget_.wall_clock_s) done_ = true;
    }
    return y;
  }

  std::vector<double> start_unit() const {
    if (!opt_.start) return std::vector<double>(dom_.dim(), 0.5);
    if (opt_.start->size() != dom_.dim()) throw std::invalid_argument("start point: wrong dimension");
    return dom_.to_unit(*opt_.start);
  }

  OptResult finish() && { return std::move(result_); }

 private:
  const Objective& f_;
  const BoxDomain& dom_;
  Budget budget_;
  const Options& opt_;
  std::chrono::steady_clock::time_point start_;
  OptResult result_;
  bool done_ = false;
};

}  // namespace falsify::hillclimb::detail
