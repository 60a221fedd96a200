#pragma once

#include <array>
#include <chrono>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "falsify/signal.hpp"

namespace falsify::models {

struct InputRange {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;

  double width() const { return hi - lo; }
};

/// Simulation failed (non-finite state, crashed or timed-out subprocess).
class SimulationError : public std::runtime_error {
 public:
  SimulationError(const std::string& what, double time);
  /// Time of failure in seconds, or NaN when unknown.
  double time() const { return time_; }

 private:
  double time_;
};

/// Black-box system: maps an input signal on [0, T] to an output signal on
/// the same grid. Implementations must be deterministic and must not keep
/// state between simulate() calls.
class SystemModel {
 public:
  virtual ~SystemModel() = default;

  virtual std::string id() const = 0;
  virtual const std::vector<InputRange>& inputs() const = 0;
  virtual const std::vector<std::string>& outputs() const = 0;
  virtual double default_horizon() const = 0;

  /// Validates dimension and ranges, clamps samples that are out of range by
  /// at most the relative range tolerance, then runs the model.
  Signal simulate(const Signal& u) const;

 protected:
  virtual Signal run(const Signal& u) const = 0;
};

/// Tolerance for inputs that stray outside their declared range.
inline constexpr double kRangeTolerance = 1e-9;

/// ds = f(state, input), written into ds.
using Derivative =
    std::function<void(std::span<const double>, std::span<const double>, std::span<double>)>;

/// Classical RK4 with the input held constant over each sample interval of u.
/// Each interval is split into `substeps` equal steps. Returns the state at
/// every grid point of u.
Signal rk4_integrate(const Derivative& f, std::vector<double> s0, const Signal& u,
                     std::size_t substeps, std::vector<std::string> state_names);

// Free-floating robot --------------------------------------------------------

struct FfrState {
  double x = 0.0, y = 0.0, phi = 0.0;
  double dx = 0.0, dy = 0.0, dphi = 0.0;

  friend bool operator==(const FfrState&, const FfrState&) = default;
};

/// Time derivative of the robot state under booster inputs u1..u4.
FfrState ffr_derivative(const FfrState& s, std::span<const double, 4> u);

/// Planar robot driven by four boosters, u_i in [-10, 10], starting at rest
/// at the origin. Outputs x, y, phi, dx, dy, dphi.
class FreeFloatingRobot final : public SystemModel {
 public:
  explicit FreeFloatingRobot(std::size_t substeps = 4);

  std::string id() const override { return "ffr"; }
  const std::vector<InputRange>& inputs() const override { return inputs_; }
  const std::vector<std::string>& outputs() const override { return outputs_; }
  double default_horizon() const override { return 5.0; }

 protected:
  Signal run(const Signal& u) const override;

 private:
  std::size_t substeps_;
  std::vector<InputRange> inputs_;
  std::vector<std::string> outputs_;
};

// Surrogate car ---------------------------------------------------------------

/// Longitudinal car with a four-speed hysteretic gearbox. Inputs throttle in
/// [0, 100] and brake in [0, 325]; outputs speed, rpm, gear. Constants live in
/// car_constants.hpp. This is a stand-in benchmark, not a transmission model.
class SurrogateCar final : public SystemModel {
 public:
  explicit SurrogateCar(std::size_t substeps = 4);

  std::string id() const override { return "car"; }
  const std::vector<InputRange>& inputs() const override { return inputs_; }
  const std::vector<std::string>& outputs() const override { return outputs_; }
  double default_horizon() const override { return 30.0; }

 protected:
  Signal run(const Signal& u) const override;

 private:
  std::size_t substeps_;
  std::vector<InputRange> inputs_;
  std::vector<std::string> outputs_;
};

// External process ------------------------------------------------------------

struct ExternalModelSpec {
  std::string command;  // run through /bin/sh -c
  std::vector<InputRange> inputs;
  std::vector<std::string> outputs;
  double horizon = 1.0;
  std::chrono::milliseconds timeout{10000};
};

/// Runs one child process per simulation: the input signal is written as CSV
/// to its stdin and the output signal is read as CSV from its stdout.
class ExternalModel final : public SystemModel {
 public:
  explicit ExternalModel(ExternalModelSpec spec);

  std::string id() const override { return "external"; }
  const std::vector<InputRange>& inputs() const override { return spec_.inputs; }
  const std::vector<std::string>& outputs() const override { return spec_.outputs; }
  double default_horizon() const override { return spec_.horizon; }

 protected:
  Signal run(const Signal& u) const override;

 private:
  ExternalModelSpec spec_;
};

/// Built-in models by id ("ffr", "car"). Throws std::invalid_argument for an
/// unknown id.
std::unique_ptr<SystemModel> make_model(std::string_view id);
std::vector<std::string> builtin_model_ids();

}  // namespace falsify::models
