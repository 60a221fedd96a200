#include <algorithm>
#include <cmath>

#include "car_constants.hpp"
#include "falsify/models.hpp"

namespace falsify::models {

namespace {

double acceleration(double v, int gear, double throttle, double brake) {
  const double load = v * car::kRpmPerSpeed[gear - 1] / car::kRedline;
  const double torque = std::max(0.0, 1.0 - load * load * load);
  const double drive = car::kGearGain[gear - 1] * car::kEngineGain * throttle * torque;
  return (drive - car::kBrakeGain * brake - car::kDrag * v * v) / car::kMass;
}

int shift(int gear, double v, double throttle) {
  if (gear < 4) {
    const double lo = car::kUpshiftLight[gear - 1], hi = car::kUpshiftFull[gear - 1];
    if (v > lo + (hi - lo) * throttle / 100.0) return gear + 1;
  }
  if (gear > 1 && v < car::kDownshift[gear - 2]) return gear - 1;
  return gear;
}

}  // namespace

SurrogateCar::SurrogateCar(std::size_t substeps)
    : substeps_(substeps),
      inputs_{{"throttle", 0, 100}, {"brake", 0, 325}},
      outputs_{"speed", "rpm", "gear"} {
  if (substeps_ == 0) throw std::invalid_argument("car: substeps must be >= 1");
}

Signal SurrogateCar::run(const Signal& u) const {
  const double h = u.step() / static_cast<double>(substeps_);
  double v = 0.0;
  int gear = 1;
  std::vector<double> out;
  out.reserve(u.size() * 3);
  auto emit = [&] {
    out.push_back(v);
    out.push_back(v * car::kRpmPerSpeed[gear - 1]);
    out.push_back(static_cast<double>(gear));
  };
  emit();
  for (std::size_t j = 0; j + 1 < u.size(); ++j) {
    const double throttle = u.at(j, 0);
    const double brake = u.at(j, 1);
    for (std::size_t s = 0; s < substeps_; ++s) {
      const double k1 = acceleration(v, gear, throttle, brake);
      const double k2 = acceleration(v + 0.5 * h * k1, gear, throttle, brake);
      const double k3 = acceleration(v + 0.5 * h * k2, gear, throttle, brake);
      const double k4 = acceleration(v + h * k3, gear, throttle, brake);
      v = std::max(0.0, v + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4));
      gear = shift(gear, v, throttle);
    }
    if (!std::isfinite(v)) {
      const double t = static_cast<double>(j + 1) * u.step();
      throw SimulationError("car: non-finite speed", t);
    }
    emit();
  }
  return Signal(outputs_, u.step(), std::move(out));
}

}  // namespace falsify::models
