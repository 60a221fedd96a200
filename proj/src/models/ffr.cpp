#include <cmath>

#include "falsify/models.hpp"

namespace falsify::models {

FfrState ffr_derivative(const FfrState& s, std::span<const double, 4> u) {
  const double forward = u[0] + u[2];
  const double lateral = u[1] + u[3];
  const double c = std::cos(s.phi);
  const double sn = std::sin(s.phi);
  FfrState d;
  d.x = s.dx;
  d.y = s.dy;
  d.phi = s.dphi;
  d.dx = 0.1 * forward * c - 0.1 * lateral * sn;
  d.dy = 0.1 * forward * sn + 0.1 * lateral * c;
  d.dphi = 5.0 / 12.0 * forward - 5.0 / 12.0 * lateral;
  return d;
}

FreeFloatingRobot::FreeFloatingRobot(std::size_t substeps)
    : substeps_(substeps),
      inputs_{{"u1", -10, 10}, {"u2", -10, 10}, {"u3", -10, 10}, {"u4", -10, 10}},
      outputs_{"x", "y", "phi", "dx", "dy", "dphi"} {}

Signal FreeFloatingRobot::run(const Signal& u) const {
  auto deriv = [](std::span<const double> s, std::span<const double> in, std::span<double> ds) {
    const FfrState st{s[0], s[1], s[2], s[3], s[4], s[5]};
    const FfrState d = ffr_derivative(st, std::span<const double, 4>(in.data(), 4));
    ds[0] = d.x;
    ds[1] = d.y;
    ds[2] = d.phi;
    ds[3] = d.dx;
    ds[4] = d.dy;
    ds[5] = d.dphi;
  };
  return rk4_integrate(deriv, std::vector<double>(6, 0.0), u, substeps_, outputs_);
}

}  // namespace falsify::models
