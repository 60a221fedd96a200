#pragma once

// Surrogate car parameters. Changing any value changes every benchmark
// outcome on the "car" model: bump kVersion when editing.

#include <array>

namespace falsify::models::car {

inline constexpr const char* kVersion = "car-3";

inline constexpr double kMass = 1.0;
inline constexpr double kEngineGain = 0.2;   // per throttle unit
inline constexpr double kBrakeGain = 0.04;   // per brake unit
inline constexpr double kDrag = 2.0e-4;      // quadratic in speed
// Torque falls off as 1 - (rpm / kRedline)^3.
inline constexpr double kRedline = 5000.0;

// Indexed by gear - 1.
inline constexpr std::array<double, 4> kGearGain{1.0, 0.75, 0.55, 0.45};
inline constexpr std::array<double, 4> kRpmPerSpeed{120.0, 75.0, 52.0, 40.0};
// Upshift from gear g to g+1 above a speed interpolated between
// kUpshiftLight[g-1] (throttle 0) and kUpshiftFull[g-1] (throttle 100).
// At full throttle 3->4 never happens: gear 3 tops out near 91.
inline constexpr std::array<double, 3> kUpshiftLight{15.0, 35.0, 60.0};
inline constexpr std::array<double, 3> kUpshiftFull{25.0, 50.0, 100.0};
// Downshift from g+1 to g below kDownshift[g-1].
inline constexpr std::array<double, 3> kDownshift{10.0, 30.0, 55.0};

}  // namespace falsify::models::car
