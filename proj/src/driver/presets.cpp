#include <stdexcept>

#include "falsify/driver.hpp"

namespace falsify::driver {

const std::vector<SpecPreset>& spec_presets() {
  static const std::vector<SpecPreset> presets = {
      {"s1", "car", "[][0,30](speed < 120)"},
      {"s2", "car", "[][0,30]((gear > 2.5 && gear < 3.5) -> speed >= 20)"},
      {"s3", "car", "<>[10,30](speed > 57 || speed < 53)"},
      {"s4", "car", "[][0,29](speed < 100) || [][29,30](speed > 65)"},
      {"s5", "car", "[][0,30](rpm < 4770 || [][0,1](rpm > 600))"},
      {"strap", "ffr",
       "!(<>[0,5](x >= 3.9 && x <= 4.1 && y >= 3.9 && y <= 4.1 && "
       "dx >= -1 && dx <= 1 && dy >= -1 && dy <= 1))"},
  };
  return presets;
}

const SpecPreset* find_spec_preset(std::string_view name) {
  for (const auto& p : spec_presets()) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

ModelDefaults model_defaults(std::string_view model_id) {
  if (model_id == "ffr") return {3, {2, 2, 2, 2}, 20, "strap"};
  if (model_id == "car") return {5, {3, 5}, 12, "s1"};
  if (model_id == "external") return {3, {}, 10, ""};
  throw std::invalid_argument("unknown model '" + std::string(model_id) + "'");
}

}  // namespace falsify::driver
