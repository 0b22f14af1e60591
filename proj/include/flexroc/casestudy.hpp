#pragma once

#include <vector>

#include "flexroc/config.hpp"

namespace flexroc {

/// Parameters of the single-zone building with three heat pumps: one grid
/// HP whose on/off schedule is the flexible reference, one on/off RES HP
/// (binary recourse) and one modulating RES HP (continuous recourse), both
/// fed from a capped solar supply. The zone is a first-order RC model; the
/// state is the indoor temperature expressed relative to ambient, so the
/// dynamics stay purely linear.
struct CaseStudyParams {
  double thermal_resistance = 5.0e-3;   // K/W
  double thermal_capacitance = 9.0e6;   // J/K
  double ambient_temp = 5.0;            // deg C

  double grid_hp_power = 1500.0;  // W electrical, on/off (reference r)
  double grid_hp_cop = 3.0;
  double onoff_hp_power = 800.0;  // W electrical, on/off (recourse v)
  double onoff_hp_cop = 3.0;
  double mod_hp_max_power = 2000.0;  // W electrical ceiling (recourse u)
  double mod_hp_cop = 3.0;

  double solar_peak = 2000.0;  // W cap on total RES draw
  Vec solar_profile;           // optional, length horizon; derived if empty

  double temp_lo = 20.0;  // deg C comfort band
  double temp_hi = 24.0;
  double x0_temp = 21.0;

  int horizon = 48;
  double sampling_minutes = 30.0;
  double start_hour = 0.0;  // wall-clock hour of step 0

  int window_start = 22;  // first flexible index (11:00 at defaults)
  int window_size = 8;

  std::vector<std::uint8_t> nominal_pattern;  // optional, length horizon

  /// Reduced-size variant for quick end-to-end runs: a 5-hour midday slice
  /// at the same physics, so every scheme (including exhaustive search)
  /// finishes in seconds with the embedded solver.
  static CaseStudyParams compact_preset();
};

/// Emits the scalar RC model as a scenario config: a = exp(-dt/RC), input
/// gains from the HP ratings and coefficients of performance, comfort-band
/// state rows, and per-step solar caps bounding the total RES draw.
/// Nonphysical parameters throw std::invalid_argument.
ScenarioConfig generate_building_case(const CaseStudyParams& params = {});

}  // namespace flexroc
