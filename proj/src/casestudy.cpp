#include "flexroc/casestudy.hpp"

#include <cmath>
#include <stdexcept>

namespace flexroc {

namespace {

Vec default_solar(const CaseStudyParams& p) {
  // Trapezoid: ramp up 08:00-10:00, full output 10:00-16:00, ramp down
  // 16:00-18:00, dark otherwise.
  Vec profile(static_cast<std::size_t>(p.horizon), 0.0);
  const double dt_hours = p.sampling_minutes / 60.0;
  for (int t = 0; t < p.horizon; ++t) {
    const double hour = std::fmod(p.start_hour + t * dt_hours, 24.0);
    double frac = 0.0;
    if (hour >= 8.0 && hour < 10.0) frac = (hour - 8.0) / 2.0;
    else if (hour >= 10.0 && hour <= 16.0) frac = 1.0;
    else if (hour > 16.0 && hour <= 18.0) frac = (18.0 - hour) / 2.0;
    profile[static_cast<std::size_t>(t)] = p.solar_peak * frac;
  }
  return profile;
}

}  // namespace

CaseStudyParams CaseStudyParams::compact_preset() {
  CaseStudyParams p;
  p.horizon = 12;
  p.start_hour = 11.0;
  p.window_start = 1;
  p.window_size = 8;
  return p;
}

ScenarioConfig generate_building_case(const CaseStudyParams& p) {
  if (!(p.thermal_resistance > 0.0) || !(p.thermal_capacitance > 0.0))
    throw std::invalid_argument("thermal resistance and capacitance must be positive");
  if (p.horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (!(p.sampling_minutes > 0.0)) throw std::invalid_argument("sampling period must be positive");
  if (p.grid_hp_power < 0.0 || p.onoff_hp_power < 0.0 || p.mod_hp_max_power < 0.0)
    throw std::invalid_argument("heat pump ratings must be nonnegative");
  if (!(p.grid_hp_cop > 0.0) || !(p.onoff_hp_cop > 0.0) || !(p.mod_hp_cop > 0.0))
    throw std::invalid_argument("coefficients of performance must be positive");
  if (!(p.temp_lo < p.temp_hi)) throw std::invalid_argument("temperature band is empty");
  if (p.window_start < 0 || p.window_size < 0 ||
      p.window_start + p.window_size > p.horizon)
    throw std::invalid_argument("flexibility window outside the horizon");
  if (!p.solar_profile.empty() &&
      static_cast<int>(p.solar_profile.size()) != p.horizon)
    throw std::invalid_argument("solar profile length must equal the horizon");
  if (!p.nominal_pattern.empty() &&
      static_cast<int>(p.nominal_pattern.size()) != p.horizon)
    throw std::invalid_argument("nominal pattern length must equal the horizon");

  const double dt = p.sampling_minutes * 60.0;
  const double a = std::exp(-dt / (p.thermal_resistance * p.thermal_capacitance));
  // Temperature delta per sustained thermal watt over one step.
  const double watt_gain = (1.0 - a) * p.thermal_resistance;
  const double b_r = watt_gain * p.grid_hp_cop * p.grid_hp_power;
  const double b_u = watt_gain * p.mod_hp_cop;  // per electrical watt
  const double b_v = watt_gain * p.onoff_hp_cop * p.onoff_hp_power;

  ScenarioConfig cfg;
  cfg.sampling_minutes = p.sampling_minutes;
  SystemDynamics& dyn = cfg.dynamics;
  dyn.A = Matrix(1, 1);
  dyn.A(0, 0) = a;
  dyn.B = Matrix(1, 1);
  dyn.B(0, 0) = b_r;
  dyn.D = Matrix(1, 1);
  dyn.D(0, 0) = b_u;
  dyn.E = Matrix(1, 1);
  dyn.E(0, 0) = b_v;
  dyn.x0 = {p.x0_temp - p.ambient_temp};
  dyn.horizon = p.horizon;

  ConstraintSet& cons = cfg.constraints;
  cons.Gx = Matrix(2, 1);
  cons.Gx(0, 0) = 1.0;
  cons.Gx(1, 0) = -1.0;
  cons.gx = {p.temp_hi - p.ambient_temp, -(p.temp_lo - p.ambient_temp)};

  // Input rows: u >= 0 and the solar cap on the total RES draw u + P_v v.
  cons.Gr = Matrix(2, 1);
  cons.Gu = Matrix(2, 1);
  cons.Gu(0, 0) = -1.0;
  cons.Gu(1, 0) = 1.0;
  cons.Gv = Matrix(2, 1);
  cons.Gv(1, 0) = p.onoff_hp_power;
  cons.gr = {0.0, p.solar_peak};

  const Vec solar = p.solar_profile.empty() ? default_solar(p) : p.solar_profile;
  cons.gr_steps = Matrix(static_cast<std::size_t>(p.horizon), 2);
  for (int t = 0; t < p.horizon; ++t) {
    cons.gr_steps(static_cast<std::size_t>(t), 0) = 0.0;
    cons.gr_steps(static_cast<std::size_t>(t), 1) =
        std::min(p.mod_hp_max_power + p.onoff_hp_power, solar[static_cast<std::size_t>(t)]);
  }

  UncertaintyPartition& unc = cfg.uncertainty;
  unc.r_bar.assign(static_cast<std::size_t>(p.horizon), 0);
  if (p.nominal_pattern.empty()) {
    // Grid HP scheduled on whenever solar supply is weak (night tariff
    // pattern); the assessment window itself is nominally off so every
    // flip is an up-ward request.
    for (int t = 0; t < p.horizon; ++t)
      unc.r_bar[static_cast<std::size_t>(t)] =
          solar[static_cast<std::size_t>(t)] < p.grid_hp_power ? 1 : 0;
  } else {
    unc.r_bar = p.nominal_pattern;
  }
  for (int t = p.window_start; t < p.window_start + p.window_size; ++t) {
    unc.flexible.push_back(t);
    unc.r_bar[static_cast<std::size_t>(t)] = 0;
  }

  CostSpec& cost = cfg.cost;
  cost.c_x.assign(static_cast<std::size_t>(p.horizon), 0.0);
  cost.c_u.assign(static_cast<std::size_t>(p.horizon), 0.0);
  cost.c_v.assign(static_cast<std::size_t>(p.horizon), 0.0);
  cost.c_r.assign(static_cast<std::size_t>(p.horizon), 0.0);
  cost.lambda = 1.0;
  cost.mode = CostMode::gamma_only;

  cfg.state_offset = p.ambient_temp;
  cfg.display_bounds = {{p.temp_lo, p.temp_hi}};
  return cfg;
}

}  // namespace flexroc
