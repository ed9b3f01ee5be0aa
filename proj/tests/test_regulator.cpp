#include "puf/regulator.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace puf;
using doctest::Approx;

namespace {

// Reference devices used throughout.
TransistorParams native_params() {
  TransistorParams p;
  p.slope_m = 1.3;
  p.vth_nominal = -0.05;
  p.width_w = 1.639541e-5;
  return p;
}

TransistorParams pull_down_params() {
  TransistorParams p;
  p.slope_m = 1.4;
  p.vth_nominal = 0.45;
  return p;
}

RegulatorConfig reference_config() {
  return {native_params(), pull_down_params(), 32, 0.5};
}

Environment reference_env() {
  Environment env;
  env.bias_vbias = 0.398945;
  return env;
}

}  // namespace

TEST_CASE("closed form: symmetric devices collapse to 2/3 of the bias span") {
  TransistorParams same;  // identical native and pull-down, log argument 1
  RegulatorConfig cfg{same, same, 1, 0.5};
  Environment env;
  env.bias_vbias = 1.0;
  // (2/3) * (Vth2 + V_BIAS - Vth0) with Vth0 = Vth2
  CHECK(virtual_vdd_closed_form(cfg, env) == Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("closed form: N = 32 sits exactly one ln 32 log-step below N = 1") {
  RegulatorConfig cfg = reference_config();
  const Environment env = reference_env();
  cfg.cells_per_regulator = 1;
  const double v1 = virtual_vdd_closed_form(cfg, env);
  cfg.cells_per_regulator = 32;
  const double v32 = virtual_vdd_closed_form(cfg, env);
  const double m0 = cfg.native.slope_m, m2 = cfg.pull_down.slope_m;
  const double v_t = thermal_voltage({}, env.temperature);
  const double drop = 2.0 * m0 * m2 / (m0 + 2.0 * m2) * v_t * std::log(32.0);
  CHECK(v1 - v32 == Approx(drop).epsilon(1e-9));
}

TEST_CASE("closed form is bit-identical across supply voltages") {
  const RegulatorConfig cfg = reference_config();
  Environment lo = reference_env();
  lo.supply_vdd = 0.7;
  Environment hi = reference_env();
  hi.supply_vdd = 1.4;
  CHECK(virtual_vdd_closed_form(cfg, lo) == virtual_vdd_closed_form(cfg, hi));
}

TEST_CASE("fixed point agrees with closed form when drain terms are deep") {
  const RegulatorConfig cfg = reference_config();
  const Environment env = reference_env();
  const double fp = virtual_vdd_fixed_point(cfg, env);
  const double cf = virtual_vdd_closed_form(cfg, env);
  CHECK(std::abs(fp - cf) < 1e-3);
  CHECK(fp == Approx(0.57).epsilon(2e-3));
}

TEST_CASE("fixed point decreases when the load count doubles") {
  RegulatorConfig cfg = reference_config();
  const Environment env = reference_env();
  cfg.cells_per_regulator = 16;
  const double v16 = virtual_vdd_fixed_point(cfg, env);
  cfg.cells_per_regulator = 32;
  const double v32 = virtual_vdd_fixed_point(cfg, env);
  CHECK(v32 < v16);
}

TEST_CASE("virtual supply increases with V_BIAS") {
  const RegulatorConfig cfg = reference_config();
  Environment env = reference_env();
  const double v0 = virtual_vdd_fixed_point(cfg, env);
  env.bias_vbias += 0.05;
  CHECK(virtual_vdd_fixed_point(cfg, env) > v0);
}

TEST_CASE("no bracketing root raises a convergence error with diagnostics") {
  RegulatorConfig cfg = reference_config();
  Environment env = reference_env();
  env.bias_vbias = -2.0;  // native cut off: balance negative everywhere
  CHECK_THROWS_AS(virtual_vdd_fixed_point(cfg, env), ConvergenceError);
}

TEST_CASE("sensitivity sweep reports shapes and bounds") {
  const RegulatorConfig cfg = reference_config();

  SUBCASE("single point: one row, no sensitivities") {
    const SweepSummary s = sensitivity_sweep(cfg, {reference_env()});
    CHECK(s.rows.size() == 1);
    CHECK(s.rows[0].converged);
    CHECK(!s.line_sensitivity_mv_per_v.has_value());
    CHECK(!s.temperature_span_mv.has_value());
  }

  SUBCASE("supply sweep stays under 6 mV/V") {
    std::vector<Environment> grid;
    for (double v = 0.7; v <= 1.401; v += 0.1) {
      Environment e = reference_env();
      e.supply_vdd = v;
      grid.push_back(e);
    }
    const SweepSummary s = sensitivity_sweep(cfg, grid);
    REQUIRE(s.line_sensitivity_mv_per_v.has_value());
    CHECK(*s.line_sensitivity_mv_per_v < 6.0);
  }

  SUBCASE("calibrated native width holds 10 mV over -55..125 C") {
    std::vector<Environment> grid;
    for (double t = 218.15; t <= 398.16; t += 20.0) {
      Environment e = reference_env();
      e.temperature = t;
      grid.push_back(e);
    }
    const SweepSummary s = sensitivity_sweep(cfg, grid);
    REQUIRE(s.temperature_span_mv.has_value());
    CHECK(*s.temperature_span_mv < 10.0);
  }

  SUBCASE("supply sweep at two temperatures reports both slopes") {
    std::vector<Environment> grid;
    for (double t : {258.15, 358.15})
      for (double v : {0.8, 1.2}) {
        Environment e = reference_env();
        e.temperature = t;
        e.supply_vdd = v;
        grid.push_back(e);
      }
    const SweepSummary s = sensitivity_sweep(cfg, grid);
    CHECK(s.rows.size() == 4);
    CHECK(s.line_sensitivity_mv_per_v.has_value());
  }
}

TEST_CASE("width calibration cancels the first-order temperature slope") {
  RegulatorConfig cfg = reference_config();
  cfg.native.width_w = 1e-6;  // start uncalibrated
  cfg.native.width_w = calibrate_native_width(cfg);
  CHECK(cfg.native.width_w == Approx(1.639541e-5).epsilon(1e-4));

  Environment env = reference_env();
  const double v27 = virtual_vdd_closed_form(cfg, env);
  env.temperature = 398.15;
  const double v125 = virtual_vdd_closed_form(cfg, env);
  env.temperature = 218.15;
  const double vm55 = virtual_vdd_closed_form(cfg, env);
  CHECK(std::abs(v125 - v27) < 1e-3);
  CHECK(std::abs(vm55 - v27) < 1e-3);
}

TEST_CASE("bias solver hits the requested target") {
  const RegulatorConfig cfg = reference_config();
  Environment env;
  env.bias_vbias = solve_vbias_for_target(cfg, env, 0.57);
  CHECK(env.bias_vbias == Approx(0.398945).epsilon(1e-4));
  CHECK(virtual_vdd_closed_form(cfg, env) == Approx(0.57).epsilon(1e-6));
}

TEST_CASE("config validation rejects bad shapes") {
  RegulatorConfig cfg = reference_config();
  cfg.cells_per_regulator = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = reference_config();
  cfg.vm_fraction = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = reference_config();
  cfg.native.slope_m = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
