#pragma once

#include "puf/device.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace puf {

struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Native-transistor source-follower feeding N first-stage pull-downs.
struct RegulatorConfig {
  TransistorParams native;     // M0, gate at V_BIAS, source at V_VDD
  TransistorParams pull_down;  // M2, the first-stage NMOS
  int cells_per_regulator = 1;
  double vm_fraction = 0.5;    // stage-1 switching point as fraction of V_VDD

  void validate() const;
};

// Closed-form virtual supply from the current balance with drain terms
// dropped and V_M = vm_fraction * V_VDD. Independent of supply_vdd by
// construction. Throws std::invalid_argument if the log argument is not
// positive.
double virtual_vdd_closed_form(const RegulatorConfig& cfg,
                               const Environment& env);

// Numeric fixed point of the full current balance (drain terms kept),
// bisected to |dV| < 1 uV. Throws ConvergenceError if no sign change
// brackets a root in (0, supply_vdd).
double virtual_vdd_fixed_point(const RegulatorConfig& cfg,
                               const Environment& env);

struct SweepRow {
  Environment env;
  double vvdd = 0.0;
  bool converged = false;
};

struct SweepSummary {
  std::vector<SweepRow> rows;
  // Max |dV_VDD/dVsupply| over adjacent points that differ only in supply.
  std::optional<double> line_sensitivity_mv_per_v;
  // V_VDD span over points that differ only in temperature.
  std::optional<double> temperature_span_mv;
};

SweepSummary sensitivity_sweep(const RegulatorConfig& cfg,
                               const std::vector<Environment>& grid);

// Native width that cancels the first-order temperature dependence of the
// closed-form V_VDD (the log term's +kT/q slope against the Vth tempcos).
double calibrate_native_width(const RegulatorConfig& cfg);

// V_BIAS giving the requested closed-form V_VDD at env; 1-D root-finding.
double solve_vbias_for_target(const RegulatorConfig& cfg,
                              const Environment& env, double target_vvdd);

}  // namespace puf
