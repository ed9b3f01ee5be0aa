#include "puf/regulator.hpp"

#include <cmath>
#include <sstream>

namespace puf {
namespace {

constexpr PhysicalConstants kConst;

// Mobility temperature scaling is common to both sides and cancels.
double log_balance(const RegulatorConfig& cfg, const Environment& env,
                   double v, double v_t, double vth0, double vth2) {
  const double lhs = log_subthreshold_current(
      cfg.native, env.bias_vbias - v, env.supply_vdd - v, vth0, v_t);
  const double vm = cfg.vm_fraction * v;
  const double rhs = std::log(static_cast<double>(cfg.cells_per_regulator)) +
                     log_subthreshold_current(cfg.pull_down, vm, vm, vth2, v_t);
  return lhs - rhs;
}

}  // namespace

void RegulatorConfig::validate() const {
  native.validate();
  pull_down.validate();
  if (cells_per_regulator < 1)
    throw std::invalid_argument(
        "RegulatorConfig: cells_per_regulator must be >= 1");
  if (vm_fraction <= 0.0 || vm_fraction >= 1.0)
    throw std::invalid_argument(
        "RegulatorConfig: vm_fraction must be in (0, 1)");
}

double virtual_vdd_closed_form(const RegulatorConfig& cfg,
                               const Environment& env) {
  const double v_t = thermal_voltage(kConst, env.temperature);
  const double m0 = cfg.native.slope_m;
  const double m2 = cfg.pull_down.slope_m;
  const double vth0 = effective_vth(cfg.native, env, {});
  const double vth2 = effective_vth(cfg.pull_down, env, {});

  const double ratio =
      (cfg.native.mobility_cox * cfg.native.width_w * cfg.pull_down.length_l *
       (m0 - 1.0)) /
      (cfg.cells_per_regulator * cfg.pull_down.mobility_cox *
       cfg.pull_down.width_w * cfg.native.length_l * (m2 - 1.0));
  if (!(ratio > 0.0))
    throw std::invalid_argument(
        "virtual_vdd_closed_form: log argument must be > 0");

  return (m0 * m2 * v_t * std::log(ratio) + m2 * (env.bias_vbias - vth0) +
          m0 * vth2) /
         (cfg.vm_fraction * m0 + m2);
}

double virtual_vdd_fixed_point(const RegulatorConfig& cfg,
                               const Environment& env) {
  const double v_t = thermal_voltage(kConst, env.temperature);
  const double vth0 = effective_vth(cfg.native, env, {});
  const double vth2 = effective_vth(cfg.pull_down, env, {});

  double lo = 1e-9;
  double hi = env.supply_vdd - 1e-9;
  double f_lo = log_balance(cfg, env, lo, v_t, vth0, vth2);
  double f_hi = log_balance(cfg, env, hi, v_t, vth0, vth2);
  if (!(f_lo > 0.0 && f_hi < 0.0)) {
    std::ostringstream msg;
    msg << "virtual_vdd_fixed_point: no bracketing sign change in (0, "
        << env.supply_vdd << ") V; balance(" << lo << ")=" << f_lo
        << ", balance(" << hi << ")=" << f_hi
        << " at T=" << env.temperature << " K, V_BIAS=" << env.bias_vbias;
    throw ConvergenceError(msg.str());
  }

  for (int iter = 0; iter < 200 && hi - lo > 1e-6; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = log_balance(cfg, env, mid, v_t, vth0, vth2);
    if (f_mid == 0.0) return mid;
    if (f_mid > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

SweepSummary sensitivity_sweep(const RegulatorConfig& cfg,
                               const std::vector<Environment>& grid) {
  if (grid.empty())
    throw std::invalid_argument("sensitivity_sweep: empty grid");

  SweepSummary out;
  out.rows.reserve(grid.size());
  for (const Environment& env : grid) {
    SweepRow row{env, 0.0, false};
    try {
      row.vvdd = virtual_vdd_fixed_point(cfg, env);
      row.converged = true;
    } catch (const ConvergenceError&) {
      row.converged = false;
    }
    out.rows.push_back(row);
  }

  double max_slope = 0.0;
  bool have_slope = false;
  double t_min = 0.0, t_max = 0.0;
  bool have_temp = false;
  for (size_t i = 1; i < out.rows.size(); ++i) {
    const SweepRow& a = out.rows[i - 1];
    const SweepRow& b = out.rows[i];
    if (!a.converged || !b.converged) continue;
    const bool same_t = a.env.temperature == b.env.temperature;
    const bool same_v = a.env.supply_vdd == b.env.supply_vdd;
    const bool same_bias = a.env.bias_vbias == b.env.bias_vbias &&
                           a.env.body_vpw == b.env.body_vpw;
    if (same_t && same_bias && !same_v) {
      const double slope =
          std::fabs((b.vvdd - a.vvdd) / (b.env.supply_vdd - a.env.supply_vdd));
      max_slope = std::max(max_slope, slope);
      have_slope = true;
    }
    if (same_v && same_bias && !same_t) {
      if (!have_temp) {
        t_min = std::min(a.vvdd, b.vvdd);
        t_max = std::max(a.vvdd, b.vvdd);
        have_temp = true;
      } else {
        t_min = std::min({t_min, a.vvdd, b.vvdd});
        t_max = std::max({t_max, a.vvdd, b.vvdd});
      }
    }
  }
  if (have_slope) out.line_sensitivity_mv_per_v = max_slope * 1e3;
  if (have_temp) out.temperature_span_mv = (t_max - t_min) * 1e3;
  return out;
}

double calibrate_native_width(const RegulatorConfig& cfg) {
  const double m0 = cfg.native.slope_m;
  const double m2 = cfg.pull_down.slope_m;
  const double k_over_q = kConst.boltzmann_k / kConst.electron_charge_q;
  const double ln_ratio =
      (m0 * cfg.pull_down.vth_temp_coeff - m2 * cfg.native.vth_temp_coeff) /
      (m0 * m2 * k_over_q);
  return std::exp(ln_ratio) * cfg.cells_per_regulator *
         cfg.pull_down.mobility_cox * cfg.pull_down.width_w *
         cfg.native.length_l * (m2 - 1.0) /
         (cfg.native.mobility_cox * cfg.pull_down.length_l * (m0 - 1.0));
}

double solve_vbias_for_target(const RegulatorConfig& cfg,
                              const Environment& env, double target_vvdd) {
  double lo = -2.0, hi = 2.0;
  Environment e = env;
  for (int iter = 0; iter < 100 && hi - lo > 1e-9; ++iter) {
    const double mid = 0.5 * (lo + hi);
    e.bias_vbias = mid;
    // Closed form is strictly increasing in V_BIAS.
    if (virtual_vdd_closed_form(cfg, e) < target_vvdd)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace puf
