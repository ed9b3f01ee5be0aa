#include "puf/device.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace puf {

double thermal_voltage(const PhysicalConstants& c, double temperature) {
  if (temperature <= 0.0)
    throw std::domain_error("thermal_voltage: temperature must be > 0 K");
  return c.boltzmann_k * temperature / c.electron_charge_q;
}

void TransistorParams::validate() const {
  if (mobility_cox <= 0.0)
    throw std::invalid_argument("TransistorParams: mobility_cox must be > 0");
  if (width_w <= 0.0)
    throw std::invalid_argument("TransistorParams: width_w must be > 0");
  if (length_l <= 0.0)
    throw std::invalid_argument("TransistorParams: length_l must be > 0");
  if (slope_m <= 1.0)
    throw std::invalid_argument("TransistorParams: slope_m must be > 1");
  if (fermi_phi <= 0.0)
    throw std::invalid_argument("TransistorParams: fermi_phi must be > 0");
  if (vth_temp_coeff < 0.0)
    throw std::invalid_argument(
        "TransistorParams: vth_temp_coeff must be >= 0");
}

double effective_vth(const TransistorParams& p, const Environment& env,
                     const VthDeviation& dev, double global_shift) {
  const double v_sb = -env.body_vpw;
  const double two_phi = 2.0 * p.fermi_phi;
  const double body = (p.body_gamma + dev.gamma_dev) *
                      (std::sqrt(std::fabs(two_phi + v_sb)) -
                       std::sqrt(std::fabs(two_phi)));
  const double temp = -(p.vth_temp_coeff + dev.tempco_dev) *
                      (env.temperature - kTref);
  return p.vth_nominal + dev.static_dev + global_shift + body + temp;
}

double subthreshold_current(const TransistorParams& p, double v_gs,
                            double v_ds, double vth_eff, double v_t) {
  const double lead = p.mobility_cox * (p.width_w / p.length_l) *
                      (p.slope_m - 1.0) * v_t * v_t;
  return lead * std::exp((v_gs - vth_eff) / (p.slope_m * v_t)) *
         (1.0 - std::exp(-v_ds / v_t));
}

double log_subthreshold_current(const TransistorParams& p, double v_gs,
                                double v_ds, double vth_eff, double v_t) {
  if (v_ds <= 0.0) return -std::numeric_limits<double>::infinity();
  const double lead = p.mobility_cox * (p.width_w / p.length_l) *
                      (p.slope_m - 1.0) * v_t * v_t;
  return std::log(lead) + (v_gs - vth_eff) / (p.slope_m * v_t) +
         std::log1p(-std::exp(-v_ds / v_t));
}

double log_mobility_scale(double temperature) {
  return -1.5 * std::log(temperature / kTref);
}

VthDeviation sample_mismatch(const MismatchModel& model,
                             const TransistorParams& p,
                             const KeyedStream& static_stream,
                             const KeyedStream& tempco_stream,
                             const KeyedStream& gamma_stream,
                             uint32_t cell, uint32_t slot) {
  const double z_static = static_stream.normal(cell, slot, 0);
  const double z_tempco = tempco_stream.normal(cell, slot, 0);
  const double z_gamma = gamma_stream.normal(cell, slot, 0);

  const double area = p.width_w * p.length_l;
  const double rho = model.tempco_gamma_corr;

  VthDeviation dev;
  dev.static_dev = model.pelgrom_avt / std::sqrt(area) * z_static;
  dev.tempco_dev = model.tempco_sigma * z_tempco;
  dev.gamma_dev = model.gamma_sigma_rel * p.body_gamma *
                  (rho * z_tempco + std::sqrt(1.0 - rho * rho) * z_gamma);
  return dev;
}

}  // namespace puf
