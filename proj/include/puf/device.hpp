#pragma once

#include "puf/rng.hpp"

#include <cstdint>

namespace puf {

// SI-defined constants.
struct PhysicalConstants {
  double boltzmann_k = 1.380649e-23;        // J/K
  double electron_charge_q = 1.602176634e-19;  // C
};

// Reference temperature for all temperature-coefficient terms (27 C).
inline constexpr double kTref = 300.15;

// kT/q. Throws std::domain_error for non-positive temperature.
double thermal_voltage(const PhysicalConstants& c, double temperature);

struct TransistorParams {
  double mobility_cox = 8e-5;   // mu*Cox product, A/V^2
  double width_w = 1e-6;        // m
  double length_l = 1e-6;       // m
  double slope_m = 1.4;         // subthreshold slope factor, > 1
  double vth_nominal = 0.45;    // V (negative for native devices)
  double body_gamma = 0.2;      // V^0.5
  double fermi_phi = 0.35;      // V
  double vth_temp_coeff = 1.5e-3;  // V/K, Vth decreases with temperature

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct Environment {
  double temperature = kTref;  // K
  double supply_vdd = 1.2;     // V
  double bias_vbias = 0.0;     // V, native transistor gate
  double body_vpw = 0.0;       // V, p-well bias (EVB sweep knob)
};

// Per-transistor sampled deviations.
struct VthDeviation {
  double static_dev = 0.0;  // V
  double tempco_dev = 0.0;  // V/K
  double gamma_dev = 0.0;   // V^0.5
};

struct MismatchModel {
  double pelgrom_avt = 0.0;      // V*m; sigma(Vth) = avt / sqrt(W*L)
  double tempco_sigma = 0.0;     // V/K
  double gamma_sigma_rel = 0.0;  // relative to body_gamma
  // Correlation between a transistor's tempco and body-factor deviations.
  // Both track local doping, so a device that drifts faster with
  // temperature also responds more strongly to body bias; this is what
  // lets a body-bias sweep stand in for a temperature sweep.
  double tempco_gamma_corr = 0.8;
  double sigma_global = 0.020;   // V, die-to-die Vth corner
};

// Threshold voltage at the given operating point. The body term follows
// the standard body-effect law with V_SB = -body_vpw; both device roles
// use the same convention (the n-well is driven complementarily), so a
// positive VPW lowers both threshold magnitudes, like raising temperature.
double effective_vth(const TransistorParams& p, const Environment& env,
                     const VthDeviation& dev, double global_shift = 0.0);

// Subthreshold drain current with the drain term kept exact.
double subthreshold_current(const TransistorParams& p, double v_gs,
                            double v_ds, double vth_eff, double v_t);

// ln of the above, stable for solver use. Returns -inf for v_ds <= 0.
double log_subthreshold_current(const TransistorParams& p, double v_gs,
                                double v_ds, double vth_eff, double v_t);

// Mobility power law mu(T) = mu(Tref) * (T/Tref)^-1.5, as a log addend.
double log_mobility_scale(double temperature);

// Pelgrom-scaled mismatch sample for one transistor, addressed by
// (chip stream, cell, slot). slot encodes stage and device role.
VthDeviation sample_mismatch(const MismatchModel& model,
                             const TransistorParams& p,
                             const KeyedStream& static_stream,
                             const KeyedStream& tempco_stream,
                             const KeyedStream& gamma_stream,
                             uint32_t cell, uint32_t slot);

}  // namespace puf
