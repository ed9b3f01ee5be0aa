#include "puf/cell.hpp"

#include "puf/regulator.hpp"
#include "puf/special_functions.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace puf {
namespace {

constexpr PhysicalConstants kConst;

// ln I_N(V) - ln I_P(V) at input = output = V. Strictly increasing in V.
double stage_balance(const InverterPair& inv, const StageDeviation& dev,
                     const Environment& env, double v_vdd, double v,
                     double v_t, double global_shift, double width_mult) {
  const double vth_n = effective_vth(inv.nmos, env, dev.nmos, global_shift);
  const double vth_p = effective_vth(inv.pmos, env, dev.pmos, global_shift);
  TransistorParams nmos = inv.nmos;
  TransistorParams pmos = inv.pmos;
  nmos.width_w *= width_mult;
  pmos.width_w *= width_mult;
  const double log_n = log_subthreshold_current(nmos, v, v, vth_n, v_t);
  const double log_p =
      log_subthreshold_current(pmos, v_vdd - v, v_vdd - v, vth_p, v_t);
  return log_n - log_p;
}

}  // namespace

void NoiseModel::validate() const {
  if (sigma_n < 0.0)
    throw std::invalid_argument("NoiseModel: sigma_n must be >= 0");
  if (gain_original <= 1.0 || gain_reconfigured <= 1.0)
    throw std::invalid_argument("NoiseModel: gains must be > 1");
}

double NoiseModel::effective_sigma(CellMode mode) const {
  const double gain =
      mode == CellMode::Original ? gain_original : gain_reconfigured;
  return sigma_n * gain_original / gain;
}

double switching_voltage(const InverterPair& inv, const StageDeviation& dev,
                         const Environment& env, double v_vdd,
                         double global_shift, double width_mult) {
  if (v_vdd <= 0.0)
    throw std::invalid_argument("switching_voltage: v_vdd must be > 0");
  const double v_t = thermal_voltage(kConst, env.temperature);

  double lo = 1e-9;
  double hi = v_vdd - 1e-9;
  double f_lo =
      stage_balance(inv, dev, env, v_vdd, lo, v_t, global_shift, width_mult);
  double f_hi =
      stage_balance(inv, dev, env, v_vdd, hi, v_t, global_shift, width_mult);
  if (!(f_lo < 0.0 && f_hi > 0.0)) {
    std::ostringstream msg;
    msg << "switching_voltage: balance not bracketed in (0, " << v_vdd
        << ") V";
    throw ConvergenceError(msg.str());
  }
  for (int iter = 0; iter < 200 && hi - lo > 1e-6; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid =
        stage_balance(inv, dev, env, v_vdd, mid, v_t, global_shift, width_mult);
    if (f_mid == 0.0) return mid;
    if (f_mid < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double decision_margin(const InverterPair& inv, const CellMismatch& cell,
                       CellMode mode, const Environment& env, double v_vdd,
                       double global_shift) {
  if (mode == CellMode::Original) {
    const double vm1 =
        switching_voltage(inv, cell.stage[0], env, v_vdd, global_shift);
    const double vm2 =
        switching_voltage(inv, cell.stage[1], env, v_vdd, global_shift);
    return vm1 - vm2;
  }

  auto average = [](const VthDeviation& a, const VthDeviation& b) {
    return VthDeviation{0.5 * (a.static_dev + b.static_dev),
                        0.5 * (a.tempco_dev + b.tempco_dev),
                        0.5 * (a.gamma_dev + b.gamma_dev)};
  };
  const StageDeviation merged{
      average(cell.stage[0].nmos, cell.stage[1].nmos),
      average(cell.stage[0].pmos, cell.stage[1].pmos)};
  const double vm_merged =
      switching_voltage(inv, merged, env, v_vdd, global_shift, 2.0);
  const double vm3 =
      switching_voltage(inv, cell.stage[2], env, v_vdd, global_shift);
  return vm_merged - vm3;
}

uint8_t evaluate_bit(double margin, CellMode mode, const NoiseModel& noise,
                     const KeyedStream& stream, uint32_t cell,
                     uint64_t eval_index) {
  const double sigma = noise.effective_sigma(mode);
  double x = margin;
  if (sigma > 0.0) x += sigma * stream.normal(cell, 0, eval_index);
  if (x > 0.0) return 0;
  return 1;  // x < 0, or the degenerate exact tie with zero noise
}

double flip_probability(double margin, const NoiseModel& noise,
                        CellMode mode) {
  const double sigma = noise.effective_sigma(mode);
  if (sigma == 0.0) return margin == 0.0 ? 0.5 : 0.0;
  return normal_cdf(-std::fabs(margin) / sigma);
}

}  // namespace puf
