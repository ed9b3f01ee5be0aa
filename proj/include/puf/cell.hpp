#pragma once

#include "puf/device.hpp"
#include "puf/rng.hpp"

#include <array>
#include <cstdint>

namespace puf {

enum class CellMode : uint8_t { Original = 0, Reconfigured = 1 };

// Sampled deviations for one inverter stage.
struct StageDeviation {
  VthDeviation nmos;
  VthDeviation pmos;
};

// The 4-stage chain's entropy state. Stages 3-4 only set the noise gain;
// the bit decision lives in the first stages' switching voltages.
struct CellMismatch {
  std::array<StageDeviation, 4> stage;
};

struct NoiseModel {
  double sigma_n = 2e-4;          // V, input-referred per-read noise
  double gain_original = 4.0;     // A_vO
  double gain_reconfigured = 3.0; // A_vR

  void validate() const;
  // Input-referred noise grows as the chain gain shrinks.
  double effective_sigma(CellMode mode) const;
};

// Nominal inverter devices shared by every stage.
struct InverterPair {
  TransistorParams nmos;
  TransistorParams pmos;
};

// Switching voltage of one stage: the unique V in (0, v_vdd) where the
// pull-down and pull-up currents balance with input = output = V.
// width_mult doubles the stage for the merged (reconfigured) first stage.
// Bisection to 1 uV; throws ConvergenceError on failure.
double switching_voltage(const InverterPair& inv, const StageDeviation& dev,
                         const Environment& env, double v_vdd,
                         double global_shift = 0.0, double width_mult = 1.0);

// Original: V_M1 - V_M2. Reconfigured: V_M1* - V_M3, where the merged
// stage has doubled widths and the arithmetic mean of stages 1-2's
// deviations (the same transistors, reused; Pelgrom-consistent 1/sqrt(2)
// mismatch reduction).
double decision_margin(const InverterPair& inv, const CellMismatch& cell,
                       CellMode mode, const Environment& env, double v_vdd,
                       double global_shift = 0.0);

// One noisy read: sign(margin + n). margin > 0 reads '0', margin < 0
// reads '1'. The degenerate zero-margin, zero-noise cell reads '1'.
uint8_t evaluate_bit(double margin, CellMode mode, const NoiseModel& noise,
                     const KeyedStream& stream, uint32_t cell,
                     uint64_t eval_index);

// Analytic companion of evaluate_bit: per-read flip probability
// Phi(-|margin| / sigma_eff). Zero noise and zero margin reports 0.5.
double flip_probability(double margin, const NoiseModel& noise,
                        CellMode mode);

}  // namespace puf
