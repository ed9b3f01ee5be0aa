#pragma once

#include "puf/chip.hpp"
#include "puf/maps.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace puf {

// Reference key: per-cell majority over `votes` reads at the given
// operating point. rmap (when non-null) collects the key in stabilized
// configuration.
GoldenKey collect_golden(const ChipModel& model, const ChipInstance& chip,
                         const Environment& env, int votes, int threads,
                         const RMap* rmap = nullptr);

// Temporal majority vote over an odd number of samples.
uint8_t tmv(std::span<const uint8_t> samples, int k);

// Exact output error of TMV-k for per-sample error p: the binomial upper
// tail P(Bin(k, p) >= ceil(k/2)).
double tmv_error_probability(int k, double p);

// Flag every cell whose TMV-aggregated bit under some body bias in the
// sweep disagrees with the golden key. Runs at nominal T and supply.
RMap enroll_rmap_evb(const ChipModel& model, const ChipInstance& chip,
                     const GoldenKey& golden,
                     const std::vector<double>& vpw_sweep, int votes,
                     int threads);

// Ground-truth enrollment: same flagging, sweeping temperature instead.
RMap enroll_rmap_temperature_oracle(const ChipModel& model,
                                    const ChipInstance& chip,
                                    const GoldenKey& golden,
                                    const std::vector<double>& temp_grid,
                                    int votes, int threads);

// Second enrollment pass in stabilized configuration: cells whose
// TMV-aggregated bit still flips anywhere across the sweep (nominal point
// included) are discarded. This is where Table-stage "reconfigured but
// still unstable" cells end up.
Mask mask_residual_unstable(const ChipModel& model, const ChipInstance& chip,
                            const RMap& rmap, const Environment& nominal,
                            const std::vector<double>& vpw_sweep, int votes,
                            int threads);

// TMV-k stabilized readouts; output t aggregates reads t*k .. t*k+k-1.
// Masked cells still produce bits; metrics exclude them.
std::vector<BitMatrix> apply_stabilization(const ChipModel& model,
                                           const ChipInstance& chip,
                                           const RMap& rmap, const Mask& mask,
                                           const Environment& env, int tmv_k,
                                           int n_outputs, int threads);

// Probabilistic bookkeeping for the reconfigurable cell: the five
// classification rows are stable-0, stable-1, reconfigured-to-0,
// reconfigured-to-1, and unstable-after-reconfiguration.
enum class CellClass : uint8_t {
  Stable0 = 0,
  Stable1 = 1,
  Reconfigured0 = 2,
  Reconfigured1 = 3,
  Unstable = 4,
};

CellClass classify_cell(double margin_original, double margin_reconfigured,
                        double unstable_threshold);

struct StabilityLedger {
  double p_o = 0.0;  // probability a cell needs reconfiguration
  double p_r = 0.0;  // probability a reconfigured cell is still unstable
  std::array<size_t, 5> class_counts{};

  // 2*0.5*(1-P_O) + 2*0.5*P_O*(1-P_R) + P_O*P_R; identically 1.
  double closure() const {
    return (1.0 - p_o) + p_o * (1.0 - p_r) + p_o * p_r;
  }
};

StabilityLedger build_stability_ledger(
    const std::vector<double>& margins_original,
    const std::vector<double>& margins_reconfigured,
    double unstable_threshold);

struct DetectionRate {
  double vpw = 0.0;
  size_t flagged = 0;
  size_t truly_unstable_flagged = 0;
  double rate = 0.0;  // truly unstable / flagged at this single VPW
};

// Single-VPW detection rates against a temperature-oracle map.
std::vector<DetectionRate> evb_detection_rates(
    const ChipModel& model, const ChipInstance& chip, const GoldenKey& golden,
    const std::vector<double>& vpws, const RMap& oracle, int votes,
    int threads);

}  // namespace puf
