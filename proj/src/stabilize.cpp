#include "puf/stabilize.hpp"

#include "puf/parallel.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace puf {
namespace {

std::string describe_sweep(const char* name, const std::vector<double>& pts) {
  std::ostringstream os;
  os << name;
  for (size_t i = 0; i < pts.size(); ++i) os << (i ? "," : " ") << pts[i];
  return os.str();
}

}  // namespace

GoldenKey collect_golden(const ChipModel& model, const ChipInstance& chip,
                         const Environment& env, int votes, int threads,
                         const RMap* rmap) {
  if (votes < 3 || votes % 2 == 0)
    throw std::invalid_argument("collect_golden: votes must be odd and >= 3");
  GoldenKey key;
  key.bits = majority_readout(model, chip, env, rmap,
                              StreamPurpose::GoldenNoise, 0, votes, threads);
  key.collected_at = env;
  key.votes = votes;
  return key;
}

uint8_t tmv(std::span<const uint8_t> samples, int k) {
  if (k < 1 || k % 2 == 0)
    throw std::invalid_argument("tmv: k must be odd");
  if (static_cast<int>(samples.size()) != k)
    throw std::invalid_argument("tmv: sample count must equal k");
  int ones = 0;
  for (uint8_t b : samples) ones += b;
  return ones * 2 > k ? 1 : 0;
}

double tmv_error_probability(int k, double p) {
  if (k < 1 || k % 2 == 0)
    throw std::invalid_argument("tmv_error_probability: k must be odd");
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  // Exact binomial upper tail, summed from the smallest term.
  double tail = 0.0;
  for (int i = k; i >= (k + 1) / 2; --i) {
    const double log_term = std::lgamma(k + 1.0) - std::lgamma(i + 1.0) -
                            std::lgamma(k - i + 1.0) + i * std::log(p) +
                            (k - i) * std::log1p(-p);
    tail += std::exp(log_term);
  }
  return tail;
}

namespace {

RMap enroll_sweep(const ChipModel& model, const ChipInstance& chip,
                  const GoldenKey& golden, const std::vector<double>& sweep,
                  int votes, int threads, bool sweep_is_temperature,
                  StreamPurpose purpose, MapProvenance provenance) {
  if (votes < 1 || votes % 2 == 0)
    throw std::invalid_argument("enroll: votes must be odd");
  RMap rmap;
  rmap.chip_id = chip.chip_id;
  rmap.reconfigure = BitMatrix(chip.geometry.rows, chip.geometry.cols);
  rmap.provenance = provenance;
  rmap.sweep_description =
      describe_sweep(sweep_is_temperature ? "temp_K" : "vpw_V", sweep);

  for (size_t p = 0; p < sweep.size(); ++p) {
    Environment env = golden.collected_at;
    if (sweep_is_temperature)
      env.temperature = sweep[p];
    else
      env.body_vpw = sweep[p];
    const BitMatrix read =
        majority_readout(model, chip, env, nullptr, purpose,
                         static_cast<uint64_t>(p) * votes, votes, threads);
    for (size_t i = 0; i < read.size(); ++i)
      if (read[i] != golden.bits[i]) rmap.reconfigure[i] = 1;
  }
  return rmap;
}

}  // namespace

RMap enroll_rmap_evb(const ChipModel& model, const ChipInstance& chip,
                     const GoldenKey& golden,
                     const std::vector<double>& vpw_sweep, int votes,
                     int threads) {
  return enroll_sweep(model, chip, golden, vpw_sweep, votes, threads,
                      /*sweep_is_temperature=*/false, StreamPurpose::EnrollEvb,
                      MapProvenance::EVB);
}

RMap enroll_rmap_temperature_oracle(const ChipModel& model,
                                    const ChipInstance& chip,
                                    const GoldenKey& golden,
                                    const std::vector<double>& temp_grid,
                                    int votes, int threads) {
  return enroll_sweep(model, chip, golden, temp_grid, votes, threads,
                      /*sweep_is_temperature=*/true, StreamPurpose::EnrollTemp,
                      MapProvenance::TempOracle);
}

Mask mask_residual_unstable(const ChipModel& model, const ChipInstance& chip,
                            const RMap& rmap, const Environment& nominal,
                            const std::vector<double>& vpw_sweep, int votes,
                            int threads) {
  if (votes < 1 || votes % 2 == 0)
    throw std::invalid_argument("mask_residual_unstable: votes must be odd");
  Mask mask;
  mask.chip_id = chip.chip_id;
  mask.discard = BitMatrix(chip.geometry.rows, chip.geometry.cols);
  mask.sweep_description = describe_sweep("vpw_V", vpw_sweep);

  // Reference read at the nominal point, then sweep; all in stabilized mode.
  const BitMatrix reference =
      majority_readout(model, chip, nominal, &rmap, StreamPurpose::MaskCheck,
                       0, votes, threads);
  for (size_t p = 0; p < vpw_sweep.size(); ++p) {
    Environment env = nominal;
    env.body_vpw = vpw_sweep[p];
    const BitMatrix read = majority_readout(
        model, chip, env, &rmap, StreamPurpose::MaskCheck,
        static_cast<uint64_t>(p + 1) * votes, votes, threads);
    for (size_t i = 0; i < read.size(); ++i)
      if (read[i] != reference[i]) mask.discard[i] = 1;
  }
  return mask;
}

std::vector<BitMatrix> apply_stabilization(const ChipModel& model,
                                           const ChipInstance& chip,
                                           const RMap& rmap, const Mask& mask,
                                           const Environment& env, int tmv_k,
                                           int n_outputs, int threads) {
  if (tmv_k < 1 || tmv_k % 2 == 0)
    throw std::invalid_argument("apply_stabilization: tmv_k must be odd");
  if (n_outputs < 1)
    throw std::invalid_argument("apply_stabilization: n_outputs must be >= 1");
  (void)mask;  // masked cells are excluded by the metrics layer

  const std::vector<double> margins =
      cell_margins(model, chip, env, &rmap, threads);
  const KeyedStream stream(chip.seed, chip.chip_id,
                           StreamPurpose::StabilizedRead);

  std::vector<BitMatrix> outputs(
      n_outputs, BitMatrix(chip.geometry.rows, chip.geometry.cols));
  parallel_for(margins.size(), threads, [&](size_t i) {
    const CellMode mode =
        rmap.flagged(i) ? CellMode::Reconfigured : CellMode::Original;
    for (int t = 0; t < n_outputs; ++t) {
      int ones = 0;
      for (int j = 0; j < tmv_k; ++j)
        ones += evaluate_bit(margins[i], mode, model.noise, stream,
                             static_cast<uint32_t>(i),
                             static_cast<uint64_t>(t) * tmv_k + j);
      outputs[t][i] = ones * 2 > tmv_k ? 1 : 0;
    }
  });
  return outputs;
}

CellClass classify_cell(double margin_original, double margin_reconfigured,
                        double unstable_threshold) {
  if (std::fabs(margin_original) > unstable_threshold)
    return margin_original > 0.0 ? CellClass::Stable0 : CellClass::Stable1;
  if (std::fabs(margin_reconfigured) > unstable_threshold)
    return margin_reconfigured > 0.0 ? CellClass::Reconfigured0
                                     : CellClass::Reconfigured1;
  return CellClass::Unstable;
}

StabilityLedger build_stability_ledger(
    const std::vector<double>& margins_original,
    const std::vector<double>& margins_reconfigured,
    double unstable_threshold) {
  if (margins_original.size() != margins_reconfigured.size())
    throw std::invalid_argument(
        "build_stability_ledger: margin vectors must match");
  StabilityLedger ledger;
  size_t reconfigured = 0;
  for (size_t i = 0; i < margins_original.size(); ++i) {
    const CellClass cls = classify_cell(
        margins_original[i], margins_reconfigured[i], unstable_threshold);
    ++ledger.class_counts[static_cast<size_t>(cls)];
    if (cls != CellClass::Stable0 && cls != CellClass::Stable1)
      ++reconfigured;
  }
  const size_t n = margins_original.size();
  if (n > 0) {
    ledger.p_o = static_cast<double>(reconfigured) / n;
    if (reconfigured > 0)
      ledger.p_r = static_cast<double>(
                       ledger.class_counts[static_cast<size_t>(
                           CellClass::Unstable)]) /
                   reconfigured;
  }
  return ledger;
}

std::vector<DetectionRate> evb_detection_rates(
    const ChipModel& model, const ChipInstance& chip, const GoldenKey& golden,
    const std::vector<double>& vpws, const RMap& oracle, int votes,
    int threads) {
  std::vector<DetectionRate> out;
  out.reserve(vpws.size());
  for (size_t p = 0; p < vpws.size(); ++p) {
    const RMap single = enroll_rmap_evb(model, chip, golden, {vpws[p]}, votes,
                                        threads);
    DetectionRate d;
    d.vpw = vpws[p];
    for (size_t i = 0; i < single.reconfigure.size(); ++i) {
      if (!single.flagged(i)) continue;
      ++d.flagged;
      if (oracle.flagged(i)) ++d.truly_unstable_flagged;
    }
    d.rate = d.flagged == 0
                 ? 0.0
                 : static_cast<double>(d.truly_unstable_flagged) / d.flagged;
    out.push_back(d);
  }
  return out;
}

}  // namespace puf
