#include "puf/chip.hpp"

#include "puf/parallel.hpp"

#include <stdexcept>

namespace puf {

void ArrayGeometry::validate() const {
  if (rows <= 0 || cols <= 0)
    throw std::invalid_argument("ArrayGeometry: rows*cols must be > 0");
  if (cells_per_regulator < 1 || rows % cells_per_regulator != 0)
    throw std::invalid_argument(
        "ArrayGeometry: cells_per_regulator must divide rows");
}

void ChipModel::validate() const {
  geometry.validate();
  noise.validate();
  regulator().validate();
  process.inverter_pmos.validate();
  if (mismatch.pelgrom_avt < 0.0 || mismatch.tempco_sigma < 0.0 ||
      mismatch.gamma_sigma_rel < 0.0 || mismatch.sigma_global < 0.0)
    throw std::invalid_argument("MismatchModel: sigmas must be >= 0");
  if (mismatch.tempco_gamma_corr < -1.0 || mismatch.tempco_gamma_corr > 1.0)
    throw std::invalid_argument(
        "MismatchModel: tempco_gamma_corr must be in [-1, 1]");
}

ChipInstance generate_chip(const ChipModel& model, uint64_t seed,
                           uint32_t chip_id) {
  model.validate();
  ChipInstance chip;
  chip.chip_id = chip_id;
  chip.seed = seed;
  chip.geometry = model.geometry;

  const KeyedStream global(seed, chip_id, StreamPurpose::GlobalShift);
  chip.global_vth_shift = model.mismatch.sigma_global * global.normal(0, 0, 0);

  const KeyedStream s_static(seed, chip_id, StreamPurpose::MismatchStatic);
  const KeyedStream s_tempco(seed, chip_id, StreamPurpose::MismatchTempco);
  const KeyedStream s_gamma(seed, chip_id, StreamPurpose::MismatchGamma);

  const int n = model.geometry.cell_count();
  chip.cells.resize(n);
  for (int c = 0; c < n; ++c) {
    CellMismatch& cell = chip.cells[c];
    for (uint32_t stage = 0; stage < 4; ++stage) {
      cell.stage[stage].nmos = sample_mismatch(
          model.mismatch, model.process.inverter_nmos, s_static, s_tempco,
          s_gamma, static_cast<uint32_t>(c), stage * 2);
      cell.stage[stage].pmos = sample_mismatch(
          model.mismatch, model.process.inverter_pmos, s_static, s_tempco,
          s_gamma, static_cast<uint32_t>(c), stage * 2 + 1);
    }
  }
  return chip;
}

double regulated_vvdd(const ChipModel& model, const Environment& env) {
  return virtual_vdd_fixed_point(model.regulator(), env);
}

std::vector<double> cell_margins(const ChipModel& model,
                                 const ChipInstance& chip,
                                 const Environment& env, const RMap* rmap,
                                 int threads,
                                 std::optional<double> v_vdd_override) {
  const double v_vdd =
      v_vdd_override ? *v_vdd_override : regulated_vvdd(model, env);
  const InverterPair inv = model.inverter();
  const size_t n = chip.cells.size();
  std::vector<double> margins(n);
  parallel_for(n, threads, [&](size_t i) {
    const CellMode mode = (rmap != nullptr && rmap->flagged(i))
                              ? CellMode::Reconfigured
                              : CellMode::Original;
    margins[i] = decision_margin(inv, chip.cells[i], mode, env, v_vdd,
                                 chip.global_vth_shift);
  });
  return margins;
}

std::vector<BitMatrix> evaluate_array(const ChipModel& model,
                                      const ChipInstance& chip,
                                      const Environment& env,
                                      const RMap* rmap, int n_evals,
                                      int threads, StreamPurpose purpose,
                                      uint64_t eval_base) {
  if (n_evals < 1)
    throw std::invalid_argument("evaluate_array: n_evals must be >= 1");
  const std::vector<double> margins =
      cell_margins(model, chip, env, rmap, threads);
  const KeyedStream stream(chip.seed, chip.chip_id, purpose);
  const size_t n = margins.size();

  std::vector<BitMatrix> reads(
      n_evals, BitMatrix(chip.geometry.rows, chip.geometry.cols));
  parallel_for(n, threads, [&](size_t i) {
    const CellMode mode = (rmap != nullptr && rmap->flagged(i))
                              ? CellMode::Reconfigured
                              : CellMode::Original;
    for (int e = 0; e < n_evals; ++e) {
      reads[e][i] = evaluate_bit(margins[i], mode, model.noise, stream,
                                 static_cast<uint32_t>(i), eval_base + e);
    }
  });
  return reads;
}

BitMatrix majority_readout(const ChipModel& model, const ChipInstance& chip,
                           const Environment& env, const RMap* rmap,
                           StreamPurpose purpose, uint64_t eval_base,
                           int votes, int threads) {
  if (votes < 1 || votes % 2 == 0)
    throw std::invalid_argument("majority_readout: votes must be odd");
  const std::vector<double> margins =
      cell_margins(model, chip, env, rmap, threads);
  const KeyedStream stream(chip.seed, chip.chip_id, purpose);
  BitMatrix out(chip.geometry.rows, chip.geometry.cols);
  parallel_for(margins.size(), threads, [&](size_t i) {
    const CellMode mode = (rmap != nullptr && rmap->flagged(i))
                              ? CellMode::Reconfigured
                              : CellMode::Original;
    int ones = 0;
    for (int v = 0; v < votes; ++v)
      ones += evaluate_bit(margins[i], mode, model.noise, stream,
                           static_cast<uint32_t>(i), eval_base + v);
    out[i] = ones * 2 > votes ? 1 : 0;
  });
  return out;
}

std::vector<SweepPointAggregate> environment_sweep(
    const ChipModel& model, const ChipInstance& chip,
    const std::vector<Environment>& grid, const RMap* rmap,
    const BitMatrix& golden, int n_evals, int threads) {
  if (grid.empty())
    throw std::invalid_argument("environment_sweep: empty grid");
  std::vector<SweepPointAggregate> out;
  out.reserve(grid.size());
  for (size_t p = 0; p < grid.size(); ++p) {
    const std::vector<BitMatrix> reads =
        evaluate_array(model, chip, grid[p], rmap, n_evals, threads,
                       StreamPurpose::EvalNoise,
                       static_cast<uint64_t>(p) * n_evals);
    SweepPointAggregate agg;
    agg.env = grid[p];
    agg.majority = BitMatrix(chip.geometry.rows, chip.geometry.cols);
    agg.flip_counts.assign(golden.size(), 0);
    size_t flips = 0, unstable = 0;
    for (size_t i = 0; i < golden.size(); ++i) {
      int ones = 0;
      for (const BitMatrix& r : reads) {
        ones += r[i];
        if (r[i] != golden[i]) ++agg.flip_counts[i];
      }
      agg.majority[i] = ones * 2 > n_evals ? 1 : 0;
      flips += agg.flip_counts[i];
      if (agg.flip_counts[i] > 0) ++unstable;
    }
    agg.ber = static_cast<double>(flips) / (golden.size() * n_evals);
    agg.unstable_fraction = static_cast<double>(unstable) / golden.size();
    out.push_back(std::move(agg));
  }
  return out;
}

}  // namespace puf
