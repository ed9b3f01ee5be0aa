#pragma once

#include "puf/bitmatrix.hpp"
#include "puf/cell.hpp"
#include "puf/device.hpp"
#include "puf/maps.hpp"
#include "puf/regulator.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace puf {

struct ArrayGeometry {
  int rows = 32;
  int cols = 128;
  int cells_per_regulator = 32;  // one native transistor per column

  int cell_count() const { return rows * cols; }
  void validate() const;
};

struct ProcessParams {
  TransistorParams inverter_nmos;
  TransistorParams inverter_pmos;
  TransistorParams native;
};

// Everything shared by all simulated dies.
struct ChipModel {
  ProcessParams process;
  MismatchModel mismatch;
  NoiseModel noise;
  ArrayGeometry geometry;
  double vm_fraction = 0.5;

  InverterPair inverter() const {
    return {process.inverter_nmos, process.inverter_pmos};
  }
  RegulatorConfig regulator() const {
    return {process.native, process.inverter_nmos,
            geometry.cells_per_regulator, vm_fraction};
  }
  void validate() const;
};

// One simulated die, fully determined by (seed, chip_id, model).
struct ChipInstance {
  uint32_t chip_id = 0;
  uint64_t seed = 0;
  ArrayGeometry geometry;
  double global_vth_shift = 0.0;  // die-to-die corner, shared by all cells
  std::vector<CellMismatch> cells;  // row-major
};

ChipInstance generate_chip(const ChipModel& model, uint64_t seed,
                           uint32_t chip_id);

// Regulated virtual supply for the given operating point (all columns see
// the same nominal regulator). Throws ConvergenceError on failure.
double regulated_vvdd(const ChipModel& model, const Environment& env);

// Decision margins of every cell; rmap (when non-null) selects reconfigured
// mode per cell. v_vdd_override bypasses the regulator (used to model an
// unregulated supply). Deterministic for any thread count.
std::vector<double> cell_margins(const ChipModel& model,
                                 const ChipInstance& chip,
                                 const Environment& env, const RMap* rmap,
                                 int threads,
                                 std::optional<double> v_vdd_override = {});

// n_evals noisy readouts; evaluation e of a cell is keyed by
// (chip_id, cell, eval_base + e) within the given stream purpose.
std::vector<BitMatrix> evaluate_array(
    const ChipModel& model, const ChipInstance& chip, const Environment& env,
    const RMap* rmap, int n_evals, int threads,
    StreamPurpose purpose = StreamPurpose::EvalNoise, uint64_t eval_base = 0);

// Per-cell majority over `votes` reads (votes odd).
BitMatrix majority_readout(const ChipModel& model, const ChipInstance& chip,
                           const Environment& env, const RMap* rmap,
                           StreamPurpose purpose, uint64_t eval_base,
                           int votes, int threads);

struct SweepPointAggregate {
  Environment env;
  BitMatrix majority;
  std::vector<int> flip_counts;  // per cell, vs golden
  double ber = 0.0;
  double unstable_fraction = 0.0;
};

std::vector<SweepPointAggregate> environment_sweep(
    const ChipModel& model, const ChipInstance& chip,
    const std::vector<Environment>& grid, const RMap* rmap,
    const BitMatrix& golden, int n_evals, int threads);

}  // namespace puf
