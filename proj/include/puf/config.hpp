#pragma once

#include "puf/chip.hpp"
#include "puf/nist.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace puf {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Stabilization pipeline settings.
struct StabilizationConfig {
  int tmv_k = 11;          // votes per stabilized output bit
  int golden_votes = 1001; // reads behind the golden key
  int enroll_votes = 11;   // reads per enrollment sweep point
  std::vector<double> vpw_sweep = {-0.4, -0.2, 0.0, 0.2, 0.4};
  std::vector<double> temp_grid;  // oracle enrollment grid, K
};

struct EvaluationConfig {
  int n_evals = 2000;       // raw evaluations per chip
  int sweep_n_evals = 101;  // evaluations per sweep grid point
  int autocorr_max_lag = 4000;
  NistConfig nist;
};

// Everything a run needs; one file drives every command.
struct ExperimentConfig {
  ChipModel model;
  Environment nominal;
  std::vector<uint64_t> seeds;
  std::vector<double> temperature_grid;  // K
  std::vector<double> supply_grid;       // V
  StabilizationConfig stabilization;
  EvaluationConfig evaluation;
  std::string output_dir = "out";

  void validate() const;  // throws ConfigError
};

// Parse and validate. Unknown keys are rejected by name; all module
// invariants are checked at load so commands can assume a sane config.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);

// Canonical serialization of the loaded config (key-sorted JSON); the
// manifest stores a hash of this so runs are comparable across formatting.
std::string canonical_config(const ExperimentConfig& cfg);

// FNV-1a over the canonical form, as hex text.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace puf
