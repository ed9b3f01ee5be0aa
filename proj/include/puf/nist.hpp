#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace puf {

// One SP 800-22 test outcome. Tests whose minimum input length is not met
// are reported skipped, never silently passed.
struct TestResult {
  std::string name;
  double statistic = 0.0;
  double p_value = 0.0;
  bool pass = false;
  bool skipped = false;
  std::string note;
};

struct NistConfig {
  double alpha = 0.01;
  int block_frequency_m = 128;
  int serial_m = 5;
  int approximate_entropy_m = 4;
};

TestResult frequency_test(const std::vector<uint8_t>& bits);
TestResult block_frequency_test(const std::vector<uint8_t>& bits, int m);
TestResult cumulative_sums_test(const std::vector<uint8_t>& bits,
                                bool reverse);
TestResult runs_test(const std::vector<uint8_t>& bits);
TestResult longest_run_test(const std::vector<uint8_t>& bits);
TestResult dft_test(const std::vector<uint8_t>& bits);
std::pair<TestResult, TestResult> serial_test(const std::vector<uint8_t>& bits,
                                              int m);
TestResult approximate_entropy_test(const std::vector<uint8_t>& bits, int m);

// The nine-test subset: Frequency, Block Frequency, Cumulative Sums
// (forward and backward), Runs, Longest Run, DFT, Serial (two p-values),
// Approximate Entropy.
std::vector<TestResult> nist_800_22_subset(const std::vector<uint8_t>& bits,
                                           const NistConfig& cfg = {});

}  // namespace puf
