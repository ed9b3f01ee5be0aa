#pragma once

#include <array>
#include <cstdint>

namespace puf {

// Philox4x32-10 counter-based generator (Salmon et al., "Parallel random
// numbers: as easy as 1, 2, 3", SC'11). Stateless: output is a pure
// function of (counter, key), which is what makes every sample in the
// simulator addressable and order-independent.
std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> counter,
                                   std::array<uint32_t, 2> key);

// Sample purposes. Each purpose owns an independent stream space so that
// e.g. enrollment reads can never collide with evaluation reads.
enum class StreamPurpose : uint32_t {
  MismatchStatic = 1,
  MismatchTempco = 2,
  MismatchGamma = 3,
  GlobalShift = 4,
  EvalNoise = 5,
  GoldenNoise = 6,
  EnrollEvb = 7,
  EnrollTemp = 8,
  MaskCheck = 9,
  StabilizedRead = 10,
};

// A keyed random stream: doubles addressed by (seed, chip, purpose,
// cell, slot, draw). Identical addresses always produce identical values,
// from any thread, in any order.
class KeyedStream {
 public:
  KeyedStream(uint64_t seed, uint32_t chip_id, StreamPurpose purpose);

  // Uniform in (0, 1].
  double uniform(uint32_t cell, uint32_t slot, uint64_t draw) const;

  // Standard normal via Box-Muller on one Philox block.
  double normal(uint32_t cell, uint32_t slot, uint64_t draw) const;

 private:
  std::array<uint32_t, 2> key_;
};

}  // namespace puf
