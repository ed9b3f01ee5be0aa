#include "puf/rng.hpp"

#include <cmath>

namespace puf {
namespace {

constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mul_hilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
  uint64_t p = static_cast<uint64_t>(a) * b;
  hi = static_cast<uint32_t>(p >> 32);
  lo = static_cast<uint32_t>(p);
}

// SplitMix64 finalizer, used only to derive stream keys.
inline uint64_t mix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> ctr,
                                   std::array<uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    uint32_t hi0, lo0, hi1, lo1;
    mul_hilo(kPhiloxM0, ctr[0], hi0, lo0);
    mul_hilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

KeyedStream::KeyedStream(uint64_t seed, uint32_t chip_id,
                         StreamPurpose purpose) {
  uint64_t k = mix64(seed);
  k = mix64(k ^ chip_id);
  k = mix64(k ^ (static_cast<uint64_t>(purpose) << 32));
  key_ = {static_cast<uint32_t>(k), static_cast<uint32_t>(k >> 32)};
}

double KeyedStream::uniform(uint32_t cell, uint32_t slot,
                            uint64_t draw) const {
  const std::array<uint32_t, 4> out = philox4x32(
      {cell, slot, static_cast<uint32_t>(draw),
       static_cast<uint32_t>(draw >> 32)},
      key_);
  const uint64_t bits =
      (static_cast<uint64_t>(out[0]) << 32) | out[1];
  // (0, 1]: take 53 bits, map [0,1) then reflect so log() is safe.
  return 1.0 - static_cast<double>(bits >> 11) * 0x1.0p-53;
}

double KeyedStream::normal(uint32_t cell, uint32_t slot,
                           uint64_t draw) const {
  const std::array<uint32_t, 4> out = philox4x32(
      {cell, slot, static_cast<uint32_t>(draw),
       static_cast<uint32_t>(draw >> 32)},
      key_);
  const uint64_t b1 = (static_cast<uint64_t>(out[0]) << 32) | out[1];
  const uint64_t b2 = (static_cast<uint64_t>(out[2]) << 32) | out[3];
  const double u1 = 1.0 - static_cast<double>(b1 >> 11) * 0x1.0p-53;
  const double u2 = static_cast<double>(b2 >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
}

}  // namespace puf
