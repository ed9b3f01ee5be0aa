#pragma once

#include "puf/bitmatrix.hpp"
#include "puf/device.hpp"

#include <cstdint>
#include <string>

namespace puf {

enum class MapProvenance : uint8_t { EVB = 0, TempOracle = 1, Manual = 2 };

// Which cells are read in reconfigured mode. Server-side artifact.
struct RMap {
  uint32_t chip_id = 0;
  BitMatrix reconfigure;
  MapProvenance provenance = MapProvenance::Manual;
  std::string sweep_description;

  bool flagged(size_t cell) const {
    return reconfigure.size() > cell && reconfigure[cell] != 0;
  }
  size_t flagged_count() const {
    size_t n = 0;
    for (size_t i = 0; i < reconfigure.size(); ++i) n += reconfigure[i];
    return n;
  }
};

// Which cells are excluded from keys and metrics.
struct Mask {
  uint32_t chip_id = 0;
  BitMatrix discard;
  std::string sweep_description;

  bool masked(size_t cell) const {
    return discard.size() > cell && discard[cell] != 0;
  }
  size_t masked_count() const {
    size_t n = 0;
    for (size_t i = 0; i < discard.size(); ++i) n += discard[i];
    return n;
  }
};

struct GoldenKey {
  BitMatrix bits;
  Environment collected_at;
  int votes = 0;  // odd
};

}  // namespace puf
