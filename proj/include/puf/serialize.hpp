#pragma once

#include "puf/bitmatrix.hpp"
#include "puf/maps.hpp"
#include "puf/metrics.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace puf {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Packed binary: row-major, 1 bit per cell, MSB first within each byte,
// rows padded to a whole byte.
std::vector<uint8_t> pack_bits(const BitMatrix& m);
BitMatrix unpack_bits(const std::vector<uint8_t>& bytes, int rows, int cols);

// Hex text: one row per line, each line the row's packed bytes in hex.
std::string to_hex(const BitMatrix& m);
BitMatrix from_hex(const std::string& text, int rows, int cols);

// Versioned text format shared by reconfigure maps and discard masks:
// a header (kind, chip_id, geometry, provenance, sweep description)
// followed by row-major run-length-encoded flags. Round-trips losslessly.
std::string rmap_to_text(const RMap& rmap);
RMap rmap_from_text(const std::string& text);

std::string mask_to_text(const Mask& mask);
Mask mask_from_text(const std::string& text);

const char* provenance_name(MapProvenance p);
MapProvenance provenance_from_name(const std::string& name);

// One CSV line; fields containing commas, quotes, or newlines are quoted.
std::string csv_row(const std::vector<std::string>& fields);

// Machine-readable report (JSON text) and aligned-column human text.
std::string eval_report_to_json(const EvalReport& report);
std::string eval_report_to_text(const EvalReport& report);

// Lag,value series for plotting, with the confidence bound in the header.
std::string autocorrelation_to_csv(const AutocorrelationResult& ac);

}  // namespace puf
