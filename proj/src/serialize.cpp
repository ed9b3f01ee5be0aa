#include "puf/serialize.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>

namespace puf {
namespace {

using nlohmann::json;

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  throw ParseError(std::string("invalid hex digit '") + c + "'");
}

// Shared body of the map text format. `kind` distinguishes the two
// artifact types so a mask can never be loaded as a reconfigure map.
std::string map_to_text(const char* kind, uint32_t chip_id,
                        const BitMatrix& flags, const char* provenance,
                        const std::string& sweep) {
  std::ostringstream os;
  os << "pufmap v1\n";
  os << "kind " << kind << '\n';
  os << "chip_id " << chip_id << '\n';
  os << "rows " << flags.rows() << '\n';
  os << "cols " << flags.cols() << '\n';
  if (provenance != nullptr) os << "provenance " << provenance << '\n';
  os << "sweep " << sweep << '\n';
  os << "flags";
  size_t i = 0;
  while (i < flags.size()) {
    size_t run = 1;
    while (i + run < flags.size() && flags[i + run] == flags[i]) ++run;
    os << ' ' << int(flags[i] ? 1 : 0) << 'x' << run;
    i += run;
  }
  os << "\nend\n";
  return os.str();
}

struct ParsedMap {
  std::string kind;
  uint32_t chip_id = 0;
  BitMatrix flags;
  std::string provenance;
  std::string sweep;
};

ParsedMap map_from_text(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != "pufmap v1")
    throw ParseError("map: missing 'pufmap v1' header");

  ParsedMap out;
  int rows = 0, cols = 0;
  bool saw_flags = false, saw_end = false;
  while (std::getline(is, line)) {
    if (line == "end") {
      saw_end = true;
      break;
    }
    const size_t sp = line.find(' ');
    const std::string key = line.substr(0, sp);
    const std::string value = sp == std::string::npos ? "" : line.substr(sp + 1);
    if (key == "kind") {
      out.kind = value;
    } else if (key == "chip_id") {
      out.chip_id = static_cast<uint32_t>(std::stoul(value));
    } else if (key == "rows") {
      rows = std::stoi(value);
    } else if (key == "cols") {
      cols = std::stoi(value);
    } else if (key == "provenance") {
      out.provenance = value;
    } else if (key == "sweep") {
      out.sweep = value;
    } else if (key == "flags") {
      if (rows <= 0 || cols <= 0)
        throw ParseError("map: flags before geometry");
      out.flags = BitMatrix(rows, cols);
      size_t i = 0;
      std::istringstream fs(value);
      std::string token;
      while (fs >> token) {
        const size_t x = token.find('x');
        if (x == std::string::npos)
          throw ParseError("map: malformed run '" + token + "'");
        const int bit = std::stoi(token.substr(0, x));
        const size_t run = std::stoul(token.substr(x + 1));
        if (bit != 0 && bit != 1)
          throw ParseError("map: run bit must be 0 or 1");
        if (i + run > out.flags.size())
          throw ParseError("map: runs exceed geometry");
        for (size_t j = 0; j < run; ++j) out.flags[i + j] = uint8_t(bit);
        i += run;
      }
      if (i != out.flags.size())
        throw ParseError("map: runs do not cover geometry");
      saw_flags = true;
    } else {
      throw ParseError("map: unknown header key '" + key + "'");
    }
  }
  if (!saw_end) throw ParseError("map: missing 'end'");
  if (!saw_flags) throw ParseError("map: missing flags");
  return out;
}

json summary_to_json(const DistributionSummary& s) {
  return json{{"count", s.count},
              {"mean", s.mean},
              {"min", s.min},
              {"max", s.max}};
}

json test_to_json(const TestResult& t) {
  json j{{"name", t.name},
         {"statistic", t.statistic},
         {"p_value", t.p_value},
         {"pass", t.pass},
         {"skipped", t.skipped}};
  if (!t.note.empty()) j["note"] = t.note;
  return j;
}

}  // namespace

std::vector<uint8_t> pack_bits(const BitMatrix& m) {
  const int bytes_per_row = (m.cols() + 7) / 8;
  std::vector<uint8_t> out(static_cast<size_t>(m.rows()) * bytes_per_row, 0);
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c)
      if (m.at(r, c))
        out[static_cast<size_t>(r) * bytes_per_row + c / 8] |=
            uint8_t(0x80u >> (c % 8));
  return out;
}

BitMatrix unpack_bits(const std::vector<uint8_t>& bytes, int rows, int cols) {
  const int bytes_per_row = (cols + 7) / 8;
  if (bytes.size() != static_cast<size_t>(rows) * bytes_per_row)
    throw ParseError("unpack_bits: byte count does not match geometry");
  BitMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      m.set(r, c,
            (bytes[static_cast<size_t>(r) * bytes_per_row + c / 8] &
             (0x80u >> (c % 8))) != 0);
  return m;
}

std::string to_hex(const BitMatrix& m) {
  static const char* digits = "0123456789abcdef";
  const std::vector<uint8_t> packed = pack_bits(m);
  const int bytes_per_row = (m.cols() + 7) / 8;
  std::string out;
  out.reserve(packed.size() * 2 + m.rows());
  for (int r = 0; r < m.rows(); ++r) {
    for (int b = 0; b < bytes_per_row; ++b) {
      const uint8_t byte = packed[static_cast<size_t>(r) * bytes_per_row + b];
      out.push_back(digits[byte >> 4]);
      out.push_back(digits[byte & 0xF]);
    }
    out.push_back('\n');
  }
  return out;
}

BitMatrix from_hex(const std::string& text, int rows, int cols) {
  const int bytes_per_row = (cols + 7) / 8;
  std::vector<uint8_t> bytes;
  bytes.reserve(static_cast<size_t>(rows) * bytes_per_row);
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line.size() != static_cast<size_t>(bytes_per_row) * 2)
      throw ParseError("from_hex: row length does not match geometry");
    for (size_t i = 0; i < line.size(); i += 2)
      bytes.push_back(
          uint8_t(hex_digit(line[i]) << 4 | hex_digit(line[i + 1])));
  }
  return unpack_bits(bytes, rows, cols);
}

const char* provenance_name(MapProvenance p) {
  switch (p) {
    case MapProvenance::EVB: return "evb";
    case MapProvenance::TempOracle: return "temp-oracle";
    case MapProvenance::Manual: return "manual";
  }
  throw std::invalid_argument("provenance_name: unknown value");
}

MapProvenance provenance_from_name(const std::string& name) {
  if (name == "evb") return MapProvenance::EVB;
  if (name == "temp-oracle") return MapProvenance::TempOracle;
  if (name == "manual") return MapProvenance::Manual;
  throw ParseError("unknown provenance '" + name + "'");
}

std::string rmap_to_text(const RMap& rmap) {
  return map_to_text("rmap", rmap.chip_id, rmap.reconfigure,
                     provenance_name(rmap.provenance), rmap.sweep_description);
}

RMap rmap_from_text(const std::string& text) {
  const ParsedMap p = map_from_text(text);
  if (p.kind != "rmap")
    throw ParseError("expected kind 'rmap', got '" + p.kind + "'");
  RMap out;
  out.chip_id = p.chip_id;
  out.reconfigure = p.flags;
  out.provenance = provenance_from_name(p.provenance);
  out.sweep_description = p.sweep;
  return out;
}

std::string mask_to_text(const Mask& mask) {
  return map_to_text("mask", mask.chip_id, mask.discard, nullptr,
                     mask.sweep_description);
}

Mask mask_from_text(const std::string& text) {
  const ParsedMap p = map_from_text(text);
  if (p.kind != "mask")
    throw ParseError("expected kind 'mask', got '" + p.kind + "'");
  Mask out;
  out.chip_id = p.chip_id;
  out.discard = p.flags;
  out.sweep_description = p.sweep;
  return out;
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\n") == std::string::npos) {
      out += f;
    } else {
      out.push_back('"');
      for (char c : f) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
      }
      out.push_back('"');
    }
  }
  out.push_back('\n');
  return out;
}

std::string eval_report_to_json(const EvalReport& report) {
  json j;
  j["ber"] = report.ber;
  j["unstable_fraction"] = report.unstable_fraction;
  j["n_evals"] = report.n_evals;
  j["entropy_bits"] = report.entropy_bits;
  j["hamming"]["intra"] = summary_to_json(report.hamming.intra);
  if (report.hamming.inter)
    j["hamming"]["inter"] = summary_to_json(*report.hamming.inter);
  if (report.hamming.separation)
    j["hamming"]["separation"] = *report.hamming.separation;
  j["autocorrelation"]["bound"] = report.autocorr.bound;
  j["autocorrelation"]["max_lag"] = report.autocorr.values.size();
  size_t outside = 0;
  for (double v : report.autocorr.values)
    if (std::abs(v) > report.autocorr.bound) ++outside;
  j["autocorrelation"]["lags_outside_bound"] = outside;
  j["tests"] = json::array();
  for (const TestResult& t : report.test_results)
    j["tests"].push_back(test_to_json(t));
  return j.dump(2) + "\n";
}

std::string eval_report_to_text(const EvalReport& report) {
  std::ostringstream os;
  char buf[128];
  auto row = [&](const char* name, double value, const char* unit) {
    std::snprintf(buf, sizeof buf, "%-24s %14.6g %s\n", name, value, unit);
    os << buf;
  };
  row("ber", report.ber, "");
  row("unstable_fraction", report.unstable_fraction, "");
  row("n_evals", double(report.n_evals), "");
  row("entropy", report.entropy_bits, "bits/bit");
  row("intra_hd_mean", report.hamming.intra.mean, "");
  if (report.hamming.inter) row("inter_hd_mean", report.hamming.inter->mean, "");
  if (report.hamming.separation)
    row("hd_separation", *report.hamming.separation, "x");
  row("autocorr_bound", report.autocorr.bound, "");
  if (!report.test_results.empty()) {
    os << '\n';
    std::snprintf(buf, sizeof buf, "%-24s %12s %10s %s\n", "test", "statistic",
                  "p_value", "verdict");
    os << buf;
    for (const TestResult& t : report.test_results) {
      const char* verdict =
          t.skipped ? "skipped" : (t.pass ? "pass" : "FAIL");
      std::snprintf(buf, sizeof buf, "%-24s %12.4f %10.6f %s\n",
                    t.name.c_str(), t.statistic, t.p_value, verdict);
      os << buf;
    }
  }
  return os.str();
}

std::string autocorrelation_to_csv(const AutocorrelationResult& ac) {
  std::ostringstream os;
  os << "# bound_95=" << ac.bound << '\n';
  os << "lag,value\n";
  for (size_t k = 0; k < ac.values.size(); ++k)
    os << (k + 1) << ',' << ac.values[k] << '\n';
  return os.str();
}

}  // namespace puf
