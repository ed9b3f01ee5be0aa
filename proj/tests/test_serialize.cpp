#include "puf/serialize.hpp"

#include <json.hpp>

#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

using namespace puf;

namespace {

BitMatrix random_bits(int rows, int cols, uint32_t seed) {
  BitMatrix m(rows, cols);
  std::mt19937 rng(seed);
  for (size_t i = 0; i < m.size(); ++i) m[i] = uint8_t(rng() & 1);
  return m;
}

}  // namespace

TEST_CASE("bit packing round-trips, including ragged row widths") {
  for (auto [rows, cols] : {std::pair{4, 8}, {3, 7}, {1, 1}, {5, 13}}) {
    const BitMatrix m = random_bits(rows, cols, uint32_t(rows * 100 + cols));
    const std::vector<uint8_t> packed = pack_bits(m);
    CHECK(packed.size() == size_t(rows) * ((cols + 7) / 8));
    CHECK(unpack_bits(packed, rows, cols) == m);
  }
}

TEST_CASE("bit packing is msb-first") {
  BitMatrix m(1, 8);
  m[0] = 1;  // leftmost cell -> most significant bit
  CHECK(pack_bits(m) == std::vector<uint8_t>{0x80});
  BitMatrix n(1, 3);
  n[2] = 1;  // pad bits sit below the data bits
  CHECK(pack_bits(n) == std::vector<uint8_t>{0x20});
}

TEST_CASE("hex text round-trips one row per line") {
  const BitMatrix m = random_bits(4, 12, 9);
  const std::string text = to_hex(m);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  CHECK(from_hex(text, 4, 12) == m);
  CHECK_THROWS_AS(from_hex(text, 5, 12), ParseError);
  CHECK_THROWS_AS(from_hex("zz\n", 1, 8), ParseError);
}

TEST_CASE("reconfigure map text round-trip is lossless") {
  RMap rmap;
  rmap.chip_id = 7;
  rmap.reconfigure = random_bits(8, 16, 21);
  rmap.provenance = MapProvenance::EVB;
  rmap.sweep_description = "vpw_V -0.4,-0.2,0,0.2,0.4";
  const std::string text = rmap_to_text(rmap);
  const RMap back = rmap_from_text(text);
  CHECK(back.chip_id == rmap.chip_id);
  CHECK(back.reconfigure == rmap.reconfigure);
  CHECK(back.provenance == rmap.provenance);
  CHECK(back.sweep_description == rmap.sweep_description);
}

TEST_CASE("degenerate maps round-trip") {
  RMap all_zero;
  all_zero.reconfigure = BitMatrix(4, 4);
  CHECK(rmap_from_text(rmap_to_text(all_zero)).reconfigure ==
        all_zero.reconfigure);
  RMap all_one;
  all_one.reconfigure = BitMatrix(4, 4);
  for (size_t i = 0; i < all_one.reconfigure.size(); ++i)
    all_one.reconfigure[i] = 1;
  CHECK(rmap_from_text(rmap_to_text(all_one)).reconfigure ==
        all_one.reconfigure);
}

TEST_CASE("discard mask text round-trip is lossless") {
  Mask mask;
  mask.chip_id = 3;
  mask.discard = random_bits(8, 16, 22);
  mask.sweep_description = "vpw_V -0.4,0,0.4";
  const Mask back = mask_from_text(mask_to_text(mask));
  CHECK(back.chip_id == mask.chip_id);
  CHECK(back.discard == mask.discard);
  CHECK(back.sweep_description == mask.sweep_description);
}

TEST_CASE("map parser rejects malformed inputs") {
  RMap rmap;
  rmap.reconfigure = random_bits(4, 8, 23);
  const std::string text = rmap_to_text(rmap);
  Mask mask;
  mask.discard = rmap.reconfigure;
  const std::string mask_text = mask_to_text(mask);

  // kind mismatch, both directions
  CHECK_THROWS_AS(rmap_from_text(mask_text), ParseError);
  CHECK_THROWS_AS(mask_from_text(text), ParseError);

  // unknown header key
  std::string bad = text;
  bad.insert(bad.find("rows"), "voltage 3\n");
  CHECK_THROWS_AS(rmap_from_text(bad), ParseError);

  // truncated run-length payload
  std::string truncated = text;
  const size_t flags = truncated.find("flags");
  const size_t eol = truncated.find('\n', flags);
  const size_t last_space = truncated.rfind(' ', eol);
  truncated.erase(flags + 5, eol - flags - 5);
  CHECK_THROWS_AS(rmap_from_text(truncated), ParseError);
  (void)last_space;

  CHECK_THROWS_AS(rmap_from_text(""), ParseError);
  CHECK_THROWS_AS(rmap_from_text("pufmap v2\n"), ParseError);
}

TEST_CASE("provenance names round-trip") {
  for (MapProvenance p :
       {MapProvenance::EVB, MapProvenance::TempOracle, MapProvenance::Manual})
    CHECK(provenance_from_name(provenance_name(p)) == p);
  CHECK_THROWS_AS(provenance_from_name("bogus"), ParseError);
}

TEST_CASE("csv rows quote awkward fields") {
  CHECK(csv_row({"a", "b", "c"}) == "a,b,c\n");
  CHECK(csv_row({"a,b", "c"}) == "\"a,b\",c\n");
  CHECK(csv_row({"say \"hi\""}) == "\"say \"\"hi\"\"\"\n");
  CHECK(csv_row({"line\nbreak"}) == "\"line\nbreak\"\n");
  CHECK(csv_row({}) == "\n");
}

TEST_CASE("evaluation report serializes to parseable json") {
  EvalReport report;
  report.ber = 0.00273;
  report.unstable_fraction = 0.0124;
  report.n_evals = 2000;
  report.entropy_bits = 0.9996;
  report.autocorr.bound = 0.0137;
  report.autocorr.values = {0.001, -0.02, 0.003};
  TestResult t;
  t.name = "frequency";
  t.p_value = 0.42;
  t.pass = true;
  report.test_results.push_back(t);

  const nlohmann::json j = nlohmann::json::parse(eval_report_to_json(report));
  CHECK(j["ber"].get<double>() == doctest::Approx(0.00273));
  CHECK(j["n_evals"].get<int>() == 2000);
  CHECK(j["tests"][0]["name"].get<std::string>() == "frequency");
  CHECK(j["autocorrelation"]["lags_outside_bound"].get<int>() == 1);

  const std::string text = eval_report_to_text(report);
  CHECK(text.find("frequency") != std::string::npos);

  const std::string csv = autocorrelation_to_csv(report.autocorr);
  CHECK(csv.find("# bound_95=") != std::string::npos);
  CHECK(csv.find("lag,value") != std::string::npos);
}
