#include "puf/chip.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace puf;
using doctest::Approx;

namespace {

ChipModel reference_model() {
  ChipModel m;
  m.process.native.slope_m = 1.3;
  m.process.native.vth_nominal = -0.05;
  m.process.native.width_w = 1.639541e-5;
  m.mismatch.pelgrom_avt = 2.121e-8;
  m.mismatch.tempco_sigma = 4.5e-6;
  m.mismatch.gamma_sigma_rel = 0.023;
  m.geometry = {8, 16, 8};  // small array for fast tests
  return m;
}

Environment reference_env() {
  Environment env;
  env.bias_vbias = 0.398945;
  return env;
}

}  // namespace

TEST_CASE("geometry validation") {
  ArrayGeometry g{8, 16, 8};
  CHECK_NOTHROW(g.validate());
  g.cells_per_regulator = 3;  // does not divide rows
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = {0, 16, 1};
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}

TEST_CASE("chip generation is a pure function of (seed, chip_id)") {
  const ChipModel model = reference_model();
  const ChipInstance a = generate_chip(model, 42, 3);
  const ChipInstance b = generate_chip(model, 42, 3);
  CHECK(a.global_vth_shift == b.global_vth_shift);
  REQUIRE(a.cells.size() == b.cells.size());
  for (size_t i = 0; i < a.cells.size(); ++i)
    for (int s = 0; s < 4; ++s) {
      CHECK(a.cells[i].stage[s].nmos.static_dev ==
            b.cells[i].stage[s].nmos.static_dev);
      CHECK(a.cells[i].stage[s].pmos.gamma_dev ==
            b.cells[i].stage[s].pmos.gamma_dev);
    }
  const ChipInstance c = generate_chip(model, 43, 3);
  CHECK(a.cells[0].stage[0].nmos.static_dev !=
        c.cells[0].stage[0].nmos.static_dev);
}

TEST_CASE("all-zero mismatch model produces a fully degenerate chip") {
  ChipModel model = reference_model();
  model.mismatch = MismatchModel{0.0, 0.0, 0.0, 0.8, 0.0};
  const ChipInstance chip = generate_chip(model, 1, 0);
  const std::vector<double> margins =
      cell_margins(model, chip, reference_env(), nullptr, 1);
  for (double m : margins) CHECK(std::abs(m) < 2e-6);
}

TEST_CASE("noiseless single evaluation equals the sign-of-margin map") {
  ChipModel model = reference_model();
  model.noise.sigma_n = 0.0;
  const ChipInstance chip = generate_chip(model, 7, 0);
  const Environment env = reference_env();
  const std::vector<double> margins =
      cell_margins(model, chip, env, nullptr, 1);
  const std::vector<BitMatrix> reads =
      evaluate_array(model, chip, env, nullptr, 1, 1);
  REQUIRE(reads.size() == 1);
  for (size_t i = 0; i < margins.size(); ++i)
    CHECK(reads[0][i] == (margins[i] > 0.0 ? 0 : 1));
}

TEST_CASE("thread count never changes results") {
  const ChipModel model = reference_model();
  const ChipInstance chip = generate_chip(model, 11, 0);
  const Environment env = reference_env();

  const std::vector<double> m1 = cell_margins(model, chip, env, nullptr, 1);
  const std::vector<double> m8 = cell_margins(model, chip, env, nullptr, 8);
  CHECK(m1 == m8);

  const std::vector<BitMatrix> r1 =
      evaluate_array(model, chip, env, nullptr, 20, 1);
  const std::vector<BitMatrix> r8 =
      evaluate_array(model, chip, env, nullptr, 20, 8);
  REQUIRE(r1.size() == r8.size());
  for (size_t e = 0; e < r1.size(); ++e) CHECK(r1[e] == r8[e]);

  CHECK(majority_readout(model, chip, env, nullptr,
                         StreamPurpose::GoldenNoise, 0, 11, 1) ==
        majority_readout(model, chip, env, nullptr,
                         StreamPurpose::GoldenNoise, 0, 11, 8));
}

TEST_CASE("a chip-global threshold shift leaves the bit map unchanged") {
  const ChipModel model = reference_model();
  const Environment env = reference_env();
  ChipInstance chip = generate_chip(model, 21, 0);
  ChipInstance shifted = chip;
  shifted.global_vth_shift += 0.030;

  const std::vector<double> a = cell_margins(model, chip, env, nullptr, 1);
  const std::vector<double> b = cell_margins(model, shifted, env, nullptr, 1);
  for (size_t i = 0; i < a.size(); ++i)
    CHECK(a[i] == Approx(b[i]).epsilon(1e-9).scale(1e-6));

  const std::vector<BitMatrix> ra =
      evaluate_array(model, chip, env, nullptr, 5, 1);
  const std::vector<BitMatrix> rb =
      evaluate_array(model, shifted, env, nullptr, 5, 1);
  for (size_t e = 0; e < ra.size(); ++e) CHECK(ra[e] == rb[e]);
}

TEST_CASE("single-point sweep reduces to the evaluation aggregate") {
  const ChipModel model = reference_model();
  const ChipInstance chip = generate_chip(model, 31, 0);
  const Environment env = reference_env();
  const BitMatrix golden = majority_readout(
      model, chip, env, nullptr, StreamPurpose::GoldenNoise, 0, 101, 1);

  const auto points =
      environment_sweep(model, chip, {env}, nullptr, golden, 15, 1);
  REQUIRE(points.size() == 1);

  const std::vector<BitMatrix> reads = evaluate_array(
      model, chip, env, nullptr, 15, 1, StreamPurpose::EvalNoise, 0);
  size_t flips = 0;
  for (size_t i = 0; i < golden.size(); ++i)
    for (const BitMatrix& r : reads) flips += r[i] != golden[i];
  CHECK(points[0].ber ==
        Approx(double(flips) / (golden.size() * 15)).epsilon(1e-12));
}

TEST_CASE("removing the regulator exposes cells to supply variation") {
  // At low rails the drain factor compresses every margin toward zero,
  // raising every cell's flip probability. The regulated array only sees
  // supplies inside its operating range (rail pinned at the setpoint);
  // raw cells must ride the full excursion, including the 0.3 V dip.
  ChipModel model = reference_model();
  model.geometry = {32, 64, 32};
  Environment env = reference_env();
  env.bias_vbias = solve_vbias_for_target(model.regulator(), env, 0.5);
  const ChipInstance chip = generate_chip(model, 41, 0);

  auto expected_flips = [&](const std::vector<double>& supplies,
                            bool regulated) {
    double total = 0.0;
    for (double s : supplies) {
      Environment e = env;
      e.supply_vdd = s;
      const std::vector<double> m =
          regulated ? cell_margins(model, chip, e, nullptr, 8)
                    : cell_margins(model, chip, e, nullptr, 8, s);
      for (double margin : m)
        total += flip_probability(margin, model.noise, CellMode::Original);
    }
    return total;
  };

  const double regulated = expected_flips({0.55, 0.8, 1.0, 1.2}, true);
  const double unregulated = expected_flips({0.3, 0.55, 0.8, 1.2}, false);
  CHECK(unregulated > regulated);
}
