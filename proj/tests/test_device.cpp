#include "puf/device.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace puf;
using doctest::Approx;

namespace {
const PhysicalConstants kPc;
}

TEST_CASE("thermal voltage at reference points") {
  CHECK(thermal_voltage(kPc, 300.15) == Approx(25.87e-3).epsilon(4e-4));
  CHECK(thermal_voltage(kPc, 218.15) == Approx(18.80e-3).epsilon(4e-4));
  CHECK(thermal_voltage(kPc, 398.15) == Approx(34.31e-3).epsilon(4e-4));
}

TEST_CASE("thermal voltage rejects non-positive temperature") {
  CHECK_THROWS_AS(thermal_voltage(kPc, 0.0), std::domain_error);
  CHECK_THROWS_AS(thermal_voltage(kPc, -10.0), std::domain_error);
}

TEST_CASE("thermal voltage is linear in T") {
  const double a = thermal_voltage(kPc, 100.0);
  const double b = thermal_voltage(kPc, 200.0);
  const double c = thermal_voltage(kPc, 300.0);
  CHECK(b - a == Approx(c - b).epsilon(1e-12));
  CHECK(b == Approx(2.0 * a).epsilon(1e-12));
}

TEST_CASE("effective vth reduces to nominal at the reference point") {
  TransistorParams p;
  Environment env;  // T = Tref, vpw = 0
  CHECK(effective_vth(p, env, {}) == Approx(p.vth_nominal).epsilon(1e-15));

  p.body_gamma = 0.0;
  env.body_vpw = 0.3;
  CHECK(effective_vth(p, env, {}) == Approx(p.vth_nominal).epsilon(1e-15));
}

TEST_CASE("effective vth body term: direct surd evaluation") {
  TransistorParams p;
  p.vth_nominal = 0.45;
  p.body_gamma = 0.2;
  p.fermi_phi = 0.35;
  Environment env;
  env.body_vpw = -0.4;  // V_SB = -body_vpw = +0.4
  const double expected = 0.45 + 0.2 * (std::sqrt(1.1) - std::sqrt(0.7));
  CHECK(effective_vth(p, env, {}) == Approx(expected).epsilon(1e-12));
  CHECK(expected == Approx(0.4924297643).epsilon(1e-9));
}

TEST_CASE("effective vth monotonicity in V_SB and T") {
  TransistorParams p;
  Environment env;
  double prev = -1e9;
  for (double vpw = 0.0; vpw >= -0.45; vpw -= 0.05) {
    env.body_vpw = vpw;  // decreasing vpw = increasing V_SB
    const double v = effective_vth(p, env, {});
    CHECK(v >= prev - 1e-15);
    prev = v;
  }
  env.body_vpw = 0.0;
  double prev_t = 1e9;
  for (double t = 250.0; t <= 400.0; t += 25.0) {
    env.temperature = t;
    const double v = effective_vth(p, env, {});
    CHECK(v < prev_t);
    prev_t = v;
  }
}

TEST_CASE("subthreshold current edge cases") {
  TransistorParams p;
  const double vt = thermal_voltage(kPc, 300.15);

  SUBCASE("zero v_ds gives zero current") {
    CHECK(subthreshold_current(p, 0.3, 0.0, p.vth_nominal, vt) == 0.0);
  }
  SUBCASE("large v_ds saturates the drain factor") {
    const double sat = subthreshold_current(p, 0.3, 10.0 * vt, p.vth_nominal, vt);
    const double deep = subthreshold_current(p, 0.3, 100.0 * vt, p.vth_nominal, vt);
    CHECK(std::abs(sat / deep - 1.0) < 5e-5);
  }
  SUBCASE("current is linear in width") {
    const double i1 = subthreshold_current(p, 0.3, 0.2, p.vth_nominal, vt);
    p.width_w *= 2.0;
    const double i2 = subthreshold_current(p, 0.3, 0.2, p.vth_nominal, vt);
    CHECK(i2 == Approx(2.0 * i1).epsilon(1e-12));
  }
  SUBCASE("strictly increasing in v_gs and v_ds") {
    CHECK(subthreshold_current(p, 0.31, 0.2, p.vth_nominal, vt) >
          subthreshold_current(p, 0.30, 0.2, p.vth_nominal, vt));
    CHECK(subthreshold_current(p, 0.3, 0.21, p.vth_nominal, vt) >
          subthreshold_current(p, 0.3, 0.20, p.vth_nominal, vt));
  }
  SUBCASE("log form agrees with the linear form") {
    const double i = subthreshold_current(p, 0.25, 0.15, p.vth_nominal, vt);
    const double li = log_subthreshold_current(p, 0.25, 0.15, p.vth_nominal, vt);
    CHECK(std::log(i) == Approx(li).epsilon(1e-12));
    CHECK(std::isinf(log_subthreshold_current(p, 0.25, 0.0, p.vth_nominal, vt)));
  }
}

TEST_CASE("zeroed mismatch model samples exactly zero deviations") {
  MismatchModel m;
  m.pelgrom_avt = 0.0;
  m.tempco_sigma = 0.0;
  m.gamma_sigma_rel = 0.0;
  TransistorParams p;
  const KeyedStream s(1, 0, StreamPurpose::MismatchStatic);
  const KeyedStream t(1, 0, StreamPurpose::MismatchTempco);
  const KeyedStream g(1, 0, StreamPurpose::MismatchGamma);
  const VthDeviation d = sample_mismatch(m, p, s, t, g, 5, 2);
  CHECK(d.static_dev == 0.0);
  CHECK(d.tempco_dev == 0.0);
  CHECK(d.gamma_dev == 0.0);
}

TEST_CASE("pelgrom area law: quadrupling area halves the std") {
  MismatchModel m;
  m.pelgrom_avt = 2e-8;
  TransistorParams small;
  TransistorParams big = small;
  big.width_w *= 2.0;
  big.length_l *= 2.0;
  const KeyedStream s(7, 0, StreamPurpose::MismatchStatic);
  const KeyedStream t(7, 0, StreamPurpose::MismatchTempco);
  const KeyedStream g(7, 0, StreamPurpose::MismatchGamma);

  auto sample_std = [&](const TransistorParams& p, uint32_t slot) {
    const int n = 100000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v =
          sample_mismatch(m, p, s, t, g, uint32_t(i), slot).static_dev;
      sum += v;
      sq += v * v;
    }
    return std::sqrt(sq / n - (sum / n) * (sum / n));
  };
  const double ratio = sample_std(small, 0) / sample_std(big, 1);
  CHECK(ratio == Approx(2.0).epsilon(0.02));
}

TEST_CASE("mismatch sampling is reproducible and slot-addressed") {
  MismatchModel m;
  m.pelgrom_avt = 2e-8;
  m.tempco_sigma = 5e-6;
  m.gamma_sigma_rel = 0.02;
  TransistorParams p;
  const KeyedStream s(3, 1, StreamPurpose::MismatchStatic);
  const KeyedStream t(3, 1, StreamPurpose::MismatchTempco);
  const KeyedStream g(3, 1, StreamPurpose::MismatchGamma);
  const VthDeviation a = sample_mismatch(m, p, s, t, g, 11, 4);
  const VthDeviation b = sample_mismatch(m, p, s, t, g, 11, 4);
  const VthDeviation c = sample_mismatch(m, p, s, t, g, 11, 5);
  CHECK(a.static_dev == b.static_dev);
  CHECK(a.tempco_dev == b.tempco_dev);
  CHECK(a.gamma_dev == b.gamma_dev);
  CHECK(a.static_dev != c.static_dev);
}

TEST_CASE("tempco and gamma deviations are positively correlated") {
  MismatchModel m;
  m.pelgrom_avt = 2e-8;
  m.tempco_sigma = 5e-6;
  m.gamma_sigma_rel = 0.02;
  m.tempco_gamma_corr = 0.8;
  TransistorParams p;
  const KeyedStream s(5, 0, StreamPurpose::MismatchStatic);
  const KeyedStream t(5, 0, StreamPurpose::MismatchTempco);
  const KeyedStream g(5, 0, StreamPurpose::MismatchGamma);
  const int n = 50000;
  double sxy = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    const VthDeviation d = sample_mismatch(m, p, s, t, g, uint32_t(i), 0);
    sx += d.tempco_dev;
    sy += d.gamma_dev;
    sxx += d.tempco_dev * d.tempco_dev;
    syy += d.gamma_dev * d.gamma_dev;
    sxy += d.tempco_dev * d.gamma_dev;
  }
  const double cov = sxy / n - (sx / n) * (sy / n);
  const double rho = cov / std::sqrt((sxx / n - (sx / n) * (sx / n)) *
                                     (syy / n - (sy / n) * (sy / n)));
  CHECK(rho == Approx(0.8).epsilon(0.03));
}
