#pragma once

namespace puf {

// Standard normal CDF.
double normal_cdf(double x);

// Regularized upper incomplete gamma function Q(a, x), as used by the
// SP 800-22 chi-square style tests.
double igamc(double a, double x);

}  // namespace puf
