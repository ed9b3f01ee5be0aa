#include "puf/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace puf {
namespace {

void check_shapes(const BitMatrix& golden,
                  const std::vector<BitMatrix>& readouts) {
  for (const BitMatrix& r : readouts)
    if (!r.same_shape(golden))
      throw std::invalid_argument("metrics: readout/golden shape mismatch");
}

}  // namespace

double ber(const BitMatrix& golden, const std::vector<BitMatrix>& readouts,
           const Mask* mask) {
  check_shapes(golden, readouts);
  if (readouts.empty())
    throw std::invalid_argument("ber: no readouts");
  size_t flips = 0, cells = 0;
  for (size_t i = 0; i < golden.size(); ++i) {
    if (mask != nullptr && mask->masked(i)) continue;
    ++cells;
    for (const BitMatrix& r : readouts)
      if (r[i] != golden[i]) ++flips;
  }
  if (cells == 0) return 0.0;
  return static_cast<double>(flips) / (cells * readouts.size());
}

double unstable_fraction(const BitMatrix& golden,
                         const std::vector<BitMatrix>& readouts,
                         const Mask* mask) {
  check_shapes(golden, readouts);
  if (readouts.empty())
    throw std::invalid_argument("unstable_fraction: no readouts");
  size_t unstable = 0, cells = 0;
  for (size_t i = 0; i < golden.size(); ++i) {
    if (mask != nullptr && mask->masked(i)) continue;
    ++cells;
    for (const BitMatrix& r : readouts) {
      if (r[i] != golden[i]) {
        ++unstable;
        break;
      }
    }
  }
  if (cells == 0) return 0.0;
  return static_cast<double>(unstable) / cells;
}

double fractional_hd(const BitMatrix& a, const BitMatrix& b,
                     const Mask* mask) {
  if (!a.same_shape(b))
    throw std::invalid_argument("fractional_hd: shape mismatch");
  size_t diff = 0, cells = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (mask != nullptr && mask->masked(i)) continue;
    ++cells;
    if (a[i] != b[i]) ++diff;
  }
  if (cells == 0) return 0.0;
  return static_cast<double>(diff) / cells;
}

namespace {

DistributionSummary summarize(std::vector<double> samples) {
  DistributionSummary s;
  s.count = samples.size();
  if (samples.empty()) return s;
  s.min = samples.front();
  s.max = samples.front();
  double sum = 0.0;
  for (double v : samples) {
    sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = sum / samples.size();
  s.samples = std::move(samples);
  return s;
}

}  // namespace

HammingReport hamming_distances(
    const std::vector<BitMatrix>& goldens,
    const std::vector<std::vector<BitMatrix>>& readouts_per_chip,
    const std::vector<const Mask*>* masks) {
  if (goldens.empty())
    throw std::invalid_argument("hamming_distances: no golden keys");
  if (readouts_per_chip.size() != goldens.size())
    throw std::invalid_argument(
        "hamming_distances: readouts/goldens count mismatch");
  if (masks != nullptr && masks->size() != goldens.size())
    throw std::invalid_argument("hamming_distances: masks count mismatch");

  HammingReport report;
  std::vector<double> intra;
  for (size_t c = 0; c < goldens.size(); ++c) {
    const Mask* mask = masks != nullptr ? (*masks)[c] : nullptr;
    for (const BitMatrix& r : readouts_per_chip[c])
      intra.push_back(fractional_hd(goldens[c], r, mask));
  }
  report.intra = summarize(std::move(intra));

  if (goldens.size() >= 2) {
    std::vector<double> inter;
    for (size_t a = 0; a < goldens.size(); ++a)
      for (size_t b = a + 1; b < goldens.size(); ++b)
        inter.push_back(fractional_hd(goldens[a], goldens[b]));
    report.inter = summarize(std::move(inter));
    if (report.intra.count > 0) {
      report.separation =
          report.intra.mean == 0.0
              ? std::numeric_limits<double>::infinity()
              : report.inter->mean / report.intra.mean;
    }
  }
  return report;
}

AutocorrelationResult autocorrelation(const std::vector<uint8_t>& bits,
                                      int max_lag) {
  const size_t n = bits.size();
  if (max_lag < 1 || static_cast<size_t>(max_lag) >= n)
    throw std::invalid_argument("autocorrelation: need 1 <= max_lag < n");

  std::vector<double> x(n);
  double mean = 0.0;
  for (size_t i = 0; i < n; ++i) {
    x[i] = bits[i] ? 1.0 : -1.0;
    mean += x[i];
  }
  mean /= n;
  double var = 0.0;
  for (size_t i = 0; i < n; ++i) {
    x[i] -= mean;
    var += x[i] * x[i];
  }

  AutocorrelationResult out;
  out.values.resize(max_lag);
  for (int k = 1; k <= max_lag; ++k) {
    if (var == 0.0) {
      // Constant sequence: perfectly self-similar at every lag.
      out.values[k - 1] = 1.0;
      continue;
    }
    double acc = 0.0;
    for (size_t i = 0; i + k < n; ++i) acc += x[i] * x[i + k];
    out.values[k - 1] = acc / var;
  }
  out.bound = 1.959963985 * std::sqrt(2.0 / static_cast<double>(n));
  return out;
}

double shannon_entropy(const std::vector<uint8_t>& bits) {
  if (bits.empty())
    throw std::invalid_argument("shannon_entropy: empty input");
  size_t ones = 0;
  for (uint8_t b : bits) ones += b;
  const double p = static_cast<double>(ones) / bits.size();
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

}  // namespace puf
