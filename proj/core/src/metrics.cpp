#include "demfill/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "demfill/error.hpp"

namespace demfill {

namespace {

void check_inputs(const DemGrid& pred, const DemGrid& truth, const VoidMask& mask, const char* what) {
  require_same_shape(pred, mask, what);
  require_same_shape(truth, mask, what);
  if (mask.unknown_count() == 0) throw DataError(std::string(what) + ": mask has no unknown pixels");
}

}  // namespace

double mse(const DemGrid& pred, const DemGrid& truth, const VoidMask& mask) {
  check_inputs(pred, truth, mask, "mse");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (!mask[k]) continue;
    const double d = pred[k] - truth[k];
    sum += d * d;
    ++n;
  }
  return sum / static_cast<double>(n);
}

HistogramPair intensity_histograms(const DemGrid& a, const DemGrid& b, const VoidMask& mask, int bins) {
  check_inputs(a, b, mask, "em_histogram");
  if (bins < 1) throw DataError("em_histogram: bins must be >= 1");
  HistogramPair h;
  h.bins = bins;
  h.lo = std::numeric_limits<double>::infinity();
  h.hi = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (!mask[k]) continue;
    h.lo = std::min({h.lo, a[k], b[k]});
    h.hi = std::max({h.hi, a[k], b[k]});
  }
  if (!std::isfinite(h.lo) || !std::isfinite(h.hi)) throw DataError("em_histogram: non-finite value");
  h.masses_a.assign(static_cast<std::size_t>(bins), 0.0);
  h.masses_b.assign(static_cast<std::size_t>(bins), 0.0);
  const double range = h.hi - h.lo;
  const double unit = 1.0 / static_cast<double>(mask.unknown_count());
  auto bin_of = [&](double v) {
    if (!(range > 0.0)) return 0;
    const int i = static_cast<int>(std::floor((v - h.lo) / range * bins));
    return std::clamp(i, 0, bins - 1);
  };
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (!mask[k]) continue;
    h.masses_a[static_cast<std::size_t>(bin_of(a[k]))] += unit;
    h.masses_b[static_cast<std::size_t>(bin_of(b[k]))] += unit;
  }
  return h;
}

double em_distance(std::span<const double> masses_a, std::span<const double> masses_b, double bin_width) {
  if (masses_a.size() != masses_b.size()) throw DataError("em_distance: histograms differ in length");
  double cdf_a = 0.0, cdf_b = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < masses_a.size(); ++i) {
    cdf_a += masses_a[i];
    cdf_b += masses_b[i];
    sum += std::abs(cdf_a - cdf_b);
  }
  return sum * bin_width;
}

double em_histogram(const DemGrid& pred, const DemGrid& truth, const VoidMask& mask, int bins) {
  const HistogramPair h = intensity_histograms(pred, truth, mask, bins);
  if (!(h.hi > h.lo)) return 0.0;
  return em_distance(h.masses_a, h.masses_b, h.bin_width());
}

}  // namespace demfill
