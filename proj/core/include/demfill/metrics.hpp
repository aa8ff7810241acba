#pragma once

#include <span>
#include <vector>

#include "demfill/raster.hpp"

namespace demfill {

inline constexpr int kDefaultHistogramBins = 256;

/// Mean squared error over unknown pixels. Throws DataError on an empty mask.
double mse(const DemGrid& pred, const DemGrid& truth, const VoidMask& mask);

/// Unit-mass histograms of the unknown-pixel values of two grids on the
/// shared range [lo, hi] of their union.
struct HistogramPair {
  int bins = kDefaultHistogramBins;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> masses_a;
  std::vector<double> masses_b;

  double bin_width() const noexcept { return (hi - lo) / bins; }
};

HistogramPair intensity_histograms(const DemGrid& a, const DemGrid& b, const VoidMask& mask,
                                   int bins = kDefaultHistogramBins);

/// 1-D Wasserstein-1 distance between binned distributions of equal length:
/// sum_i |CDF_a(i) - CDF_b(i)| * bin_width.
double em_distance(std::span<const double> masses_a, std::span<const double> masses_b, double bin_width);

/// EM distance of the unknown-pixel intensity histograms; 0 for a degenerate
/// range.
double em_histogram(const DemGrid& pred, const DemGrid& truth, const VoidMask& mask,
                    int bins = kDefaultHistogramBins);

}  // namespace demfill
