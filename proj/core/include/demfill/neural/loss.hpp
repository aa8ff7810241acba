#pragma once

#include <vector>

#include "demfill/raster.hpp"

namespace demfill::neural {

struct LossConfig {
  double discount_gamma = 0.99;  ///< in (0, 1]
  double gp_lambda = 10.0;
};

/// Per-pixel weights gamma^(k-1) for unknown pixels of ring k, 0 on known
/// pixels. Row-major, same size as the mask.
std::vector<double> discount_weights(const VoidMask& mask, double gamma);

/// Discount-weighted mean absolute error over unknown pixels. Throws
/// DataError on an empty mask or a gamma outside (0, 1].
double loss_l1_discounted(const DemGrid& pred, const DemGrid& truth, const VoidMask& mask, double gamma);

}  // namespace demfill::neural
