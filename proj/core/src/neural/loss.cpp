#include "demfill/neural/loss.hpp"

#include <cmath>

#include "demfill/error.hpp"
#include "demfill/geometry.hpp"

namespace demfill::neural {

std::vector<double> discount_weights(const VoidMask& mask, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw DataError("discount gamma must lie in (0, 1]");
  if (mask.unknown_count() == 0) throw DataError("loss: mask has no unknown pixels");
  const RingPartition rings = ring_partition(mask);
  std::vector<double> w(mask.size(), 0.0);
  for (int k = 1; k <= rings.ring_count(); ++k) {
    const double wk = std::pow(gamma, k - 1);
    for (const Pixel& p : rings.ring(k)) w[static_cast<std::size_t>(p.row) * mask.cols() + p.col] = wk;
  }
  return w;
}

double loss_l1_discounted(const DemGrid& pred, const DemGrid& truth, const VoidMask& mask, double gamma) {
  require_same_shape(pred, mask, "loss_l1_discounted");
  require_same_shape(truth, mask, "loss_l1_discounted");
  const std::vector<double> w = discount_weights(mask, gamma);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (w[k] == 0.0) continue;
    num += w[k] * std::abs(pred[k] - truth[k]);
    den += w[k];
  }
  return num / den;
}

}  // namespace demfill::neural
