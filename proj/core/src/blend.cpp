#include "demfill/blend.hpp"

#include <algorithm>
#include <cmath>

#include "demfill/error.hpp"
#include "demfill/fillers.hpp"
#include "demfill/geometry.hpp"

namespace demfill {
namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void validate(const BlendConfig& cfg) {
  if (cfg.width < 1) throw DataError("blend: width must be >= 1");
  if (cfg.fit_radius < 1) throw DataError("blend: fit radius must be >= 1");
  if (!(cfg.sigmoid_steepness > 0.0)) throw DataError("blend: steepness must be > 0");
}

}  // namespace

double blend_weight(double t, double steepness) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double lo = logistic(-0.5 * steepness);
  const double hi = logistic(0.5 * steepness);
  return (logistic(steepness * (t - 0.5)) - lo) / (hi - lo);
}

DemGrid blend_boundary(const DemGrid& known, const DemGrid& filled, const VoidMask& mask,
                       const BlendConfig& cfg) {
  validate(cfg);
  require_same_shape(known, mask, "blend_boundary");
  require_same_shape(known, filled, "blend_boundary");
  for (double v : filled.values()) {
    if (!std::isfinite(v) || v == filled.nodata()) {
      throw DataError("blend_boundary: the fill still contains unknown values");
    }
  }

  const RingPartition rings = ring_partition(mask);
  DemGrid out = filled;
  out.copy_metadata(known);
  for (std::size_t k = 0; k < known.size(); ++k)
    if (!mask[k]) out[k] = known[k];

  // The extension evolves in its own state so each ring fits the pure
  // extension of the previous rings, never the blended values.
  DemGrid extension = known;
  VoidMask extension_mask = mask;
  const int band = std::min(cfg.width, rings.ring_count());
  for (int k = 1; k <= band; ++k) {
    const auto ring = rings.ring(k);
    const std::vector<double> values = extend_ring(extension, extension_mask, ring, cfg.fit_radius);
    const double alpha =
        blend_weight(static_cast<double>(k - 1) / cfg.width, cfg.sigmoid_steepness);
    for (std::size_t n = 0; n < ring.size(); ++n) {
      const Pixel p = ring[n];
      extension(p.row, p.col) = values[n];
      extension_mask.set(p.row, p.col, false);
      out(p.row, p.col) = (1.0 - alpha) * values[n] + alpha * filled(p.row, p.col);
    }
  }
  return out;
}

DemGrid fill_and_blend(const DemGrid& known, const VoidMask& mask, const Filler& filler,
                       const BlendConfig& cfg) {
  validate(cfg);
  const DemGrid filled = filler(known, mask);
  return blend_boundary(known, filled, mask, cfg);
}

}  // namespace demfill
