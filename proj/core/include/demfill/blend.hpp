#pragma once

#include <functional>

#include "demfill/raster.hpp"

namespace demfill {

struct BlendConfig {
  int width = 8;                  ///< number of rings blended
  int fit_radius = 3;             ///< paraboloid window radius
  double sigmoid_steepness = 10;  ///< logistic slope of the blend weight
};

/// Logistic curve rescaled to a strictly increasing bijection of [0, 1]:
/// (sigma(s (t - 1/2)) - sigma(-s/2)) / (sigma(s/2) - sigma(-s/2)).
double blend_weight(double t, double steepness);

/// Blends the ring-wise paraboloid extension of `known` into the complete
/// fill `filled` over the first `cfg.width` rings. Ring k gets
/// (1 - a_k) e + a_k filled with a_k = blend_weight((k - 1) / width); the pure
/// extension value e is what later rings fit against. Known pixels keep the
/// values of `known`.
DemGrid blend_boundary(const DemGrid& known, const DemGrid& filled, const VoidMask& mask,
                       const BlendConfig& cfg = {});

/// Produces a complete grid from a partial one.
using Filler = std::function<DemGrid(const DemGrid&, const VoidMask&)>;

/// Runs the filler, then blend_boundary.
DemGrid fill_and_blend(const DemGrid& known, const VoidMask& mask, const Filler& filler,
                       const BlendConfig& cfg = {});

}  // namespace demfill
