#pragma once

#include "demfill/neural/network_spec.hpp"
#include "demfill/neural/tensor.hpp"
#include "demfill/neural/weights.hpp"
#include "demfill/raster.hpp"

namespace demfill::neural {

struct GeneratorOutput {
  DemGrid coarse;
  DemGrid refined;
};

/// Mask padded at the bottom and right to a multiple of `multiple`; padded
/// pixels are unknown.
VoidMask pad_mask(const VoidMask& mask, int multiple);

/// 1 x 2 x H' x W' network input: normalized heights (0 where unknown or
/// padded) and the mask channel (1 = unknown), padded to `multiple`.
Tensor4 make_input(const DemGrid& normalized, const VoidMask& mask, int multiple);

/// Coarse-to-fine fill. Both outputs carry the input's known pixels
/// bit-for-bit and denormalized network output in the hole.
GeneratorOutput generator_forward(const DemGrid& known, const VoidMask& mask, const NetworkSpec& spec,
                                  const WeightStore& weights);

}  // namespace demfill::neural
