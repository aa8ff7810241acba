#pragma once

#include <vector>

#include "demfill/neural/tensor.hpp"
#include "demfill/raster.hpp"

namespace demfill::neural {

/// Feature-resolution mask: a feature pixel is unknown when any input pixel
/// in its block is unknown. Blocks are ceil(rows / out_rows) tall and
/// ceil(cols / out_cols) wide.
VoidMask downsample_mask(const VoidMask& mask, int out_rows, int out_cols);

template <typename T>
struct AttentionResult {
  Tensor<T> output;
  /// Row-major [location][patch] softmax weights for batch item 0.
  std::vector<double> weights;
  int locations = 0;
  int patches = 0;
};

/// Contextual attention with `patch` x `patch` windows at stride 1.
///
/// Background patches are those lying inside the grid with every pixel known
/// in `mask`. Each foreground location (every pixel, zero-padded window) is
/// scored against every background patch by cosine similarity; the weights
/// are softmax(lambda * similarity). The output pastes the raw background
/// patches back with those weights and divides each pixel by the number of
/// windows covering it. Throws DataError when no background patch exists.
template <typename T>
AttentionResult<T> contextual_attention(const Tensor<T>& fg, const Tensor<T>& bg,
                                        const VoidMask& mask, double lambda, int patch = 3);

}  // namespace demfill::neural
