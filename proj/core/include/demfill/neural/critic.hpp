#pragma once

#include <span>
#include <vector>

#include "demfill/neural/network_spec.hpp"
#include "demfill/neural/tensor.hpp"
#include "demfill/neural/weights.hpp"
#include "demfill/raster.hpp"

namespace demfill::neural {

struct Critic {
  CriticSpec spec;
  WeightStore weights;
};

/// Half-open pixel rectangle [row0, row1) x [col0, col1).
struct CropBox {
  int row0 = 0, col0 = 0, row1 = 0, col1 = 0;

  int rows() const noexcept { return row1 - row0; }
  int cols() const noexcept { return col1 - col0; }
  bool empty() const noexcept { return rows() <= 0 || cols() <= 0; }
  friend bool operator==(const CropBox&, const CropBox&) = default;
};

/// Tight bounding box of unknown pixels, grown to a multiple of `multiple`
/// per side (centred where room allows) and clamped to the grid. Throws
/// DataError when no pixel is unknown.
CropBox local_crop_box(const VoidMask& mask, int multiple = 8);

template <typename T>
Tensor<T> crop(const Tensor<T>& x, const CropBox& box);

/// Critic score of each batch item.
template <typename T>
std::vector<double> critic_scores(const Critic& critic, const Tensor<T>& x);

/// Gradient of each item's score with respect to its input.
template <typename T>
Tensor<T> critic_input_gradient(const Critic& critic, const Tensor<T>& x);

/// mean D(fake) - mean D(real) + gp_lambda * mean_n (|grad D(x_n)| - 1)^2 with
/// x_n = eps_n real_n + (1 - eps_n) fake_n. One epsilon per batch item.
template <typename T>
double wgan_gp_loss(const Critic& critic, const Tensor<T>& real, const Tensor<T>& fake,
                    std::span<const double> epsilon, double gp_lambda);

struct WganGpLoss {
  double global = 0.0;
  double local = 0.0;
};

/// Global loss on the full inputs and local loss on `box` crops.
WganGpLoss wgan_gp_eval(const Tensor4& real, const Tensor4& fake, const Critic& global_critic,
                        const Critic& local_critic, const CropBox& box,
                        std::span<const double> epsilon, double gp_lambda);

}  // namespace demfill::neural
