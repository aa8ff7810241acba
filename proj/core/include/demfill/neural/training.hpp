#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "demfill/neural/network_spec.hpp"
#include "demfill/neural/weights.hpp"
#include "demfill/raster.hpp"

namespace demfill::neural {

struct TrainingSample {
  DemGrid terrain;  ///< complete ground truth
  VoidMask mask;
};

struct AdamParams {
  double learning_rate = 1e-4;
  double beta1 = 0.5;
  double beta2 = 0.9;
  double epsilon = 1e-8;
};

struct TrainOptions {
  int steps = 500;
  std::uint64_t seed = 1;  ///< weight initialisation
  AdamParams adam{};
  double discount_gamma = 0.99;
  /// Called after every step with (step, loss); optional.
  std::function<void(int, double)> on_step;
};

struct TrainResult {
  WeightStore weights;             ///< full generator weights; only coarse.* trained
  std::vector<double> loss_trace;  ///< loss of the sample used at each step, before its update
  double initial_mean_loss = 0.0;  ///< dataset mean at the initial weights
  double final_mean_loss = 0.0;    ///< dataset mean at the returned weights
};

/// Trains the coarse stage with Adam on the discounted L1 loss, measured in
/// normalized height units. Step s uses sample s mod N. Deterministic for
/// fixed seed and data. Throws NumericalError (naming the step) on a
/// non-finite loss.
TrainResult train_coarse(std::span<const TrainingSample> data, const NetworkSpec& spec,
                         const TrainOptions& options);

/// As above, starting from given weights instead of a seeded initialisation.
TrainResult train_coarse(std::span<const TrainingSample> data, const NetworkSpec& spec,
                         WeightStore initial, const TrainOptions& options);

/// Deterministic synthetic tiles (cycling hills and fractal terrain) with
/// rectangular voids.
std::vector<TrainingSample> synth_training_set(int count, int size, std::uint64_t seed);

}  // namespace demfill::neural
