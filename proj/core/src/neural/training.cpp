#include "demfill/neural/training.hpp"

#include <algorithm>
#include <cmath>

#include "demfill/error.hpp"
#include "demfill/geometry.hpp"
#include "demfill/neural/generator.hpp"
#include "demfill/neural/loss.hpp"
#include "demfill/neural/stack.hpp"

namespace demfill::neural {

namespace {

struct Prepared {
  Tensor4 input;
  std::vector<double> truth;   // normalized, padded layout
  std::vector<double> weight;  // discount / total, padded layout
};

Prepared prepare(const TrainingSample& s, int multiple, double gamma) {
  require_same_shape(s.terrain, s.mask, "train_coarse");
  const NormalizedGrid ng = normalize(s.terrain, s.mask);
  Prepared p;
  p.input = make_input(ng.grid, s.mask, multiple);
  const int h = p.input.height(), w = p.input.width();
  p.truth.assign(static_cast<std::size_t>(h) * w, 0.0);
  p.weight.assign(p.truth.size(), 0.0);
  const std::vector<double> dw = discount_weights(s.mask, gamma);
  double total = 0.0;
  for (double v : dw) total += v;
  for (int i = 0; i < s.mask.rows(); ++i) {
    for (int j = 0; j < s.mask.cols(); ++j) {
      const std::size_t src = static_cast<std::size_t>(i) * s.mask.cols() + j;
      const std::size_t dst = static_cast<std::size_t>(i) * w + j;
      p.truth[dst] = ng.norm.normalize(s.terrain(i, j));
      p.weight[dst] = dw[src] / total;
    }
  }
  return p;
}

double loss_of(const Tensor4& out, const Prepared& p) {
  double loss = 0.0;
  const auto o = out.data();
  for (std::size_t k = 0; k < p.weight.size(); ++k) {
    if (p.weight[k] != 0.0) loss += p.weight[k] * std::abs(static_cast<double>(o[k]) - p.truth[k]);
  }
  return loss;
}

Tensor4 loss_gradient(const Tensor4& out, const Prepared& p) {
  Tensor4 g(out.batch(), out.channels(), out.height(), out.width());
  const auto o = out.data();
  auto gd = g.data();
  for (std::size_t k = 0; k < p.weight.size(); ++k) {
    if (p.weight[k] == 0.0) continue;
    const double d = static_cast<double>(o[k]) - p.truth[k];
    gd[k] = static_cast<float>(d > 0.0 ? p.weight[k] : (d < 0.0 ? -p.weight[k] : 0.0));
  }
  return g;
}

double dataset_loss(Stack<float>& net, const std::vector<Prepared>& data) {
  double sum = 0.0;
  for (const Prepared& p : data) sum += loss_of(net.forward(p.input), p);
  return sum / static_cast<double>(data.size());
}

}  // namespace

TrainResult train_coarse(std::span<const TrainingSample> data, const NetworkSpec& spec,
                         const TrainOptions& options) {
  return train_coarse(data, spec, init_weights(parameter_slots(spec), options.seed), options);
}

TrainResult train_coarse(std::span<const TrainingSample> data, const NetworkSpec& spec,
                         WeightStore initial, const TrainOptions& options) {
  if (data.empty()) throw DataError("train_coarse: empty dataset");
  if (options.steps < 0) throw DataError("train_coarse: negative step count");
  const AdamParams& adam = options.adam;
  if (!(adam.learning_rate >= 0.0) || !(adam.beta1 >= 0.0 && adam.beta1 < 1.0) ||
      !(adam.beta2 >= 0.0 && adam.beta2 < 1.0) || !(adam.epsilon > 0.0)) {
    throw DataError("train_coarse: invalid Adam parameters");
  }
  check_weights(initial, parameter_slots(spec));

  const int multiple = required_multiple(spec);
  std::vector<Prepared> prepared;
  prepared.reserve(data.size());
  for (const TrainingSample& s : data) prepared.push_back(prepare(s, multiple, options.discount_gamma));

  Stack<float> net(spec.coarse, "coarse", initial);
  if (!net.differentiable()) throw DataError("train_coarse: coarse stage is not differentiable");

  std::vector<std::vector<double>> m, v;
  for (const auto& p : net.params()) {
    m.emplace_back(p.value.size(), 0.0);
    v.emplace_back(p.value.size(), 0.0);
  }

  TrainResult result;
  result.initial_mean_loss = dataset_loss(net, prepared);
  result.loss_trace.reserve(static_cast<std::size_t>(options.steps));

  double b1t = 1.0, b2t = 1.0;
  for (int step = 0; step < options.steps; ++step) {
    const Prepared& p = prepared[static_cast<std::size_t>(step) % prepared.size()];
    const Tensor4 out = net.forward(p.input);
    const double loss = loss_of(out, p);
    if (!std::isfinite(loss)) {
      throw NumericalError("train_coarse: non-finite loss at step " + std::to_string(step + 1));
    }
    result.loss_trace.push_back(loss);
    net.zero_grad();
    net.backward(loss_gradient(out, p));

    b1t *= adam.beta1;
    b2t *= adam.beta2;
    auto& params = net.params();
    for (std::size_t i = 0; i < params.size(); ++i) {
      auto& value = params[i].value;
      const auto& grad = params[i].grad;
      for (std::size_t k = 0; k < value.size(); ++k) {
        const double g = grad[k];
        m[i][k] = adam.beta1 * m[i][k] + (1.0 - adam.beta1) * g;
        v[i][k] = adam.beta2 * v[i][k] + (1.0 - adam.beta2) * g * g;
        const double mhat = m[i][k] / (1.0 - b1t);
        const double vhat = v[i][k] / (1.0 - b2t);
        value[k] = static_cast<float>(value[k] - adam.learning_rate * mhat / (std::sqrt(vhat) + adam.epsilon));
      }
    }
    if (options.on_step) options.on_step(step + 1, loss);
  }

  result.final_mean_loss = dataset_loss(net, prepared);
  if (!std::isfinite(result.final_mean_loss)) {
    throw NumericalError("train_coarse: non-finite loss after step " + std::to_string(options.steps));
  }
  result.weights = std::move(initial);
  net.export_to(result.weights);
  return result;
}

std::vector<TrainingSample> synth_training_set(int count, int size, std::uint64_t seed) {
  if (count < 1) throw DataError("synth_training_set: count must be >= 1");
  const int lo = std::max(2, size / 8);
  const int hi = std::max(lo, size / 3);
  std::vector<TrainingSample> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(i);
    const TerrainKind kind = i % 2 == 0 ? TerrainKind::gaussian_hills : TerrainKind::fractal;
    out.push_back({synth_terrain(size, size, s, kind),
                   sample_rect_mask(size, size, s ^ 0x5eedULL, {2, lo, hi})});
  }
  return out;
}

}  // namespace demfill::neural
