#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "demfill/fillers.hpp"
#include "demfill/geometry.hpp"
#include "demfill/neural/ops.hpp"
#include "demfill/neural/tensor.hpp"
#include "demfill/raster.hpp"

// Slow, direct reference implementations used to check the library.
namespace demfill::oracle {

// Min L1 distance to a known pixel for every pixel (0 on known pixels).
std::vector<int> min_l1_labels(const VoidMask& mask);

// Least-squares coefficients (A..F) of Au^2+Buv+Cv^2+Du+Ev+F by pivoted QR.
std::array<double, 6> qr_paraboloid(std::span<const Sample> samples);

// Plain Shepard loop plus masked 3x3 mean passes.
DemGrid shepard_fill(const DemGrid& grid, const VoidMask& mask, const IdwParams& params);

// Bicubic clamped B-spline least squares solved densely.
DemGrid dense_spline_fill(const DemGrid& grid, const VoidMask& mask, int knot_spacing, double lambda);

// Optimal transport cost between two unit-mass histograms on bins spaced
// `width` apart, by successive shortest augmenting paths.
double transport_cost(std::span<const double> a, std::span<const double> b, double width);

// Six-loop cross-correlation with "same" zero padding.
neural::Tensor<double> conv2d(const neural::Tensor<double>& x, std::span<const double> weight,
                              std::span<const double> bias, const neural::ConvShape& shape);

struct Attention {
  neural::Tensor<double> output;
  std::vector<std::vector<double>> weights;  // [location][patch]
};

// Similarity, softmax and gather-style overlap average, all by direct loops.
Attention contextual_attention(const neural::Tensor<double>& fg, const neural::Tensor<double>& bg,
                               const VoidMask& mask, double lambda, int patch);

// Central differences of f at x with step h.
std::vector<double> central_diff(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> x, double h);

// |a - b| / max(|a|, |b|, floor).
double rel_err(double a, double b, double floor = 1e-8);

template <typename T>
neural::Tensor<T> random_tensor(int n, int c, int h, int w, std::mt19937_64& rng, double lo = -1.0,
                                double hi = 1.0) {
  neural::Tensor<T> t(n, c, h, w);
  std::uniform_real_distribution<double> d(lo, hi);
  for (auto& v : t.data()) v = static_cast<T>(d(rng));
  return t;
}

template <typename T>
std::vector<T> random_vector(std::size_t n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::vector<T> v(n);
  std::uniform_real_distribution<double> d(lo, hi);
  for (auto& x : v) x = static_cast<T>(d(rng));
  return v;
}

VoidMask random_mask(int rows, int cols, double p_unknown, std::mt19937_64& rng);

}  // namespace demfill::oracle
