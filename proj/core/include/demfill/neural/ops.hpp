#pragma once

#include <span>
#include <vector>

#include "demfill/neural/tensor.hpp"

namespace demfill::neural {

/// Shape of a 2-D convolution with "same" zero padding: the output has
/// ceil(in / stride) pixels per axis and the padding total is split with the
/// smaller half before.
struct ConvShape {
  int in_channels = 1;
  int out_channels = 1;
  int kernel = 3;
  int stride = 1;
  int dilation = 1;

  std::size_t weight_count() const noexcept {
    return static_cast<std::size_t>(out_channels) * in_channels * kernel * kernel;
  }
};

int same_output_size(int in, int stride) noexcept;
int same_pad_before(int in, int kernel, int stride, int dilation) noexcept;

/// Cross-correlation with weights laid out [out][in][ky][kx]. Each output
/// element is reduced in double, in a fixed order.
template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, std::span<const T> weight, std::span<const T> bias,
                 const ConvShape& shape);

template <typename T>
struct ConvGrads {
  Tensor<T> input;
  std::vector<T> weight;
  std::vector<T> bias;
};

template <typename T>
ConvGrads<T> conv2d_backward(const Tensor<T>& x, std::span<const T> weight,
                             const Tensor<T>& grad_out, const ConvShape& shape);

template <typename T>
Tensor<T> elu(const Tensor<T>& x);
/// Takes the forward output y: d elu / dx = 1 for y > 0, else y + 1.
template <typename T>
Tensor<T> elu_backward(const Tensor<T>& y, const Tensor<T>& grad_out);

template <typename T>
Tensor<T> tanh(const Tensor<T>& x);
template <typename T>
Tensor<T> tanh_backward(const Tensor<T>& y, const Tensor<T>& grad_out);

template <typename T>
Tensor<T> upsample_nearest(const Tensor<T>& x, int factor);
template <typename T>
Tensor<T> upsample_nearest_backward(const Tensor<T>& grad_out, int factor);

template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b);

}  // namespace demfill::neural
