#include <algorithm>
#include <cmath>
#include <utility>

#include "demfill/error.hpp"
#include "demfill/neural/ops.hpp"

namespace demfill::neural {

int same_output_size(int in, int stride) noexcept { return (in + stride - 1) / stride; }

int same_pad_before(int in, int kernel, int stride, int dilation) noexcept {
  const int out = same_output_size(in, stride);
  const int total = std::max((out - 1) * stride + dilation * (kernel - 1) + 1 - in, 0);
  return total / 2;
}

namespace {

// Output indices o in [0, out_size) with 0 <= o * stride + offset < in_size.
std::pair<int, int> valid_range(int offset, int in_size, int out_size, int stride) {
  const int lo = offset >= 0 ? 0 : (-offset + stride - 1) / stride;
  const int last = in_size - 1 - offset;
  const int hi = last < 0 ? -1 : std::min(out_size - 1, last / stride);
  return {lo, hi};
}

template <typename T>
void check_conv(const Tensor<T>& x, std::span<const T> weight, const ConvShape& s) {
  if (x.channels() != s.in_channels) {
    throw DataError("conv2d: input has " + std::to_string(x.channels()) +
                    " channels, layer expects " + std::to_string(s.in_channels));
  }
  if (weight.size() != s.weight_count()) throw DataError("conv2d: weight size mismatch");
  if (s.kernel < 1 || s.stride < 1 || s.dilation < 1) throw DataError("conv2d: bad geometry");
}

}  // namespace

template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, std::span<const T> weight, std::span<const T> bias,
                 const ConvShape& s) {
  check_conv(x, weight, s);
  if (!bias.empty() && bias.size() != static_cast<std::size_t>(s.out_channels)) {
    throw DataError("conv2d: bias size mismatch");
  }
  const int h = x.height(), w = x.width();
  const int ho = same_output_size(h, s.stride), wo = same_output_size(w, s.stride);
  const int pt = same_pad_before(h, s.kernel, s.stride, s.dilation);
  const int pl = same_pad_before(w, s.kernel, s.stride, s.dilation);
  const int k = s.kernel;

  Tensor<T> out(x.batch(), s.out_channels, ho, wo);
  std::vector<double> acc(static_cast<std::size_t>(ho) * wo);
  for (int n = 0; n < x.batch(); ++n) {
    for (int oc = 0; oc < s.out_channels; ++oc) {
      std::fill(acc.begin(), acc.end(), bias.empty() ? 0.0 : static_cast<double>(bias[oc]));
      for (int ic = 0; ic < s.in_channels; ++ic) {
        const T* in = x.plane(n, ic);
        for (int ky = 0; ky < k; ++ky) {
          const int dy = ky * s.dilation - pt;
          const auto [oy0, oy1] = valid_range(dy, h, ho, s.stride);
          for (int kx = 0; kx < k; ++kx) {
            const double wv = weight[((static_cast<std::size_t>(oc) * s.in_channels + ic) * k + ky) * k + kx];
            const int dx = kx * s.dilation - pl;
            const auto [ox0, ox1] = valid_range(dx, w, wo, s.stride);
            for (int oy = oy0; oy <= oy1; ++oy) {
              const T* row = in + static_cast<std::size_t>(oy * s.stride + dy) * w + dx;
              double* dst = acc.data() + static_cast<std::size_t>(oy) * wo;
              for (int ox = ox0; ox <= ox1; ++ox) dst[ox] += wv * static_cast<double>(row[ox * s.stride]);
            }
          }
        }
      }
      T* o = out.plane(n, oc);
      for (std::size_t i = 0; i < acc.size(); ++i) o[i] = static_cast<T>(acc[i]);
    }
  }
  return out;
}

template <typename T>
ConvGrads<T> conv2d_backward(const Tensor<T>& x, std::span<const T> weight,
                             const Tensor<T>& grad_out, const ConvShape& s) {
  check_conv(x, weight, s);
  const int h = x.height(), w = x.width();
  const int ho = same_output_size(h, s.stride), wo = same_output_size(w, s.stride);
  if (grad_out.batch() != x.batch() || grad_out.channels() != s.out_channels ||
      grad_out.height() != ho || grad_out.width() != wo) {
    throw DataError("conv2d_backward: gradient shape mismatch");
  }
  const int pt = same_pad_before(h, s.kernel, s.stride, s.dilation);
  const int pl = same_pad_before(w, s.kernel, s.stride, s.dilation);
  const int k = s.kernel;

  std::vector<double> gw(s.weight_count(), 0.0);
  std::vector<double> gb(static_cast<std::size_t>(s.out_channels), 0.0);
  ConvGrads<T> grads;
  grads.input = Tensor<T>(x.batch(), s.in_channels, h, w);
  std::vector<double> gin(static_cast<std::size_t>(h) * w);

  for (int n = 0; n < x.batch(); ++n) {
    for (int oc = 0; oc < s.out_channels; ++oc) {
      const T* g = grad_out.plane(n, oc);
      double sum = 0.0;
      for (std::size_t i = 0; i < grad_out.plane_size(); ++i) sum += static_cast<double>(g[i]);
      gb[oc] += sum;
      for (int ic = 0; ic < s.in_channels; ++ic) {
        const T* in = x.plane(n, ic);
        for (int ky = 0; ky < k; ++ky) {
          const int dy = ky * s.dilation - pt;
          const auto [oy0, oy1] = valid_range(dy, h, ho, s.stride);
          for (int kx = 0; kx < k; ++kx) {
            const int dx = kx * s.dilation - pl;
            const auto [ox0, ox1] = valid_range(dx, w, wo, s.stride);
            double acc = 0.0;
            for (int oy = oy0; oy <= oy1; ++oy) {
              const T* row = in + static_cast<std::size_t>(oy * s.stride + dy) * w + dx;
              const T* grow = g + static_cast<std::size_t>(oy) * wo;
              for (int ox = ox0; ox <= ox1; ++ox) {
                acc += static_cast<double>(grow[ox]) * static_cast<double>(row[ox * s.stride]);
              }
            }
            gw[((static_cast<std::size_t>(oc) * s.in_channels + ic) * k + ky) * k + kx] += acc;
          }
        }
      }
    }
    for (int ic = 0; ic < s.in_channels; ++ic) {
      std::fill(gin.begin(), gin.end(), 0.0);
      for (int oc = 0; oc < s.out_channels; ++oc) {
        const T* g = grad_out.plane(n, oc);
        for (int ky = 0; ky < k; ++ky) {
          const int dy = ky * s.dilation - pt;
          const auto [oy0, oy1] = valid_range(dy, h, ho, s.stride);
          for (int kx = 0; kx < k; ++kx) {
            const double wv = weight[((static_cast<std::size_t>(oc) * s.in_channels + ic) * k + ky) * k + kx];
            const int dx = kx * s.dilation - pl;
            const auto [ox0, ox1] = valid_range(dx, w, wo, s.stride);
            for (int oy = oy0; oy <= oy1; ++oy) {
              double* dst = gin.data() + static_cast<std::size_t>(oy * s.stride + dy) * w + dx;
              const T* grow = g + static_cast<std::size_t>(oy) * wo;
              for (int ox = ox0; ox <= ox1; ++ox) dst[ox * s.stride] += wv * static_cast<double>(grow[ox]);
            }
          }
        }
      }
      T* dst = grads.input.plane(n, ic);
      for (std::size_t i = 0; i < gin.size(); ++i) dst[i] = static_cast<T>(gin[i]);
    }
  }

  grads.weight.assign(gw.size(), T{0});
  for (std::size_t i = 0; i < gw.size(); ++i) grads.weight[i] = static_cast<T>(gw[i]);
  grads.bias.assign(gb.size(), T{0});
  for (std::size_t i = 0; i < gb.size(); ++i) grads.bias[i] = static_cast<T>(gb[i]);
  return grads;
}

template <typename T>
Tensor<T> elu(const Tensor<T>& x) {
  Tensor<T> y = x;
  for (T& v : y.data()) v = v > T{0} ? v : static_cast<T>(std::expm1(v));
  return y;
}

template <typename T>
Tensor<T> elu_backward(const Tensor<T>& y, const Tensor<T>& grad_out) {
  if (!y.same_shape(grad_out)) throw DataError("elu_backward: shape mismatch");
  Tensor<T> g = grad_out;
  auto yd = y.data();
  auto gd = g.data();
  for (std::size_t i = 0; i < gd.size(); ++i) {
    if (!(yd[i] > T{0})) gd[i] *= yd[i] + T{1};
  }
  return g;
}

template <typename T>
Tensor<T> tanh(const Tensor<T>& x) {
  Tensor<T> y = x;
  for (T& v : y.data()) v = std::tanh(v);
  return y;
}

template <typename T>
Tensor<T> tanh_backward(const Tensor<T>& y, const Tensor<T>& grad_out) {
  if (!y.same_shape(grad_out)) throw DataError("tanh_backward: shape mismatch");
  Tensor<T> g = grad_out;
  auto yd = y.data();
  auto gd = g.data();
  for (std::size_t i = 0; i < gd.size(); ++i) gd[i] *= T{1} - yd[i] * yd[i];
  return g;
}

template <typename T>
Tensor<T> upsample_nearest(const Tensor<T>& x, int factor) {
  if (factor < 1) throw DataError("upsample: factor must be >= 1");
  Tensor<T> y(x.batch(), x.channels(), x.height() * factor, x.width() * factor);
  for (int n = 0; n < x.batch(); ++n)
    for (int c = 0; c < x.channels(); ++c)
      for (int yy = 0; yy < y.height(); ++yy)
        for (int xx = 0; xx < y.width(); ++xx) y(n, c, yy, xx) = x(n, c, yy / factor, xx / factor);
  return y;
}

template <typename T>
Tensor<T> upsample_nearest_backward(const Tensor<T>& grad_out, int factor) {
  if (factor < 1 || grad_out.height() % factor || grad_out.width() % factor) {
    throw DataError("upsample_backward: gradient shape is not a multiple of the factor");
  }
  Tensor<T> g(grad_out.batch(), grad_out.channels(), grad_out.height() / factor,
              grad_out.width() / factor);
  for (int n = 0; n < g.batch(); ++n) {
    for (int c = 0; c < g.channels(); ++c) {
      for (int yy = 0; yy < g.height(); ++yy) {
        for (int xx = 0; xx < g.width(); ++xx) {
          double sum = 0.0;
          for (int a = 0; a < factor; ++a)
            for (int b = 0; b < factor; ++b) sum += grad_out(n, c, yy * factor + a, xx * factor + b);
          g(n, c, yy, xx) = static_cast<T>(sum);
        }
      }
    }
  }
  return g;
}

template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.batch() != b.batch() || a.height() != b.height() || a.width() != b.width()) {
    throw DataError("concat: spatial shapes differ");
  }
  Tensor<T> out(a.batch(), a.channels() + b.channels(), a.height(), a.width());
  for (int n = 0; n < a.batch(); ++n) {
    for (int c = 0; c < a.channels(); ++c)
      std::copy_n(a.plane(n, c), a.plane_size(), out.plane(n, c));
    for (int c = 0; c < b.channels(); ++c)
      std::copy_n(b.plane(n, c), b.plane_size(), out.plane(n, a.channels() + c));
  }
  return out;
}

#define DEMFILL_INSTANTIATE_OPS(T)                                                        \
  template Tensor<T> conv2d<T>(const Tensor<T>&, std::span<const T>, std::span<const T>,  \
                               const ConvShape&);                                         \
  template ConvGrads<T> conv2d_backward<T>(const Tensor<T>&, std::span<const T>,          \
                                           const Tensor<T>&, const ConvShape&);           \
  template Tensor<T> elu<T>(const Tensor<T>&);                                            \
  template Tensor<T> elu_backward<T>(const Tensor<T>&, const Tensor<T>&);                 \
  template Tensor<T> tanh<T>(const Tensor<T>&);                                           \
  template Tensor<T> tanh_backward<T>(const Tensor<T>&, const Tensor<T>&);                \
  template Tensor<T> upsample_nearest<T>(const Tensor<T>&, int);                          \
  template Tensor<T> upsample_nearest_backward<T>(const Tensor<T>&, int);                 \
  template Tensor<T> concat_channels<T>(const Tensor<T>&, const Tensor<T>&);

DEMFILL_INSTANTIATE_OPS(float)
DEMFILL_INSTANTIATE_OPS(double)

#undef DEMFILL_INSTANTIATE_OPS

}  // namespace demfill::neural
