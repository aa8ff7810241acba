#include "demfill/neural/critic.hpp"

#include <algorithm>
#include <cmath>

#include "demfill/error.hpp"
#include "demfill/neural/stack.hpp"

namespace demfill::neural {

namespace {

void grow_axis(int& lo, int& hi, int size, int multiple) {
  const int want = std::min(size, (hi - lo + multiple - 1) / multiple * multiple);
  const int extra = want - (hi - lo);
  lo -= extra / 2;
  hi += extra - extra / 2;
  if (lo < 0) {
    hi -= lo;
    lo = 0;
  }
  if (hi > size) {
    lo -= hi - size;
    hi = size;
  }
}

template <typename T>
void check_critic_input(const Critic& critic, const Tensor<T>& x) {
  if (x.channels() != 1) throw DataError("critic: input must have one channel");
  if (x.batch() < 1 || x.height() < 1 || x.width() < 1) throw DataError("critic: empty input");
  (void)critic;
}

double head_scale(const Critic& critic, const Tensor<double>& out) {
  return critic.spec.head == CriticHead::sum ? 1.0 : 1.0 / static_cast<double>(out.plane_size());
}

}  // namespace

CropBox local_crop_box(const VoidMask& mask, int multiple) {
  if (multiple < 1) throw DataError("local_crop_box: multiple must be >= 1");
  CropBox box{mask.rows(), mask.cols(), 0, 0};
  for (int i = 0; i < mask.rows(); ++i)
    for (int j = 0; j < mask.cols(); ++j)
      if (mask.unknown(i, j)) {
        box.row0 = std::min(box.row0, i);
        box.col0 = std::min(box.col0, j);
        box.row1 = std::max(box.row1, i + 1);
        box.col1 = std::max(box.col1, j + 1);
      }
  if (box.empty()) throw DataError("local_crop_box: bbox empty, no unknown pixels");
  grow_axis(box.row0, box.row1, mask.rows(), multiple);
  grow_axis(box.col0, box.col1, mask.cols(), multiple);
  return box;
}

template <typename T>
Tensor<T> crop(const Tensor<T>& x, const CropBox& box) {
  if (box.empty() || box.row0 < 0 || box.col0 < 0 || box.row1 > x.height() || box.col1 > x.width()) {
    throw DataError("crop: box empty or outside the tensor");
  }
  Tensor<T> out(x.batch(), x.channels(), box.rows(), box.cols());
  for (int n = 0; n < x.batch(); ++n)
    for (int c = 0; c < x.channels(); ++c)
      for (int i = 0; i < box.rows(); ++i)
        for (int j = 0; j < box.cols(); ++j) out(n, c, i, j) = x(n, c, box.row0 + i, box.col0 + j);
  return out;
}

template <typename T>
std::vector<double> critic_scores(const Critic& critic, const Tensor<T>& x) {
  check_critic_input(critic, x);
  Stack<double> net(critic.spec.layers, "critic", critic.weights);
  const Tensor<double> out = net.forward(tensor_cast<double>(x));
  if (out.channels() != 1) throw DataError("critic: non-scalar head");
  const double scale = head_scale(critic, out);
  std::vector<double> scores(static_cast<std::size_t>(out.batch()), 0.0);
  for (int n = 0; n < out.batch(); ++n) {
    const double* p = out.plane(n, 0);
    double s = 0.0;
    for (std::size_t k = 0; k < out.plane_size(); ++k) s += p[k];
    scores[static_cast<std::size_t>(n)] = s * scale;
  }
  return scores;
}

template <typename T>
Tensor<T> critic_input_gradient(const Critic& critic, const Tensor<T>& x) {
  check_critic_input(critic, x);
  Stack<double> net(critic.spec.layers, "critic", critic.weights);
  const Tensor<double> out = net.forward(tensor_cast<double>(x));
  if (out.channels() != 1) throw DataError("critic: non-scalar head");
  Tensor<double> seed(out.batch(), 1, out.height(), out.width(), head_scale(critic, out));
  return tensor_cast<T>(net.backward(seed));
}

template <typename T>
double wgan_gp_loss(const Critic& critic, const Tensor<T>& real, const Tensor<T>& fake,
                    std::span<const double> epsilon, double gp_lambda) {
  if (!real.same_shape(fake)) throw DataError("wgan_gp: real and fake differ in shape");
  if (epsilon.size() != static_cast<std::size_t>(real.batch())) {
    throw DataError("wgan_gp: need one epsilon per batch item");
  }
  const auto d_real = critic_scores(critic, real);
  const auto d_fake = critic_scores(critic, fake);

  Tensor<double> mix(real.batch(), real.channels(), real.height(), real.width());
  for (int n = 0; n < real.batch(); ++n) {
    const double e = epsilon[static_cast<std::size_t>(n)];
    const T* r = real.plane(n, 0);
    const T* f = fake.plane(n, 0);
    double* m = mix.plane(n, 0);
    for (std::size_t k = 0; k < real.plane_size(); ++k) {
      m[k] = e * static_cast<double>(r[k]) + (1.0 - e) * static_cast<double>(f[k]);
    }
  }
  const Tensor<double> grad = critic_input_gradient(critic, mix);

  double loss = 0.0;
  const double inv_n = 1.0 / static_cast<double>(real.batch());
  for (int n = 0; n < real.batch(); ++n) {
    const double* g = grad.plane(n, 0);
    double sq = 0.0;
    for (std::size_t k = 0; k < grad.plane_size(); ++k) sq += g[k] * g[k];
    const double dev = std::sqrt(sq) - 1.0;
    loss += inv_n * (d_fake[static_cast<std::size_t>(n)] - d_real[static_cast<std::size_t>(n)] +
                     gp_lambda * dev * dev);
  }
  return loss;
}

WganGpLoss wgan_gp_eval(const Tensor4& real, const Tensor4& fake, const Critic& global_critic,
                        const Critic& local_critic, const CropBox& box,
                        std::span<const double> epsilon, double gp_lambda) {
  if (box.empty()) throw DataError("wgan_gp: bbox empty");
  WganGpLoss out;
  out.global = wgan_gp_loss(global_critic, real, fake, epsilon, gp_lambda);
  out.local = wgan_gp_loss(local_critic, crop(real, box), crop(fake, box), epsilon, gp_lambda);
  return out;
}

#define DEMFILL_INSTANTIATE_CRITIC(T)                                                          \
  template Tensor<T> crop<T>(const Tensor<T>&, const CropBox&);                                \
  template std::vector<double> critic_scores<T>(const Critic&, const Tensor<T>&);              \
  template Tensor<T> critic_input_gradient<T>(const Critic&, const Tensor<T>&);                \
  template double wgan_gp_loss<T>(const Critic&, const Tensor<T>&, const Tensor<T>&,           \
                                  std::span<const double>, double);

DEMFILL_INSTANTIATE_CRITIC(float)
DEMFILL_INSTANTIATE_CRITIC(double)

}  // namespace demfill::neural
