#include "demfill/neural/attention.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "demfill/error.hpp"

namespace demfill::neural {

VoidMask downsample_mask(const VoidMask& mask, int out_rows, int out_cols) {
  const int bh = (mask.rows() + out_rows - 1) / out_rows;
  const int bw = (mask.cols() + out_cols - 1) / out_cols;
  VoidMask out(out_rows, out_cols);
  for (int i = 0; i < mask.rows(); ++i)
    for (int j = 0; j < mask.cols(); ++j)
      if (mask.unknown(i, j)) out.set(std::min(i / bh, out_rows - 1), std::min(j / bw, out_cols - 1), true);
  return out;
}

namespace {

constexpr double kNormFloor = 1e-4;

}  // namespace

template <typename T>
AttentionResult<T> contextual_attention(const Tensor<T>& fg, const Tensor<T>& bg,
                                        const VoidMask& mask, double lambda, int patch) {
  if (!fg.same_shape(bg)) throw DataError("contextual_attention: fg and bg differ in shape");
  if (mask.rows() != fg.height() || mask.cols() != fg.width()) {
    throw DataError("contextual_attention: mask is not at feature resolution");
  }
  if (patch < 1 || patch % 2 == 0) throw DataError("contextual_attention: patch must be odd");

  const int h = fg.height(), w = fg.width(), ch = fg.channels();
  const int r = patch / 2;
  const std::size_t patch_len = static_cast<std::size_t>(ch) * patch * patch;

  std::vector<int> centres;
  for (int y = r; y + r < h; ++y) {
    for (int x = r; x + r < w; ++x) {
      bool ok = true;
      for (int dy = -r; dy <= r && ok; ++dy)
        for (int dx = -r; dx <= r && ok; ++dx) ok = mask.known(y + dy, x + dx);
      if (ok) centres.push_back(y * w + x);
    }
  }
  if (centres.empty()) throw DataError("contextual_attention: attention source empty");
  const int np = static_cast<int>(centres.size());

  AttentionResult<T> result;
  result.output = Tensor<T>(fg.batch(), ch, h, w);
  result.locations = h * w;
  result.patches = np;
  result.weights.assign(static_cast<std::size_t>(h) * w * np, 0.0);

  // Number of windows covering each pixel.
  std::vector<double> coverage(static_cast<std::size_t>(h) * w, 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int rows = std::min(h - 1, y + r) - std::max(0, y - r) + 1;
      const int cols = std::min(w - 1, x + r) - std::max(0, x - r) + 1;
      coverage[static_cast<std::size_t>(y) * w + x] = static_cast<double>(rows * cols);
    }

  std::vector<double> bank(patch_len * np);
  std::vector<double> bank_norm(np);
  std::vector<double> fpatch(patch_len);
  std::vector<double> scores(np);
  std::vector<double> blended(patch_len);
  std::vector<double> acc(static_cast<std::size_t>(ch) * h * w);

  for (int n = 0; n < fg.batch(); ++n) {
    for (int p = 0; p < np; ++p) {
      const int cy = centres[p] / w, cx = centres[p] % w;
      double sq = 0.0;
      std::size_t k = 0;
      for (int c = 0; c < ch; ++c)
        for (int dy = -r; dy <= r; ++dy)
          for (int dx = -r; dx <= r; ++dx, ++k) {
            const double v = bg(n, c, cy + dy, cx + dx);
            bank[p * patch_len + k] = v;
            sq += v * v;
          }
      bank_norm[p] = std::max(std::sqrt(sq), kNormFloor);
    }

    std::fill(acc.begin(), acc.end(), 0.0);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double sq = 0.0;
        std::size_t k = 0;
        for (int c = 0; c < ch; ++c)
          for (int dy = -r; dy <= r; ++dy)
            for (int dx = -r; dx <= r; ++dx, ++k) {
              const int yy = y + dy, xx = x + dx;
              const double v = (yy >= 0 && yy < h && xx >= 0 && xx < w) ? fg(n, c, yy, xx) : 0.0;
              fpatch[k] = v;
              sq += v * v;
            }
        const double fnorm = std::max(std::sqrt(sq), kNormFloor);

        double best = -std::numeric_limits<double>::infinity();
        for (int p = 0; p < np; ++p) {
          const double* b = bank.data() + p * patch_len;
          double dot = 0.0;
          for (std::size_t i = 0; i < patch_len; ++i) dot += fpatch[i] * b[i];
          scores[p] = lambda * dot / (fnorm * bank_norm[p]);
          best = std::max(best, scores[p]);
        }
        double total = 0.0;
        for (int p = 0; p < np; ++p) {
          scores[p] = std::exp(scores[p] - best);
          total += scores[p];
        }
        std::fill(blended.begin(), blended.end(), 0.0);
        for (int p = 0; p < np; ++p) {
          scores[p] /= total;
          const double* b = bank.data() + p * patch_len;
          for (std::size_t i = 0; i < patch_len; ++i) blended[i] += scores[p] * b[i];
        }
        if (n == 0) {
          std::copy(scores.begin(), scores.end(),
                    result.weights.begin() + (static_cast<std::size_t>(y) * w + x) * np);
        }

        k = 0;
        for (int c = 0; c < ch; ++c)
          for (int dy = -r; dy <= r; ++dy)
            for (int dx = -r; dx <= r; ++dx, ++k) {
              const int yy = y + dy, xx = x + dx;
              if (yy < 0 || yy >= h || xx < 0 || xx >= w) continue;
              acc[(static_cast<std::size_t>(c) * h + yy) * w + xx] += blended[k];
            }
      }
    }

    for (int c = 0; c < ch; ++c)
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          result.output(n, c, y, x) = static_cast<T>(
              acc[(static_cast<std::size_t>(c) * h + y) * w + x] / coverage[static_cast<std::size_t>(y) * w + x]);
  }
  return result;
}

template AttentionResult<float> contextual_attention<float>(const Tensor<float>&,
                                                            const Tensor<float>&,
                                                            const VoidMask&, double, int);
template AttentionResult<double> contextual_attention<double>(const Tensor<double>&,
                                                              const Tensor<double>&,
                                                              const VoidMask&, double, int);

}  // namespace demfill::neural
