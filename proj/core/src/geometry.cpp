#include "demfill/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <string>

#include "demfill/error.hpp"

namespace demfill {

RingPartition::RingPartition(int rows, int cols, std::vector<std::vector<Pixel>> rings,
                             std::vector<int> distance)
    : rows_(rows), cols_(cols), rings_(std::move(rings)), distance_(std::move(distance)) {}

RingPartition ring_partition(const VoidMask& mask) {
  const int rows = mask.rows();
  const int cols = mask.cols();
  const std::size_t unknown = mask.unknown_count();
  if (unknown == mask.size()) {
    throw DataError("ring_partition: no known pixel to seed the distance transform");
  }

  std::vector<int> dist(mask.size(), -1);
  std::deque<Pixel> queue;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      if (mask.known(i, j)) {
        dist[mask.index(i, j)] = 0;
        queue.push_back({i, j});
      }
    }
  }

  int max_dist = 0;
  constexpr int kDi[] = {-1, 1, 0, 0};
  constexpr int kDj[] = {0, 0, -1, 1};
  while (!queue.empty() && unknown > 0) {
    const Pixel p = queue.front();
    queue.pop_front();
    const int d = dist[mask.index(p.row, p.col)];
    for (int n = 0; n < 4; ++n) {
      const int i = p.row + kDi[n];
      const int j = p.col + kDj[n];
      if (!mask.contains(i, j)) continue;
      int& slot = dist[mask.index(i, j)];
      if (slot >= 0) continue;
      slot = d + 1;
      max_dist = std::max(max_dist, slot);
      queue.push_back({i, j});
    }
  }

  std::vector<std::vector<Pixel>> rings(static_cast<std::size_t>(max_dist));
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const int d = dist[mask.index(i, j)];
      if (d > 0) rings[static_cast<std::size_t>(d - 1)].push_back({i, j});
    }
  }
  return RingPartition(rows, cols, std::move(rings), std::move(dist));
}

SampleSet known_window(const DemGrid& grid, const VoidMask& mask, Pixel p, int radius) {
  SampleSet out;
  const int i0 = std::max(0, p.row - radius);
  const int i1 = std::min(grid.rows() - 1, p.row + radius);
  const int j0 = std::max(0, p.col - radius);
  const int j1 = std::min(grid.cols() - 1, p.col + radius);
  for (int i = i0; i <= i1; ++i) {
    for (int j = j0; j <= j1; ++j) {
      if (mask.known(i, j)) out.push_back({i - p.row, j - p.col, grid(i, j)});
    }
  }
  return out;
}

VoidMask sample_rect_mask(int rows, int cols, std::uint64_t seed, const RectMaskParams& params) {
  if (rows < 1 || cols < 1) throw DataError("sample_rect_mask: empty grid");
  if (params.count < 0) throw DataError("sample_rect_mask: negative rectangle count");
  if (params.count == 0) return VoidMask(rows, cols);
  if (params.min_side < 1 || params.min_side > params.max_side ||
      params.max_side > std::min(rows, cols)) {
    throw DataError("sample_rect_mask: side range [" + std::to_string(params.min_side) + ", " +
                    std::to_string(params.max_side) + "] admits no placement in a " +
                    std::to_string(rows) + "x" + std::to_string(cols) + " grid");
  }

  constexpr int kMaxAttempts = 100;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> side(params.min_side, params.max_side);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    VoidMask mask(rows, cols);
    for (int n = 0; n < params.count; ++n) {
      const int h = side(rng);
      const int w = side(rng);
      const int top = std::uniform_int_distribution<int>(0, rows - h)(rng);
      const int left = std::uniform_int_distribution<int>(0, cols - w)(rng);
      for (int i = top; i < top + h; ++i)
        for (int j = left; j < left + w; ++j) mask.set(i, j, true);
    }
    if (mask.known_count() > 0) return mask;
  }
  throw DataError("sample_rect_mask: every sampled mask covered the whole grid");
}

QuadraticCoeffs random_quadratic(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> curvature(-0.05, 0.05);
  std::uniform_real_distribution<double> slope(-2.0, 2.0);
  std::uniform_real_distribution<double> offset(0.0, 500.0);
  QuadraticCoeffs q;
  q.a = curvature(rng);
  q.b = curvature(rng);
  q.c = curvature(rng);
  q.d = slope(rng);
  q.e = slope(rng);
  q.f = offset(rng);
  return q;
}

DemGrid synth_quadratic(int rows, int cols, const QuadraticCoeffs& q) {
  DemGrid g(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const double x = i;
      const double y = j;
      g(i, j) = q.a * x * x + q.b * x * y + q.c * y * y + q.d * x + q.e * y + q.f;
    }
  }
  return g;
}

namespace {

DemGrid gaussian_hills(int rows, int cols, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(3, 8);
  std::uniform_real_distribution<double> ci(0.0, rows - 1.0);
  std::uniform_real_distribution<double> cj(0.0, cols - 1.0);
  std::uniform_real_distribution<double> amp(-40.0, 80.0);
  const double scale = std::min(rows, cols);
  std::uniform_real_distribution<double> sigma(0.08 * scale, 0.35 * scale);
  std::uniform_real_distribution<double> base(50.0, 300.0);

  DemGrid g(rows, cols, base(rng));
  const int k = count(rng);
  for (int n = 0; n < k; ++n) {
    const double mi = ci(rng), mj = cj(rng), a = amp(rng), s = sigma(rng);
    const double inv = 1.0 / (2.0 * s * s);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        const double di = i - mi, dj = j - mj;
        g(i, j) += a * std::exp(-(di * di + dj * dj) * inv);
      }
    }
  }
  return g;
}

// Diamond-square on the smallest 2^n + 1 square covering the grid, cropped.
DemGrid fractal(int rows, int cols, std::mt19937_64& rng) {
  int n = 1;
  while (n + 1 < std::max(rows, cols)) n *= 2;
  const int size = n + 1;
  std::vector<double> h(static_cast<std::size_t>(size) * size, 0.0);
  auto at = [&](int i, int j) -> double& {
    return h[static_cast<std::size_t>(i) * size + static_cast<std::size_t>(j)];
  };
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double base = 200.0;
  double amplitude = 60.0;
  at(0, 0) = base + amplitude * unit(rng);
  at(0, n) = base + amplitude * unit(rng);
  at(n, 0) = base + amplitude * unit(rng);
  at(n, n) = base + amplitude * unit(rng);

  for (int step = n; step > 1; step /= 2) {
    const int half = step / 2;
    for (int i = half; i < size; i += step) {
      for (int j = half; j < size; j += step) {
        const double avg = 0.25 * (at(i - half, j - half) + at(i - half, j + half) +
                                   at(i + half, j - half) + at(i + half, j + half));
        at(i, j) = avg + amplitude * unit(rng);
      }
    }
    for (int i = 0; i < size; i += half) {
      for (int j = (i / half % 2 == 0) ? half : 0; j < size; j += step) {
        double sum = 0.0;
        int cnt = 0;
        if (i - half >= 0) sum += at(i - half, j), ++cnt;
        if (i + half < size) sum += at(i + half, j), ++cnt;
        if (j - half >= 0) sum += at(i, j - half), ++cnt;
        if (j + half < size) sum += at(i, j + half), ++cnt;
        at(i, j) = sum / cnt + amplitude * unit(rng);
      }
    }
    amplitude *= 0.55;
  }

  DemGrid g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = at(i, j);
  return g;
}

}  // namespace

DemGrid synth_terrain(int rows, int cols, std::uint64_t seed, TerrainKind kind) {
  if (rows < 8 || cols < 8) throw DataError("synth_terrain: rows and cols must be >= 8");
  std::mt19937_64 rng(seed);
  switch (kind) {
    case TerrainKind::quadratic:
      return synth_quadratic(rows, cols, random_quadratic(seed));
    case TerrainKind::gaussian_hills:
      return gaussian_hills(rows, cols, rng);
    case TerrainKind::fractal:
      return fractal(rows, cols, rng);
  }
  throw DataError("synth_terrain: unknown terrain kind");
}

TerrainKind parse_terrain_kind(std::string_view name) {
  if (name == "quadratic") return TerrainKind::quadratic;
  if (name == "gaussian_hills" || name == "hills") return TerrainKind::gaussian_hills;
  if (name == "fractal") return TerrainKind::fractal;
  throw DataError("unknown terrain kind '" + std::string(name) + "'");
}

std::string_view to_string(TerrainKind kind) noexcept {
  switch (kind) {
    case TerrainKind::quadratic: return "quadratic";
    case TerrainKind::gaussian_hills: return "gaussian_hills";
    case TerrainKind::fractal: return "fractal";
  }
  return "unknown";
}

}  // namespace demfill
