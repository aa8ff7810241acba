#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "demfill/raster.hpp"

namespace demfill {

/// Unknown pixels grouped by city-block distance to the nearest known pixel.
///
/// rings()[k - 1] holds the pixels at distance k, in row-major order.
/// distance() is 0 for known pixels.
class RingPartition {
 public:
  RingPartition() = default;
  RingPartition(int rows, int cols, std::vector<std::vector<Pixel>> rings,
                std::vector<int> distance);

  int ring_count() const noexcept { return static_cast<int>(rings_.size()); }
  std::span<const Pixel> ring(int k) const { return rings_.at(static_cast<std::size_t>(k - 1)); }
  const std::vector<std::vector<Pixel>>& rings() const noexcept { return rings_; }

  int distance(int row, int col) const {
    return distance_[static_cast<std::size_t>(row) * static_cast<std::size_t>(cols_) +
                     static_cast<std::size_t>(col)];
  }
  std::span<const int> distances() const noexcept { return distance_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::vector<Pixel>> rings_;
  std::vector<int> distance_;
};

/// Multi-source BFS over 4-neighbourhoods seeded at every known pixel.
/// An all-known mask gives an empty partition; an all-unknown mask throws
/// DataError.
RingPartition ring_partition(const VoidMask& mask);

/// A known height at window-local offset (u, v) = (row - p.row, col - p.col).
struct Sample {
  int u = 0;
  int v = 0;
  double value = 0.0;
};

using SampleSet = std::vector<Sample>;

/// Known pixels of the (2r+1) x (2r+1) window centred at p, clipped to the
/// grid, in row-major order.
SampleSet known_window(const DemGrid& grid, const VoidMask& mask, Pixel p, int radius);

struct RectMaskParams {
  int count = 1;
  int min_side = 1;
  int max_side = 1;
};

/// Union of `count` axis-aligned rectangles with independent side lengths
/// uniform in [min_side, max_side] and uniform positions. Resamples (bounded)
/// until at least one pixel stays known. Deterministic for a fixed seed.
VoidMask sample_rect_mask(int rows, int cols, std::uint64_t seed, const RectMaskParams& params);

enum class TerrainKind { quadratic, gaussian_hills, fractal };

/// Coefficients of A*i^2 + B*i*j + C*j^2 + D*i + E*j + F in global pixel
/// coordinates.
struct QuadraticCoeffs {
  double a = 0, b = 0, c = 0, d = 0, e = 0, f = 0;
};

QuadraticCoeffs random_quadratic(std::uint64_t seed);
DemGrid synth_quadratic(int rows, int cols, const QuadraticCoeffs& q);

/// Synthetic terrain. Requires rows, cols >= 8.
DemGrid synth_terrain(int rows, int cols, std::uint64_t seed, TerrainKind kind);

TerrainKind parse_terrain_kind(std::string_view name);
std::string_view to_string(TerrainKind kind) noexcept;

}  // namespace demfill
