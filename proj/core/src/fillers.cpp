#include <algorithm>
#include <cmath>
#include <limits>

#include "demfill/error.hpp"
#include "demfill/fillers.hpp"

namespace demfill {

DemGrid fill_idw(const DemGrid& grid, const VoidMask& mask, const IdwParams& params) {
  require_same_shape(grid, mask, "fill_idw");
  if (!(params.power > 0.0)) throw DataError("fill_idw: power must be > 0");
  if (!(params.radius >= 1.0)) throw DataError("fill_idw: radius must be >= 1");
  if (params.smoothing_passes < 0) throw DataError("fill_idw: negative smoothing passes");
  if (mask.known_count() == 0) throw DataError("fill_idw: every pixel is unknown");

  std::vector<Pixel> known;
  known.reserve(mask.known_count());
  for (int i = 0; i < grid.rows(); ++i)
    for (int j = 0; j < grid.cols(); ++j)
      if (mask.known(i, j)) known.push_back({i, j});

  DemGrid out = grid;
  const int reach = static_cast<int>(std::floor(params.radius));
  const double radius_sq = params.radius * params.radius;
  const double half_power = 0.5 * params.power;

  for (int i = 0; i < grid.rows(); ++i) {
    for (int j = 0; j < grid.cols(); ++j) {
      if (mask.known(i, j)) continue;
      // Accumulate deviations from a reference height so constant neighbourhoods
      // reproduce exactly and large offsets do not cost precision.
      double weighted = 0.0;
      double total = 0.0;
      double ref = 0.0;
      bool have_ref = false;
      const int i0 = std::max(0, i - reach), i1 = std::min(grid.rows() - 1, i + reach);
      const int j0 = std::max(0, j - reach), j1 = std::min(grid.cols() - 1, j + reach);
      for (int qi = i0; qi <= i1; ++qi) {
        for (int qj = j0; qj <= j1; ++qj) {
          if (mask.unknown(qi, qj)) continue;
          const double di = qi - i, dj = qj - j;
          const double dist_sq = di * di + dj * dj;
          if (dist_sq > radius_sq) continue;
          if (!have_ref) {
            ref = grid(qi, qj);
            have_ref = true;
          }
          const double w = 1.0 / std::pow(dist_sq, half_power);
          weighted += w * (grid(qi, qj) - ref);
          total += w;
        }
      }
      if (total > 0.0) {
        out(i, j) = ref + weighted / total;
        continue;
      }
      // Nothing in range: nearest known pixel, first in row-major order on ties.
      double best = std::numeric_limits<double>::infinity();
      Pixel nearest{};
      for (const Pixel& q : known) {
        const double di = q.row - i, dj = q.col - j;
        const double dist_sq = di * di + dj * dj;
        if (dist_sq < best) {
          best = dist_sq;
          nearest = q;
        }
      }
      out(i, j) = grid(nearest.row, nearest.col);
    }
  }

  for (int pass = 0; pass < params.smoothing_passes; ++pass) {
    const DemGrid prev = out;
    for (int i = 0; i < grid.rows(); ++i) {
      for (int j = 0; j < grid.cols(); ++j) {
        if (mask.known(i, j)) continue;
        const double ref = prev(i, j);
        double sum = 0.0;
        int count = 0;
        for (int di = -1; di <= 1; ++di) {
          for (int dj = -1; dj <= 1; ++dj) {
            if (!prev.contains(i + di, j + dj)) continue;
            sum += prev(i + di, j + dj) - ref;
            ++count;
          }
        }
        out(i, j) = ref + sum / count;
      }
    }
  }
  return out;
}

}  // namespace demfill
