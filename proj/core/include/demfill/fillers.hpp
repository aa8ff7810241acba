#pragma once

#include <array>
#include <span>
#include <vector>

#include "demfill/geometry.hpp"
#include "demfill/raster.hpp"

namespace demfill {

enum class FitDegree { quadratic, affine, constant };

/// f(u, v) = A u^2 + B u v + C v^2 + D u + E v + F in window-local
/// coordinates, so f(0, 0) = F is the value at the window centre.
struct Paraboloid {
  double a = 0, b = 0, c = 0, d = 0, e = 0, f = 0;
  FitDegree degree = FitDegree::constant;
};

/// Normal matrices whose diagonally scaled 2-norm condition number exceeds
/// this are rejected and the fit drops one degree.
inline constexpr double kMaxFitCondition = 1e8;

/// Least-squares paraboloid through the samples. Picks the highest degree
/// (quadratic, affine, constant) with enough samples and a well-conditioned
/// normal matrix. Throws DataError on an empty set.
Paraboloid fit_paraboloid(std::span<const Sample> samples);

double eval_paraboloid(const Paraboloid& p, double u, double v) noexcept;

/// Extension values for one ring, each fitted on the known pixels of `state`
/// within `radius` (doubled per pixel while the window is empty). A window
/// that only supports a lower-degree fit (say an L of samples clipped by the
/// grid border) is also doubled until a quadratic fit succeeds; if none does,
/// the fit at the first non-empty radius is kept. The state is read-only, so
/// pixels of the same ring never see each other.
std::vector<double> extend_ring(const DemGrid& state, const VoidMask& state_mask,
                                std::span<const Pixel> ring, int radius);

/// Ring-by-ring paraboloid extension of the known surface until every pixel
/// is filled.
DemGrid fill_extend(const DemGrid& grid, const VoidMask& mask, int radius = 3);

struct IdwParams {
  double power = 2.0;
  double radius = 32.0;
  int smoothing_passes = 2;
};

/// Shepard interpolation over known pixels within `radius` (nearest known
/// pixel when none is in range), then masked 3x3 mean-filter passes over the
/// originally unknown pixels.
DemGrid fill_idw(const DemGrid& grid, const VoidMask& mask, const IdwParams& params = {});

struct SplineParams {
  int knot_spacing = 8;
  double smoothing_weight = 1e-3;
  double solver_tolerance = 1e-8;
  int max_iterations = 10000;
};

/// Uniform clamped cubic B-spline basis on [0, length] with `intervals`
/// equal knot spans.
class CubicBSplineBasis {
 public:
  CubicBSplineBasis(double length, int intervals);

  int count() const noexcept { return intervals_ + 3; }
  int intervals() const noexcept { return intervals_; }
  double length() const noexcept { return length_; }

  struct Span {
    int first = 0;
    std::array<double, 4> values{};
  };

  /// The four non-zero basis functions at x, starting at index `first`.
  Span eval(double x) const;

  /// Basis for a grid axis with `samples` pixels and the given knot spacing.
  static CubicBSplineBasis for_axis(int samples, int knot_spacing);

 private:
  double length_;
  int intervals_;
  std::vector<double> knots_;
};

/// Bicubic tensor-product surface fitted to the known pixels.
struct SplineSurface {
  CubicBSplineBasis row_basis;
  CubicBSplineBasis col_basis;
  std::vector<double> control;  // row-major, row_basis.count() x col_basis.count()
  int iterations = 0;

  double eval(double i, double j) const;
};

/// Minimises the squared residual on known pixels plus smoothing_weight times
/// a discrete thin-plate energy of the control net (squared second
/// differences, mixed term doubled) with Jacobi-preconditioned conjugate
/// gradients. Throws NumericalError on non-convergence or an ill-posed system.
SplineSurface fit_spline_surface(const DemGrid& grid, const VoidMask& mask,
                                 const SplineParams& params = {});

DemGrid fill_spline(const DemGrid& grid, const VoidMask& mask, const SplineParams& params = {});

}  // namespace demfill
