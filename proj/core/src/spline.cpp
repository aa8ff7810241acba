#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "demfill/error.hpp"
#include "demfill/fillers.hpp"

namespace demfill {

CubicBSplineBasis::CubicBSplineBasis(double length, int intervals)
    : length_(length), intervals_(intervals) {
  if (!(length > 0.0) || intervals < 1) {
    throw DataError("CubicBSplineBasis: need positive length and at least one interval");
  }
  knots_.reserve(static_cast<std::size_t>(intervals) + 7);
  for (int k = 0; k < 3; ++k) knots_.push_back(0.0);
  for (int k = 0; k <= intervals; ++k) knots_.push_back(length * k / intervals);
  for (int k = 0; k < 3; ++k) knots_.push_back(length);
}

CubicBSplineBasis CubicBSplineBasis::for_axis(int samples, int knot_spacing) {
  const int extent = std::max(samples - 1, 1);
  const int intervals = std::max(1, (extent + knot_spacing - 1) / knot_spacing);
  return CubicBSplineBasis(static_cast<double>(extent), intervals);
}

CubicBSplineBasis::Span CubicBSplineBasis::eval(double x) const {
  x = std::clamp(x, 0.0, length_);
  const double h = length_ / intervals_;
  const int interval = std::min(intervals_ - 1, static_cast<int>(std::floor(x / h)));
  const int s = interval + 3;

  // Cox-de Boor triangle for the four non-zero cubics on knot span s.
  std::array<double, 4> n{1.0, 0.0, 0.0, 0.0};
  std::array<double, 4> left{};
  std::array<double, 4> right{};
  for (int j = 1; j <= 3; ++j) {
    left[j] = x - knots_[s + 1 - j];
    right[j] = knots_[s + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = n[r] / (right[r + 1] + left[j - r]);
      n[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    n[j] = saved;
  }
  return {interval, n};
}

double SplineSurface::eval(double i, double j) const {
  const auto ri = row_basis.eval(i);
  const auto cj = col_basis.eval(j);
  const int nc = col_basis.count();
  double sum = 0.0;
  for (int a = 0; a < 4; ++a) {
    double row = 0.0;
    for (int b = 0; b < 4; ++b) {
      row += cj.values[b] * control[static_cast<std::size_t>(ri.first + a) * nc + cj.first + b];
    }
    sum += ri.values[a] * row;
  }
  return sum;
}

namespace {

struct DataRow {
  CubicBSplineBasis::Span row;
  CubicBSplineBasis::Span col;
  double value;
};

bool all_collinear(const std::vector<Pixel>& pts) {
  if (pts.size() < 3) return true;
  const Pixel a = pts[0];
  std::size_t k = 1;
  while (k < pts.size() && pts[k] == a) ++k;
  if (k == pts.size()) return true;
  const Pixel b = pts[k];
  for (const Pixel& c : pts) {
    const long cross = static_cast<long>(b.row - a.row) * (c.col - a.col) -
                       static_cast<long>(b.col - a.col) * (c.row - a.row);
    if (cross != 0) return false;
  }
  return true;
}

// Applies the normal operator B^T B + lambda * P of the penalised least
// squares problem, where P is the thin-plate stencil energy of the control
// net.
class NormalOperator {
 public:
  NormalOperator(const std::vector<DataRow>& rows, int nr, int nc, double lambda)
      : rows_(rows), nr_(nr), nc_(nc), lambda_(lambda) {}

  void apply(const std::vector<double>& x, std::vector<double>& y) const {
    std::fill(y.begin(), y.end(), 0.0);
    for (const DataRow& d : rows_) {
      double s = 0.0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) s += d.row.values[a] * d.col.values[b] * x[at(d.row.first + a, d.col.first + b)];
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) y[at(d.row.first + a, d.col.first + b)] += d.row.values[a] * d.col.values[b] * s;
    }
    if (lambda_ > 0.0) {
      for_each_stencil([&](const std::array<std::size_t, 4>& idx, const std::array<double, 4>& w,
                           int len, double weight) {
        double s = 0.0;
        for (int k = 0; k < len; ++k) s += w[k] * x[idx[k]];
        for (int k = 0; k < len; ++k) y[idx[k]] += lambda_ * weight * w[k] * s;
      });
    }
  }

  std::vector<double> diagonal() const {
    std::vector<double> diag(static_cast<std::size_t>(nr_) * nc_, 0.0);
    for (const DataRow& d : rows_) {
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          const double w = d.row.values[a] * d.col.values[b];
          diag[at(d.row.first + a, d.col.first + b)] += w * w;
        }
    }
    if (lambda_ > 0.0) {
      for_each_stencil([&](const std::array<std::size_t, 4>& idx, const std::array<double, 4>& w,
                           int len, double weight) {
        for (int k = 0; k < len; ++k) diag[idx[k]] += lambda_ * weight * w[k] * w[k];
      });
    }
    return diag;
  }

 private:
  std::size_t at(int a, int b) const {
    return static_cast<std::size_t>(a) * static_cast<std::size_t>(nc_) + static_cast<std::size_t>(b);
  }

  // Second differences along rows and columns (weight 1) and the mixed
  // difference (weight 2).
  template <typename Fn>
  void for_each_stencil(Fn fn) const {
    for (int a = 1; a + 1 < nr_; ++a)
      for (int b = 0; b < nc_; ++b)
        fn({at(a - 1, b), at(a, b), at(a + 1, b), 0}, {1.0, -2.0, 1.0, 0.0}, 3, 1.0);
    for (int a = 0; a < nr_; ++a)
      for (int b = 1; b + 1 < nc_; ++b)
        fn({at(a, b - 1), at(a, b), at(a, b + 1), 0}, {1.0, -2.0, 1.0, 0.0}, 3, 1.0);
    for (int a = 0; a + 1 < nr_; ++a)
      for (int b = 0; b + 1 < nc_; ++b)
        fn({at(a, b), at(a, b + 1), at(a + 1, b), at(a + 1, b + 1)}, {1.0, -1.0, -1.0, 1.0}, 4, 2.0);
  }

  const std::vector<DataRow>& rows_;
  int nr_;
  int nc_;
  double lambda_;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

SplineSurface fit_spline_surface(const DemGrid& grid, const VoidMask& mask,
                                 const SplineParams& params) {
  require_same_shape(grid, mask, "fill_spline");
  if (params.knot_spacing < 2) throw DataError("fill_spline: knot_spacing must be >= 2");
  if (!(params.smoothing_weight >= 0.0)) throw DataError("fill_spline: negative smoothing weight");
  if (!(params.solver_tolerance > 0.0)) throw DataError("fill_spline: tolerance must be > 0");
  if (params.max_iterations < 1) throw DataError("fill_spline: max_iterations must be >= 1");

  std::vector<Pixel> known;
  for (int i = 0; i < grid.rows(); ++i)
    for (int j = 0; j < grid.cols(); ++j)
      if (mask.known(i, j)) known.push_back({i, j});
  if (known.empty()) throw DataError("fill_spline: every pixel is unknown");
  if (all_collinear(known)) {
    throw NumericalError("fill_spline: conditioning failure, known pixels are collinear");
  }
  if (params.smoothing_weight == 0.0 && known.size() < 16) {
    throw NumericalError("fill_spline: conditioning failure, fewer than 16 known pixels "
                         "and no smoothing");
  }

  SplineSurface surf{CubicBSplineBasis::for_axis(grid.rows(), params.knot_spacing),
                     CubicBSplineBasis::for_axis(grid.cols(), params.knot_spacing),
                     {},
                     0};
  const int nr = surf.row_basis.count();
  const int nc = surf.col_basis.count();
  const std::size_t n = static_cast<std::size_t>(nr) * nc;

  std::vector<DataRow> data;
  data.reserve(known.size());
  for (const Pixel& p : known) {
    data.push_back({surf.row_basis.eval(p.row), surf.col_basis.eval(p.col), grid(p.row, p.col)});
  }

  const NormalOperator op(data, nr, nc, params.smoothing_weight);
  std::vector<double> rhs(n, 0.0);
  for (const DataRow& d : data) {
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        rhs[static_cast<std::size_t>(d.row.first + a) * nc + d.col.first + b] +=
            d.row.values[a] * d.col.values[b] * d.value;
  }

  std::vector<double> inv_diag = op.diagonal();
  for (double& v : inv_diag) v = v > 0.0 ? 1.0 / v : 1.0;

  std::vector<double> x(n, 0.0);
  std::vector<double> r = rhs;
  std::vector<double> z(n), p(n), q(n);
  const double rhs_norm = std::sqrt(dot(rhs, rhs));
  surf.control = x;
  if (rhs_norm == 0.0) return surf;

  for (std::size_t k = 0; k < n; ++k) z[k] = inv_diag[k] * r[k];
  p = z;
  double rz = dot(r, z);
  for (int it = 1; it <= params.max_iterations; ++it) {
    op.apply(p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0)) {
      throw NumericalError("fill_spline: conditioning failure, normal operator is not "
                           "positive definite on the search direction");
    }
    const double alpha = rz / pq;
    for (std::size_t k = 0; k < n; ++k) {
      x[k] += alpha * p[k];
      r[k] -= alpha * q[k];
    }
    if (std::sqrt(dot(r, r)) <= params.solver_tolerance * rhs_norm) {
      surf.control = std::move(x);
      surf.iterations = it;
      return surf;
    }
    for (std::size_t k = 0; k < n; ++k) z[k] = inv_diag[k] * r[k];
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
  }
  throw NumericalError("fill_spline: conjugate gradients did not converge within " +
                       std::to_string(params.max_iterations) + " iterations");
}

DemGrid fill_spline(const DemGrid& grid, const VoidMask& mask, const SplineParams& params) {
  const SplineSurface surf = fit_spline_surface(grid, mask, params);
  DemGrid out = grid;
  for (int i = 0; i < grid.rows(); ++i)
    for (int j = 0; j < grid.cols(); ++j)
      if (mask.unknown(i, j)) out(i, j) = surf.eval(i, j);
  return out;
}

}  // namespace demfill
