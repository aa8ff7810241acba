#include <algorithm>
#include <cmath>
#include <optional>

#include "demfill/error.hpp"
#include "demfill/fillers.hpp"

namespace demfill {
namespace {

template <int N>
using Matrix = std::array<std::array<double, N>, N>;

template <int N>
using Vector = std::array<double, N>;

// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.
template <int N>
Vector<N> symmetric_eigenvalues(Matrix<N> a) {
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < N; ++p)
      for (int q = p + 1; q < N; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (int p = 0; p < N; ++p) {
      for (int q = p + 1; q < N; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < N; ++k) {
          const double akp = a[k][p];
          const double akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < N; ++k) {
          const double apk = a[p][k];
          const double aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  Vector<N> eig{};
  for (int i = 0; i < N; ++i) eig[i] = a[i][i];
  return eig;
}

template <int N>
std::optional<Vector<N>> cholesky_solve(const Matrix<N>& a, const Vector<N>& b) {
  Matrix<N> l{};
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j <= i; ++j) {
      double sum = a[i][j];
      for (int k = 0; k < j; ++k) sum -= l[i][k] * l[j][k];
      if (i == j) {
        if (sum <= 0.0) return std::nullopt;
        l[i][i] = std::sqrt(sum);
      } else {
        l[i][j] = sum / l[j][j];
      }
    }
  }
  Vector<N> y{};
  for (int i = 0; i < N; ++i) {
    double sum = b[i];
    for (int k = 0; k < i; ++k) sum -= l[i][k] * y[k];
    y[i] = sum / l[i][i];
  }
  Vector<N> x{};
  for (int i = N - 1; i >= 0; --i) {
    double sum = y[i];
    for (int k = i + 1; k < N; ++k) sum -= l[k][i] * x[k];
    x[i] = sum / l[i][i];
  }
  return x;
}

// Solves the normal equations of the basis `phi` after symmetric diagonal
// scaling; nullopt when the scaled matrix fails the conditioning test.
template <int N, typename Basis>
std::optional<Vector<N>> solve_normal_equations(std::span<const Sample> samples, Basis phi) {
  Matrix<N> m{};
  Vector<N> rhs{};
  for (const Sample& s : samples) {
    const Vector<N> row = phi(static_cast<double>(s.u), static_cast<double>(s.v));
    for (int i = 0; i < N; ++i) {
      rhs[i] += row[i] * s.value;
      for (int j = 0; j <= i; ++j) m[i][j] += row[i] * row[j];
    }
  }
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) m[i][j] = m[j][i];

  Vector<N> scale{};
  for (int i = 0; i < N; ++i) {
    if (!(m[i][i] > 0.0)) return std::nullopt;
    scale[i] = 1.0 / std::sqrt(m[i][i]);
  }
  Matrix<N> scaled{};
  Vector<N> scaled_rhs{};
  for (int i = 0; i < N; ++i) {
    scaled_rhs[i] = rhs[i] * scale[i];
    for (int j = 0; j < N; ++j) scaled[i][j] = m[i][j] * scale[i] * scale[j];
  }

  const Vector<N> eig = symmetric_eigenvalues<N>(scaled);
  const double lo = *std::min_element(eig.begin(), eig.end());
  const double hi = *std::max_element(eig.begin(), eig.end());
  if (!(lo > 0.0) || hi / lo > kMaxFitCondition) return std::nullopt;

  auto y = cholesky_solve<N>(scaled, scaled_rhs);
  if (!y) return std::nullopt;
  for (int i = 0; i < N; ++i) (*y)[i] *= scale[i];
  return y;
}

}  // namespace

Paraboloid fit_paraboloid(std::span<const Sample> samples) {
  if (samples.empty()) throw DataError("fit_paraboloid: empty sample set");

  Paraboloid p;
  if (samples.size() >= 6) {
    auto x = solve_normal_equations<6>(samples, [](double u, double v) {
      return Vector<6>{u * u, u * v, v * v, u, v, 1.0};
    });
    if (x) {
      p = {(*x)[0], (*x)[1], (*x)[2], (*x)[3], (*x)[4], (*x)[5], FitDegree::quadratic};
      return p;
    }
  }
  if (samples.size() >= 3) {
    auto x = solve_normal_equations<3>(samples, [](double u, double v) {
      return Vector<3>{u, v, 1.0};
    });
    if (x) {
      p = {0.0, 0.0, 0.0, (*x)[0], (*x)[1], (*x)[2], FitDegree::affine};
      return p;
    }
  }
  double sum = 0.0;
  for (const Sample& s : samples) sum += s.value;
  p.f = sum / static_cast<double>(samples.size());
  p.degree = FitDegree::constant;
  return p;
}

double eval_paraboloid(const Paraboloid& p, double u, double v) noexcept {
  return p.a * u * u + p.b * u * v + p.c * v * v + p.d * u + p.e * v + p.f;
}

std::vector<double> extend_ring(const DemGrid& state, const VoidMask& state_mask,
                                std::span<const Pixel> ring, int radius) {
  if (radius < 1) throw DataError("extend_ring: radius must be >= 1");
  const int max_radius = std::max(state.rows(), state.cols());
  std::vector<double> values;
  values.reserve(ring.size());
  for (const Pixel& p : ring) {
    int r = radius;
    SampleSet samples = known_window(state, state_mask, p, r);
    while (samples.empty() && r < max_radius) {
      r *= 2;
      samples = known_window(state, state_mask, p, r);
    }
    if (samples.empty()) throw DataError("extend_ring: no known pixel reachable");
    const Paraboloid local = fit_paraboloid(samples);
    Paraboloid fit = local;
    while (fit.degree != FitDegree::quadratic && r < max_radius) {
      r *= 2;
      fit = fit_paraboloid(known_window(state, state_mask, p, r));
    }
    values.push_back(fit.degree == FitDegree::quadratic ? fit.f : local.f);
  }
  return values;
}

DemGrid fill_extend(const DemGrid& grid, const VoidMask& mask, int radius) {
  require_same_shape(grid, mask, "fill_extend");
  if (radius < 1) throw DataError("fill_extend: radius must be >= 1");
  const RingPartition rings = ring_partition(mask);

  DemGrid state = grid;
  VoidMask state_mask = mask;
  for (const auto& ring : rings.rings()) {
    const std::vector<double> values = extend_ring(state, state_mask, ring, radius);
    for (std::size_t n = 0; n < ring.size(); ++n) {
      state(ring[n].row, ring[n].col) = values[n];
      state_mask.set(ring[n].row, ring[n].col, false);
    }
  }
  return state;
}

}  // namespace demfill
