// Test-only oracles: independent reference implementations used to freeze
// expected values.  Nothing here is allowed to call the code path it checks.
#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/QR>

#include "pqec/channel.hpp"
#include "pqec/numerics.hpp"
#include "pqec/surface_code.hpp"

namespace pqec::testing {

// ---------------------------------------------------------------------------
// random objects

inline Mat random_ginibre(CounterRng& rng, Eigen::Index rows, Eigen::Index cols) {
  Mat g(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      g(i, j) = cxd(rng.next_gaussian(), rng.next_gaussian());
  return g;
}

inline Mat random_unitary(CounterRng& rng, Eigen::Index dim) {
  const Mat g = random_ginibre(rng, dim, dim);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < dim; ++k) {
    const cxd d = r(k, k);
    q.col(k) *= (std::abs(d) > 0 ? d / std::abs(d) : 1.0);
  }
  return q;
}

// random CPTP map from a Stinespring isometry (QR of a (dim*k) x dim Ginibre)
inline Channel random_cptp(CounterRng& rng, Eigen::Index dim, Eigen::Index n_kraus) {
  const Mat g = random_ginibre(rng, dim * n_kraus, dim);
  Eigen::HouseholderQR<Mat> qr(g);
  const Mat q = Mat(qr.householderQ()).leftCols(dim);  // isometry: q^dag q = I
  std::vector<Mat> ops;
  for (Eigen::Index k = 0; k < n_kraus; ++k) ops.push_back(q.middleRows(k * dim, dim));
  return Channel::from_kraus(std::move(ops));
}

inline Mat random_density(CounterRng& rng, Eigen::Index dim) {
  const Mat g = random_ginibre(rng, dim, dim);
  Mat rho = g * g.adjoint();
  rho /= rho.trace();
  return rho;
}

inline Vec random_ket(CounterRng& rng, Eigen::Index dim) {
  Vec v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = cxd(rng.next_gaussian(), rng.next_gaussian());
  v.normalize();
  return v;
}

inline std::vector<double> random_simplex_point(CounterRng& rng, std::size_t m) {
  std::vector<double> w(m);
  double sum = 0.0;
  for (double& x : w) {
    x = -std::log(1.0 - rng.next_double());
    sum += x;
  }
  for (double& x : w) x /= sum;
  return w;
}

// ---------------------------------------------------------------------------
// surface-code oracles

// all minimum-weight corrections for one sector syndrome, by brute force over
// every single-type error pattern; returns (min weight, set of logical-flip
// parities seen among minimal corrections)
struct SectorMinimum {
  int weight = std::numeric_limits<int>::max();
  bool flip_seen[2] = {false, false};
  qubit_mask example = 0;
};

inline SectorMinimum brute_force_sector_minimum(const SurfaceCode& code, std::uint32_t syndrome,
                                                bool z_type) {
  SectorMinimum out;
  const int n = code.n_data();
  const qubit_mask logical = z_type ? code.logical_x_mask() : code.logical_z_mask();
  for (std::uint64_t bits = 0; bits < (std::uint64_t(1) << n); ++bits) {
    PauliError e;
    if (z_type) e.z_mask = bits;
    else e.x_mask = bits;
    const std::uint32_t s = z_type ? code.x_syndrome(e) : code.z_syndrome(e);
    if (s != syndrome) continue;
    const int w = popcount128(z_type ? e.z_mask : e.x_mask);
    const int flip = popcount128((z_type ? e.z_mask : e.x_mask) & logical) & 1;
    if (w < out.weight) {
      out.weight = w;
      out.flip_seen[0] = out.flip_seen[1] = false;
      out.flip_seen[flip] = true;
      out.example = bits;
    } else if (w == out.weight) {
      out.flip_seen[flip] = true;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// independent simplex least-squares solver (projected gradient descent),
// used to certify Frank-Wolfe optima

inline RVec project_to_simplex(RVec v) {
  // Euclidean projection onto the probability simplex
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0, theta = 0.0;
  int rho = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    css += u[i];
    const double t = (css - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0) {
      rho = static_cast<int>(i + 1);
      theta = t;
    }
  }
  (void)rho;
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = std::max(0.0, v(i) - theta);
  return v;
}

// minimize (1/2)||A r - b||^2 over the simplex; independent of fit_mixture
inline double simplex_least_squares_optimum(const RMat& a, const RVec& b, int iterations = 200000) {
  const Eigen::Index m = a.cols();
  RVec r = RVec::Constant(m, 1.0 / static_cast<double>(m));
  const double lip = (a.transpose() * a).norm() + 1e-12;  // Frobenius upper-bounds the spectral norm
  const double step = 1.0 / lip;
  for (int it = 0; it < iterations; ++it) {
    const RVec grad = a.transpose() * (a * r - b);
    r = project_to_simplex(r - step * grad);
  }
  return 0.5 * (a * r - b).squaredNorm();
}

}  // namespace pqec::testing
