// Dense complex linear algebra helpers shared by all modules.
// Matrices are small (<= 16x16 system side, <= 256x256 superoperators),
// so everything is dense and exact eigensolves are cheap.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace pqec {

using cxd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double kHermTol = 1e-12;
inline constexpr double kTpTol = 1e-10;
inline constexpr double kCpEigTol = 1e-10;

// ---------------------------------------------------------------------------
// basic matrix utilities

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline RMat kron(const RMat& a, const RMat& b) {
  RMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline bool is_hermitian(const Mat& m, double tol = kHermTol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

// Column-stacking vectorization: vec(M) stacks columns, so
// vec(A X B) = (B^T (x) A) vec(X).
inline Vec vectorize(const Mat& m) {
  return Eigen::Map<const Vec>(m.data(), m.size());
}

inline Mat unvectorize(const Vec& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) throw std::invalid_argument("unvectorize: size mismatch");
  return Eigen::Map<const Mat>(v.data(), rows, cols);
}

// Partial trace over the first factor of a (d1*d2) x (d1*d2) matrix.
inline Mat partial_trace_first(const Mat& m, Eigen::Index d1, Eigen::Index d2) {
  if (m.rows() != d1 * d2 || m.cols() != d1 * d2)
    throw std::invalid_argument("partial_trace_first: dimension mismatch");
  Mat out = Mat::Zero(d2, d2);
  for (Eigen::Index k = 0; k < d1; ++k)
    out += m.block(k * d2, k * d2, d2, d2);
  return out;
}

// Partial trace over the second factor.
inline Mat partial_trace_second(const Mat& m, Eigen::Index d1, Eigen::Index d2) {
  if (m.rows() != d1 * d2 || m.cols() != d1 * d2)
    throw std::invalid_argument("partial_trace_second: dimension mismatch");
  Mat out = Mat::Zero(d1, d1);
  for (Eigen::Index i = 0; i < d1; ++i)
    for (Eigen::Index j = 0; j < d1; ++j) {
      cxd s = 0.0;
      for (Eigen::Index k = 0; k < d2; ++k) s += m(i * d2 + k, j * d2 + k);
      out(i, j) = s;
    }
  return out;
}

struct HermEig {
  RVec eigenvalues;   // ascending
  Mat eigenvectors;   // columns
};

inline HermEig hermitian_eig(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> solver((m + m.adjoint()) / 2.0);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("hermitian_eig: eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

inline double min_hermitian_eigenvalue(const Mat& m) {
  return hermitian_eig(m).eigenvalues.minCoeff();
}

// Trace norm ||M||_1 of a Hermitian matrix (sum of |eigenvalue|).
inline double trace_norm_hermitian(const Mat& m) {
  return hermitian_eig(m).eigenvalues.cwiseAbs().sum();
}

// ---------------------------------------------------------------------------
// matrix exponential: scaling-and-squaring with a fixed Pade(13) approximant.
// Robust for the non-normal Liouvillians produced here (dims <= 256).

inline Mat expm(const Mat& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("expm: square matrix required");
  static const double b[] = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
      1187353796428800.0,  129060195264000.0,   10559470521600.0,
      670442572800.0,      33522128640.0,       1323241920.0,
      40840800.0,          960960.0,            16380.0,
      182.0,               1.0};
  const double theta13 = 5.371920351148152;
  const Eigen::Index n = a.rows();

  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  Mat as = a;
  if (norm1 > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
    as /= std::pow(2.0, squarings);
  }

  const Mat ident = Mat::Identity(n, n);
  const Mat a2 = as * as;
  const Mat a4 = a2 * a2;
  const Mat a6 = a2 * a4;
  const Mat u = as * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) +
                      b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident);
  const Mat v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) +
                b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;

  Mat r = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

// ---------------------------------------------------------------------------
// Counter-based 64-bit generator (splitmix finalizer over seed+counter).
// next_u64() is a pure function of (seed, stream, counter), so sample ranges
// can be chunked deterministically regardless of execution order.

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : base_(mix(seed, stream)) {}

  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    return finalize(a + 0x9e3779b97f4a7c15ULL * (b + 1));
  }

  std::uint64_t next_u64() { return finalize(base_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  // uniform in [0, 1)
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // standard normal via Box-Muller
  double next_gaussian() {
    double u1 = next_double();
    double u2 = next_double();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  std::uint64_t seed_base() const { return base_; }

 private:
  static std::uint64_t finalize(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t base_;
  std::uint64_t counter_ = 0;
};

}  // namespace pqec
