// Quantum-channel data model: Kraus / Choi / Pauli-transfer representations,
// conversions, composition, mixing and channel metrics.
//
// Conventions (fixed throughout):
//  * Choi matrix J(E) = (E (x) I)(|Phi><Phi|) with the unnormalized maximally
//    entangled |Phi> = sum_j |jj>, so Tr J = dim_in and the trace-preserving
//    condition reads  Tr_out J = I  (output is the FIRST tensor factor).
//  * Pauli transfer matrix R_ab = (1/2^n) Tr[P_a E(P_b)] over the Pauli basis
//    ordered lexicographically, leftmost qubit most significant.
//  * Vectorization is column-stacking wherever a superoperator appears.
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "pqec/errors.hpp"
#include "pqec/mixture.hpp"
#include "pqec/numerics.hpp"
#include "pqec/pauli.hpp"

namespace pqec {

// ---------------------------------------------------------------------------
// Kraus sets: also used standalone for non-trace-preserving approximants.

struct KrausSet {
  std::vector<Mat> ops;

  Eigen::Index dim_in() const { return ops.empty() ? 0 : ops.front().cols(); }
  Eigen::Index dim_out() const { return ops.empty() ? 0 : ops.front().rows(); }

  bool dims_consistent() const {
    for (const Mat& k : ops)
      if (k.rows() != dim_out() || k.cols() != dim_in()) return false;
    return !ops.empty();
  }

  // || sum K^dag K - I ||_F
  double completeness_defect() const {
    Mat acc = Mat::Zero(dim_in(), dim_in());
    for (const Mat& k : ops) acc += k.adjoint() * k;
    return (acc - Mat::Identity(dim_in(), dim_in())).norm();
  }

  Mat apply(const Mat& rho) const {
    Mat out = Mat::Zero(dim_out(), dim_out());
    for (const Mat& k : ops) out += k * rho * k.adjoint();
    return out;
  }

  // Choi of the (possibly non-TP) map, same convention as Channel.
  Mat choi() const {
    const Eigen::Index din = dim_in(), dout = dim_out();
    Mat j = Mat::Zero(dout * din, dout * din);
    for (const Mat& k : ops) {
      Vec v(dout * din);
      for (Eigen::Index s = 0; s < dout; ++s)
        for (Eigen::Index r = 0; r < din; ++r) v(s * din + r) = k(s, r);
      j += v * v.adjoint();
    }
    return j;
  }
};

// ---------------------------------------------------------------------------

struct ChoiMatrix {
  Mat mat;  // (dim_out * dim_in) square, output factor first
};

struct PauliTransferMatrix {
  RMat mat;  // 4^n x 4^n real
};

struct CptpReport {
  double cp_min_eigenvalue = 0.0;
  double tp_defect = 0.0;
  bool cp = false;
  bool tp = false;
  bool ok() const { return cp && tp; }
};

class Channel {
 public:
  using Representation = std::variant<KrausSet, ChoiMatrix, PauliTransferMatrix>;

  // ---- factories (each validates the CPTP invariants of its representation)

  static Channel from_kraus(std::vector<Mat> ops, double tp_tol = kTpTol) {
    KrausSet ks{std::move(ops)};
    if (!ks.dims_consistent())
      throw invalid_channel_error("from_kraus: inconsistent Kraus dimensions");
    if (ks.completeness_defect() > tp_tol)
      throw invalid_channel_error("from_kraus: Kraus completeness defect " +
                                  std::to_string(ks.completeness_defect()));
    const Eigen::Index din = ks.dim_in(), dout = ks.dim_out();
    return Channel(din, dout, Representation(std::move(ks)));
  }

  static Channel from_choi(Mat j, Eigen::Index dim_in, Eigen::Index dim_out,
                           double cp_tol = kCpEigTol, double tp_tol = kTpTol) {
    if (j.rows() != dim_in * dim_out || j.cols() != dim_in * dim_out)
      throw invalid_channel_error("from_choi: Choi dimension mismatch");
    if (!is_hermitian(j, 1e-9))
      throw invalid_channel_error("from_choi: Choi not Hermitian");
    const double min_eig = min_hermitian_eigenvalue(j);
    if (min_eig < -cp_tol)
      throw invalid_channel_error("from_choi: Choi min eigenvalue " + std::to_string(min_eig));
    const Mat red = partial_trace_first(j, dim_out, dim_in);
    const double tp_defect = (red - Mat::Identity(dim_in, dim_in)).norm();
    if (tp_defect > tp_tol)
      throw invalid_channel_error("from_choi: TP defect " + std::to_string(tp_defect));
    return Channel(dim_in, dim_out, Representation(ChoiMatrix{std::move(j)}));
  }

  static Channel from_ptm(RMat r, double tp_tol = kTpTol) {
    const Eigen::Index m = r.rows();
    if (r.cols() != m) throw invalid_channel_error("from_ptm: PTM must be square");
    int n_qubits = 0;
    while ((Eigen::Index(1) << (2 * n_qubits)) < m) ++n_qubits;
    if ((Eigen::Index(1) << (2 * n_qubits)) != m)
      throw invalid_channel_error("from_ptm: PTM side must be a power of 4");
    double first_row_defect = std::abs(r(0, 0) - 1.0);
    for (Eigen::Index b = 1; b < m; ++b) first_row_defect = std::max(first_row_defect, std::abs(r(0, b)));
    if (first_row_defect > tp_tol)
      throw invalid_channel_error("from_ptm: first row defect " + std::to_string(first_row_defect));
    const Eigen::Index dim = Eigen::Index(1) << n_qubits;
    return Channel(dim, dim, Representation(PauliTransferMatrix{std::move(r)}));
  }

  static Channel identity(Eigen::Index dim) {
    return Channel(dim, dim, Representation(KrausSet{{Mat::Identity(dim, dim)}}));
  }

  static Channel from_unitary(const Mat& u, double tol = 1e-10) {
    if (u.rows() != u.cols()) throw invalid_channel_error("from_unitary: square required");
    if ((u.adjoint() * u - Mat::Identity(u.rows(), u.rows())).norm() > tol)
      throw invalid_channel_error("from_unitary: not unitary");
    return Channel(u.rows(), u.rows(), Representation(KrausSet{{u}}));
  }

  static Channel from_pauli(const PauliChannel& pc) {
    std::vector<Mat> ops;
    const int n = pc.n_qubits();
    for (int a = 0; a < pauli_num_labels(n); ++a)
      if (pc.probs()[a] > 0.0) ops.push_back(std::sqrt(pc.probs()[a]) * pauli_matrix(a, n));
    return from_kraus(std::move(ops), 1e-8);
  }

  // ---- shape

  Eigen::Index dim_in() const { return dim_in_; }
  Eigen::Index dim_out() const { return dim_out_; }
  bool square() const { return dim_in_ == dim_out_; }

  int n_qubits() const {
    int n = 0;
    while ((Eigen::Index(1) << n) < dim_in_) ++n;
    if ((Eigen::Index(1) << n) != dim_in_ || dim_in_ != dim_out_)
      throw invalid_channel_error("n_qubits: channel is not a square power-of-two map");
    return n;
  }

  bool holds_kraus() const { return std::holds_alternative<KrausSet>(rep_); }
  bool holds_choi() const { return std::holds_alternative<ChoiMatrix>(rep_); }
  bool holds_ptm() const { return std::holds_alternative<PauliTransferMatrix>(rep_); }
  const Representation& representation() const { return rep_; }

  // ---- representation extraction (converting when needed)

  Mat choi() const {
    if (holds_choi()) return std::get<ChoiMatrix>(rep_).mat;
    if (holds_kraus()) return std::get<KrausSet>(rep_).choi();
    return ptm_to_choi(std::get<PauliTransferMatrix>(rep_).mat, n_qubits());
  }

  std::vector<Mat> kraus(double rank_tol = kCpEigTol) const {
    if (holds_kraus()) return std::get<KrausSet>(rep_).ops;
    return choi_to_kraus_ops(choi(), dim_in_, dim_out_, rank_tol);
  }

  RMat ptm() const {
    if (holds_ptm()) return std::get<PauliTransferMatrix>(rep_).mat;
    const int n = n_qubits();
    const Eigen::Index m = pauli_num_labels(n);
    const double scale = 1.0 / static_cast<double>(dim_in_);
    RMat r(m, m);
    if (holds_kraus()) {
      const auto& ops = std::get<KrausSet>(rep_).ops;
      for (Eigen::Index b = 0; b < m; ++b) {
        Mat eb = Mat::Zero(dim_out_, dim_out_);
        const Mat pb = pauli_matrix(static_cast<int>(b), n);
        for (const Mat& k : ops) eb += k * pb * k.adjoint();
        for (Eigen::Index a = 0; a < m; ++a) {
          const cxd t = (pauli_matrix(static_cast<int>(a), n) * eb).trace() * scale;
          if (std::abs(t.imag()) > kHermTol)
            throw invalid_channel_error("ptm: entry has imaginary part " +
                                        std::to_string(t.imag()));
          r(a, b) = t.real();
        }
      }
      return r;
    }
    // Choi path: R_ab = (1/2^n) Tr[(P_a (x) P_b^T) J]
    const Mat j = choi();
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = 0; b < m; ++b) {
        const Mat basis = kron(pauli_matrix(static_cast<int>(a), n),
                               pauli_matrix(static_cast<int>(b), n).transpose());
        const cxd t = (basis * j).trace() * scale;
        if (std::abs(t.imag()) > kHermTol)
          throw invalid_channel_error("ptm: entry has imaginary part");
        r(a, b) = t.real();
      }
    return r;
  }

  // superoperator in column-stacking convention: S vec(rho) = vec(E(rho))
  Mat superoperator() const {
    Mat s = Mat::Zero(dim_out_ * dim_out_, dim_in_ * dim_in_);
    for (const Mat& k : kraus()) s += kron(k.conjugate(), k);
    return s;
  }

  Mat apply(const Mat& rho) const {
    if (rho.rows() != dim_in_ || rho.cols() != dim_in_)
      throw invalid_channel_error("apply: state dimension mismatch");
    if (holds_kraus()) return std::get<KrausSet>(rep_).apply(rho);
    if (holds_ptm()) {
      const int n = n_qubits();
      const Eigen::Index m = pauli_num_labels(n);
      const RMat& r = std::get<PauliTransferMatrix>(rep_).mat;
      RVec coeff(m);
      for (Eigen::Index b = 0; b < m; ++b) {
        const cxd t = (pauli_matrix(static_cast<int>(b), n) * rho).trace();
        coeff(b) = t.real();
      }
      const RVec out_coeff = r * coeff;
      Mat out = Mat::Zero(dim_out_, dim_out_);
      for (Eigen::Index a = 0; a < m; ++a)
        out += (out_coeff(a) / static_cast<double>(dim_out_)) *
               pauli_matrix(static_cast<int>(a), n);
      return out;
    }
    const Mat j = std::get<ChoiMatrix>(rep_).mat;
    Mat out = Mat::Zero(dim_out_, dim_out_);
    for (Eigen::Index s = 0; s < dim_out_; ++s)
      for (Eigen::Index sp = 0; sp < dim_out_; ++sp) {
        cxd acc = 0.0;
        for (Eigen::Index i = 0; i < dim_in_; ++i)
          for (Eigen::Index jj = 0; jj < dim_in_; ++jj)
            acc += rho(i, jj) * j(s * dim_in_ + i, sp * dim_in_ + jj);
        out(s, sp) = acc;
      }
    return out;
  }

  // adjoint map action: E^dag(Y) = sum K^dag Y K
  Mat apply_adjoint(const Mat& y) const {
    Mat out = Mat::Zero(dim_in_, dim_in_);
    for (const Mat& k : kraus()) out += k.adjoint() * y * k;
    return out;
  }

  // ---- static conversion helpers

  static Mat ptm_to_choi(const RMat& r, int n_qubits) {
    const Eigen::Index m = r.rows();
    const double scale = 1.0 / static_cast<double>(Eigen::Index(1) << n_qubits);
    const Eigen::Index d2 = (Eigen::Index(1) << n_qubits) * (Eigen::Index(1) << n_qubits);
    Mat j = Mat::Zero(d2, d2);
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = 0; b < m; ++b) {
        if (r(a, b) == 0.0) continue;
        j += (scale * r(a, b)) * kron(pauli_matrix(static_cast<int>(a), n_qubits),
                                      pauli_matrix(static_cast<int>(b), n_qubits).transpose());
      }
    return j;
  }

  static std::vector<Mat> choi_to_kraus_ops(const Mat& j, Eigen::Index dim_in,
                                            Eigen::Index dim_out, double rank_tol = kCpEigTol) {
    const HermEig eig = hermitian_eig(j);
    std::vector<Mat> ops;
    for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k) {
      const double lambda = eig.eigenvalues(k);
      if (lambda < -rank_tol)
        throw invalid_channel_error("choi_to_kraus: negative Choi eigenvalue " +
                                    std::to_string(lambda));
      if (lambda <= rank_tol) continue;  // clip float noise in [-tol, tol]
      Mat op(dim_out, dim_in);
      for (Eigen::Index s = 0; s < dim_out; ++s)
        for (Eigen::Index r = 0; r < dim_in; ++r)
          op(s, r) = std::sqrt(lambda) * eig.eigenvectors(s * dim_in + r, k);
      ops.push_back(std::move(op));
    }
    if (ops.empty()) throw invalid_channel_error("choi_to_kraus: zero channel");
    return ops;
  }

 private:
  Channel(Eigen::Index dim_in, Eigen::Index dim_out, Representation rep)
      : dim_in_(dim_in), dim_out_(dim_out), rep_(std::move(rep)) {}

  Eigen::Index dim_in_;
  Eigen::Index dim_out_;
  Representation rep_;
};

// ---------------------------------------------------------------------------
// named conversion operations

inline Channel kraus_to_choi(const Channel& c) {
  if (!c.holds_kraus()) throw invalid_channel_error("kraus_to_choi: Kraus representation required");
  return Channel::from_choi(c.choi(), c.dim_in(), c.dim_out());
}

inline Channel choi_to_kraus(const Channel& c, double rank_tol = kCpEigTol) {
  return Channel::from_kraus(
      Channel::choi_to_kraus_ops(c.choi(), c.dim_in(), c.dim_out(), rank_tol), 1e-8);
}

inline Channel channel_to_ptm(const Channel& c) { return Channel::from_ptm(c.ptm()); }

// ---------------------------------------------------------------------------
// validation

inline CptpReport validate_cptp(const Channel& c, double cp_tol = kCpEigTol,
                                double tp_tol = kTpTol) {
  CptpReport rep;
  const Mat j = c.choi();
  rep.cp_min_eigenvalue = min_hermitian_eigenvalue(j);
  rep.cp = rep.cp_min_eigenvalue >= -cp_tol;
  const Mat red = partial_trace_first(j, c.dim_out(), c.dim_in());
  rep.tp_defect = (red - Mat::Identity(c.dim_in(), c.dim_in())).norm();
  rep.tp = rep.tp_defect <= tp_tol;
  return rep;
}

// ---------------------------------------------------------------------------
// composition / tensor / mixing

inline Channel compose(const Channel& second, const Channel& first) {
  if (first.dim_out() != second.dim_in())
    throw invalid_channel_error("compose: dimension mismatch");
  if (first.square() && second.square() && first.dim_in() == second.dim_in()) {
    // square power-of-two maps compose as PTM products
    bool pow2 = (first.dim_in() & (first.dim_in() - 1)) == 0;
    if (pow2) return Channel::from_ptm(second.ptm() * first.ptm(), 1e-8);
  }
  std::vector<Mat> ops;
  for (const Mat& k2 : second.kraus())
    for (const Mat& k1 : first.kraus()) ops.push_back(k2 * k1);
  return Channel::from_kraus(std::move(ops), 1e-8);
}

inline Channel tensor(const Channel& a, const Channel& b) {
  std::vector<Mat> ops;
  for (const Mat& ka : a.kraus())
    for (const Mat& kb : b.kraus()) ops.push_back(kron(ka, kb));
  return Channel::from_kraus(std::move(ops), 1e-8);
}

inline Channel mix(const std::vector<Channel>& channels, const MixtureWeights& weights) {
  if (channels.empty()) throw invalid_channel_error("mix: empty channel list");
  if (weights.size() != channels.size())
    throw invalid_weights_error("mix: weight count mismatch");
  for (const Channel& c : channels)
    if (c.dim_in() != channels.front().dim_in() || c.dim_out() != channels.front().dim_out())
      throw invalid_channel_error("mix: channel dimension mismatch");
  std::vector<Mat> ops;
  for (std::size_t k = 0; k < channels.size(); ++k) {
    const double w = weights[k];
    if (w <= kSupportEps) continue;
    for (const Mat& g : channels[k].kraus()) ops.push_back(std::sqrt(w) * g);
  }
  return Channel::from_kraus(std::move(ops), 1e-8);
}

// ---------------------------------------------------------------------------
// Choi coordinates: an isometric chart of the trace-preserving affine
// subspace.  With the orthonormal Hermitian basis (P_a (x) P_b^T)/2^n the
// coordinates of J are exactly the PTM entries R_ab; the TP constraint fixes
// row a = 0, so the chart is the flattened PTM without its first row.
// Euclidean distance in coordinates equals Frobenius distance of Chois.

struct ChoiCoordinates {
  RVec vector;
  Eigen::Index affine_dim = 0;
};

inline Eigen::Index tp_affine_dim(Eigen::Index dim) { return dim * dim * dim * dim - dim * dim; }

inline ChoiCoordinates choi_coordinates(const Channel& c, double tp_tol = 1e-8) {
  const RMat r = c.ptm();
  const Eigen::Index m = r.rows();
  double first_row_defect = std::abs(r(0, 0) - 1.0);
  for (Eigen::Index b = 1; b < m; ++b)
    first_row_defect = std::max(first_row_defect, std::abs(r(0, b)));
  if (first_row_defect > tp_tol)
    throw invalid_channel_error("choi_coordinates: channel is not trace preserving");
  ChoiCoordinates out;
  out.affine_dim = (m - 1) * m;
  out.vector.resize(out.affine_dim);
  for (Eigen::Index a = 1; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b) out.vector((a - 1) * m + b) = r(a, b);
  return out;
}

inline Channel coordinates_to_choi(const ChoiCoordinates& coords) {
  Eigen::Index m = 1;
  while ((m - 1) * m < coords.affine_dim) m *= 2;
  if ((m - 1) * m != coords.affine_dim || coords.vector.size() != coords.affine_dim)
    throw invalid_parameter_error("coordinates_to_choi: bad affine dimension");
  RMat r = RMat::Zero(m, m);
  r(0, 0) = 1.0;
  for (Eigen::Index a = 1; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b) r(a, b) = coords.vector((a - 1) * m + b);
  const Channel ptm_chan = Channel::from_ptm(std::move(r));
  return Channel::from_choi(ptm_chan.choi(), ptm_chan.dim_in(), ptm_chan.dim_out(),
                            // coordinates may describe any TP point, not only CP ones;
                            // CP validation is the caller's concern
                            1e9, kTpTol);
}

// ---------------------------------------------------------------------------
// metrics

// (1/2) || J_a/d - J_b/d ||_1 : trace distance between normalized Choi states.
inline double choi_trace_distance(const Channel& a, const Channel& b) {
  if (a.dim_in() != b.dim_in() || a.dim_out() != b.dim_out())
    throw invalid_channel_error("choi_trace_distance: dimension mismatch");
  const double d = static_cast<double>(a.dim_in());
  return 0.5 * trace_norm_hermitian(a.choi() - b.choi()) / d;
}

inline double choi_frobenius_distance(const Channel& a, const Channel& b) {
  return (a.choi() - b.choi()).norm();
}

// ---------------------------------------------------------------------------
// density matrices

class DensityMatrix {
 public:
  DensityMatrix(Mat m, double trace_tol = 1e-10, double herm_tol = kHermTol,
                double eig_tol = 1e-10)
      : mat_(std::move(m)) {
    if (mat_.rows() != mat_.cols()) throw invalid_parameter_error("DensityMatrix: square required");
    if (std::abs(mat_.trace().real() - 1.0) > trace_tol ||
        std::abs(mat_.trace().imag()) > trace_tol)
      throw invalid_parameter_error("DensityMatrix: trace != 1");
    if (!is_hermitian(mat_, herm_tol))
      throw invalid_parameter_error("DensityMatrix: not Hermitian");
    if (min_hermitian_eigenvalue(mat_) < -eig_tol)
      throw invalid_parameter_error("DensityMatrix: negative eigenvalue");
  }

  static DensityMatrix pure(const Vec& ket) {
    const Vec n = ket / ket.norm();
    return DensityMatrix(n * n.adjoint());
  }

  static DensityMatrix basis_state(Eigen::Index dim, Eigen::Index index) {
    Vec v = Vec::Zero(dim);
    v(index) = 1.0;
    return pure(v);
  }

  Eigen::Index dim() const { return mat_.rows(); }
  const Mat& matrix() const { return mat_; }

 private:
  Mat mat_;
};

inline double state_trace_distance(const Mat& a, const Mat& b) {
  return 0.5 * trace_norm_hermitian(a - b);
}

}  // namespace pqec
