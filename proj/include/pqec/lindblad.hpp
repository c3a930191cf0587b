// Exact open-system dynamics: Liouvillian construction, matrix-exponential
// propagation, the two-site exciton model, and first-order Kraus steps.
//
// Generator convention: rhodot = -i[H, rho] + sum_j rate_j D[L_j] rho with
// D[L] rho = L rho L^dag - (1/2){L^dag L, rho}; rates enter exactly once.
// Superoperators use column-stacking vectorization.
#pragma once

#include <cmath>
#include <vector>

#include "pqec/channel.hpp"
#include "pqec/errors.hpp"
#include "pqec/numerics.hpp"
#include "pqec/pauli.hpp"

namespace pqec {

struct JumpOperator {
  Mat op;
  double rate = 0.0;  // 1/time
};

struct LindbladModel {
  Eigen::Index dim = 0;
  Mat hamiltonian;  // energy units, hbar = 1
  std::vector<JumpOperator> jump_ops;

  void validate() const {
    if (hamiltonian.rows() != dim || hamiltonian.cols() != dim)
      throw invalid_parameter_error("LindbladModel: Hamiltonian dimension mismatch");
    if (!is_hermitian(hamiltonian, kHermTol))
      throw invalid_parameter_error("LindbladModel: Hamiltonian not Hermitian");
    for (const JumpOperator& j : jump_ops) {
      if (j.op.rows() != dim || j.op.cols() != dim)
        throw invalid_parameter_error("LindbladModel: jump operator dimension mismatch");
      if (j.rate < 0.0) throw invalid_parameter_error("LindbladModel: negative rate");
    }
  }

  LindbladModel dissipator_only() const {
    LindbladModel m = *this;
    m.hamiltonian = Mat::Zero(dim, dim);
    return m;
  }

  LindbladModel coherent_only() const {
    LindbladModel m = *this;
    m.jump_ops.clear();
    return m;
  }
};

struct ExcitonParams {
  double eps1 = 1.0;    // site energies
  double eps2 = 0.8;
  double hop = 0.3;     // hopping amplitude J
  double gamma1 = 0.05;  // local dephasing rates
  double gamma2 = 0.05;
  double gamma12 = 0.02;  // correlated dephasing rate
  double kappa1 = 0.01;   // loss rates
  double kappa2 = 0.01;

  void validate() const {
    if (gamma1 < 0 || gamma2 < 0 || gamma12 < 0 || kappa1 < 0 || kappa2 < 0)
      throw invalid_parameter_error("ExcitonParams: negative rate");
  }

  // "true" physics for mismatch studies: dephasing rates scaled, loss kept
  ExcitonParams with_dephasing_scaled(double factor) const {
    ExcitonParams p = *this;
    p.gamma1 *= factor;
    p.gamma2 *= factor;
    p.gamma12 *= factor;
    return p;
  }
};

// H = -(eps1/2) Z1 - (eps2/2) Z2 + (J/2)(X1 X2 + Y1 Y2), qubit 1 leftmost.
// Dissipator: (gamma_j/2) D[Z_j] + (gamma12/2) D[Z1 Z2] + kappa_j D[sigma_j^-].
inline LindbladModel build_exciton_model(const ExcitonParams& p) {
  p.validate();
  const Mat id2 = Mat::Identity(2, 2);
  const Mat z1 = kron(pauli_1q(3), id2);
  const Mat z2 = kron(id2, pauli_1q(3));
  const Mat x1x2 = kron(pauli_1q(1), pauli_1q(1));
  const Mat y1y2 = kron(pauli_1q(2), pauli_1q(2));
  Mat lower = Mat::Zero(2, 2);
  lower(0, 1) = 1.0;  // sigma^- = |0><1|

  LindbladModel m;
  m.dim = 4;
  m.hamiltonian = -(p.eps1 / 2.0) * z1 - (p.eps2 / 2.0) * z2 + (p.hop / 2.0) * (x1x2 + y1y2);
  m.jump_ops = {{z1, p.gamma1 / 2.0},
                {z2, p.gamma2 / 2.0},
                {kron(pauli_1q(3), pauli_1q(3)), p.gamma12 / 2.0},
                {kron(lower, id2), p.kappa1},
                {kron(id2, lower), p.kappa2}};
  m.validate();
  return m;
}

inline LindbladModel dephasing_model(double gamma) {
  LindbladModel m;
  m.dim = 2;
  m.hamiltonian = Mat::Zero(2, 2);
  m.jump_ops = {{pauli_1q(3), gamma / 2.0}};
  m.validate();
  return m;
}

// L vec(rho) = vec(rhodot), column-stacking:
// L = -i (I (x) H - H^T (x) I)
//     + sum_j rate_j [ conj(L_j) (x) L_j - (1/2) I (x) (L^dag L) - (1/2) (L^dag L)^T (x) I ]
inline Mat liouvillian(const LindbladModel& model) {
  model.validate();
  const Eigen::Index d = model.dim;
  const Mat id = Mat::Identity(d, d);
  Mat l = cxd(0, -1) * (kron(id, model.hamiltonian) - kron(model.hamiltonian.transpose(), id));
  for (const JumpOperator& j : model.jump_ops) {
    const Mat ldl = j.op.adjoint() * j.op;
    l += j.rate * (kron(j.op.conjugate(), j.op) - 0.5 * kron(id, ldl) -
                   0.5 * kron(ldl.transpose(), id));
  }
  return l;
}

// Choi of the map vec(rho) -> S vec(rho); S in column-stacking convention.
inline Mat superoperator_to_choi(const Mat& s, Eigen::Index dim) {
  Mat j = Mat::Zero(dim * dim, dim * dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index jj = 0; jj < dim; ++jj) {
      const Mat block = unvectorize(s.col(jj * dim + i), dim, dim);  // E(|i><j|)
      for (Eigen::Index so = 0; so < dim; ++so)
        for (Eigen::Index sp = 0; sp < dim; ++sp)
          j(so * dim + i, sp * dim + jj) += block(so, sp);
    }
  return j;
}

// exp(L tau) as a validated CPTP channel.
inline Channel exact_step(const LindbladModel& model, double tau) {
  if (tau < 0.0) throw invalid_parameter_error("exact_step: negative time");
  const Mat prop = expm(liouvillian(model) * tau);
  if (!prop.allFinite()) throw numeric_error("exact_step: matrix exponential diverged");
  return Channel::from_choi(superoperator_to_choi(prop, model.dim), model.dim, model.dim,
                            kCpEigTol, 1e-9);
}

// First-order Kraus step: K_0 = I - (iH + (1/2) sum rate L^dag L) dt,
// K_j = sqrt(rate_j dt) L_j.  Non-TP; sum K^dag K = I + O(dt^2).
inline KrausSet first_order_kraus_step(const LindbladModel& model, double dt) {
  model.validate();
  if (dt < 0.0) throw invalid_parameter_error("first_order_kraus_step: negative dt");
  const Eigen::Index d = model.dim;
  Mat m = cxd(0, 1) * model.hamiltonian;
  for (const JumpOperator& j : model.jump_ops) m += 0.5 * j.rate * (j.op.adjoint() * j.op);
  KrausSet ks;
  ks.ops.push_back(Mat::Identity(d, d) - m * dt);
  if (dt > 0.0)
    for (const JumpOperator& j : model.jump_ops)
      ks.ops.push_back(std::sqrt(j.rate * dt) * j.op);
  return ks;
}

// rho_m = exact_step(tau)^m applied to rho0; returns the full trajectory
// [rho_0, ..., rho_steps], each entry validated as a density matrix.
inline std::vector<DensityMatrix> evolve(const LindbladModel& model, const DensityMatrix& rho0,
                                         double tau, int steps) {
  if (rho0.dim() != model.dim) throw invalid_parameter_error("evolve: state dimension mismatch");
  if (steps < 0) throw invalid_parameter_error("evolve: negative step count");
  const Mat prop = expm(liouvillian(model) * tau);
  std::vector<DensityMatrix> traj;
  traj.reserve(steps + 1);
  traj.push_back(rho0);
  Vec v = vectorize(rho0.matrix());
  for (int m = 0; m < steps; ++m) {
    v = prop * v;
    traj.emplace_back(unvectorize(v, model.dim, model.dim), 1e-9, 1e-9, 1e-9);
  }
  return traj;
}

}  // namespace pqec
