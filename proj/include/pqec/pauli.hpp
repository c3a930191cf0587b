// n-qubit Pauli basis and Pauli channels.
//
// Pauli ordering is lexicographic over {I,X,Y,Z}^n with the leftmost qubit
// most significant: index a has base-4 digits (a_0 ... a_{n-1}), qubit 0 is
// the leftmost letter and the most significant tensor factor.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pqec/errors.hpp"
#include "pqec/numerics.hpp"

namespace pqec {

inline const Mat& pauli_1q(int which) {
  static const Mat mats[4] = {
      (Mat(2, 2) << 1, 0, 0, 1).finished(),
      (Mat(2, 2) << 0, 1, 1, 0).finished(),
      (Mat(2, 2) << 0, cxd(0, -1), cxd(0, 1), 0).finished(),
      (Mat(2, 2) << 1, 0, 0, -1).finished()};
  return mats[which & 3];
}

inline int pauli_num_labels(int n_qubits) { return 1 << (2 * n_qubits); }

inline int pauli_digit(int index, int qubit, int n_qubits) {
  return (index >> (2 * (n_qubits - 1 - qubit))) & 3;
}

inline std::string pauli_label(int index, int n_qubits) {
  static const char letters[] = "IXYZ";
  std::string s(n_qubits, 'I');
  for (int q = 0; q < n_qubits; ++q) s[q] = letters[pauli_digit(index, q, n_qubits)];
  return s;
}

inline int pauli_index(const std::string& label) {
  int idx = 0;
  for (char c : label) {
    int d;
    switch (c) {
      case 'I': d = 0; break;
      case 'X': d = 1; break;
      case 'Y': d = 2; break;
      case 'Z': d = 3; break;
      default: throw invalid_parameter_error("pauli_index: bad label " + label);
    }
    idx = (idx << 2) | d;
  }
  return idx;
}

inline Mat pauli_matrix(int index, int n_qubits) {
  Mat m = pauli_1q(pauli_digit(index, 0, n_qubits));
  for (int q = 1; q < n_qubits; ++q) m = kron(m, pauli_1q(pauli_digit(index, q, n_qubits)));
  return m;
}

// product index a*b ignoring phase (bitwise XOR of the symplectic parts)
inline int pauli_product_index(int a, int b) { return a ^ b; }

// +1 if P_a and P_b commute, -1 otherwise
inline int pauli_commutation_sign(int a, int b, int n_qubits) {
  int anti = 0;
  for (int q = 0; q < n_qubits; ++q) {
    int da = pauli_digit(a, q, n_qubits);
    int db = pauli_digit(b, q, n_qubits);
    if (da != 0 && db != 0 && da != db) anti ^= 1;
  }
  return anti ? -1 : 1;
}

// ---------------------------------------------------------------------------
// PauliChannel: rho -> sum_a p_a P_a rho P_a

class PauliChannel {
 public:
  PauliChannel(int n_qubits, std::vector<double> probs, double sum_tol = 1e-12)
      : n_qubits_(n_qubits), probs_(std::move(probs)) {
    if (static_cast<int>(probs_.size()) != pauli_num_labels(n_qubits_))
      throw invalid_parameter_error("PauliChannel: probability vector length");
    double sum = 0.0;
    for (double p : probs_) {
      if (p < -1e-15 || p > 1.0 + 1e-12)
        throw invalid_parameter_error("PauliChannel: probability out of [0,1]");
      sum += p;
    }
    if (std::abs(sum - 1.0) > sum_tol)
      throw invalid_parameter_error("PauliChannel: probabilities do not sum to 1");
  }

  static PauliChannel from_map(int n_qubits, const std::map<std::string, double>& probs,
                               double sum_tol = 1e-12) {
    std::vector<double> v(pauli_num_labels(n_qubits), 0.0);
    for (const auto& [label, p] : probs) {
      if (static_cast<int>(label.size()) != n_qubits)
        throw invalid_parameter_error("PauliChannel: label length " + label);
      v[pauli_index(label)] = p;
    }
    return PauliChannel(n_qubits, std::move(v), sum_tol);
  }

  static PauliChannel identity(int n_qubits) {
    std::vector<double> v(pauli_num_labels(n_qubits), 0.0);
    v[0] = 1.0;
    return PauliChannel(n_qubits, std::move(v));
  }

  static PauliChannel dephasing(double p_z) {
    return PauliChannel(1, {1.0 - p_z, 0.0, 0.0, p_z});
  }

  static PauliChannel depolarizing(double p) {
    return PauliChannel(1, {1.0 - p, p / 3.0, p / 3.0, p / 3.0});
  }

  int n_qubits() const { return n_qubits_; }
  const std::vector<double>& probs() const { return probs_; }
  double prob(const std::string& label) const { return probs_[pauli_index(label)]; }

  std::map<std::string, double> prob_map() const {
    std::map<std::string, double> m;
    for (int a = 0; a < static_cast<int>(probs_.size()); ++a)
      m[pauli_label(a, n_qubits_)] = probs_[a];
    return m;
  }

  // composition of Pauli channels is convolution over the Pauli group
  PauliChannel compose(const PauliChannel& first) const {
    if (first.n_qubits_ != n_qubits_)
      throw invalid_parameter_error("PauliChannel::compose: qubit count mismatch");
    std::vector<double> out(probs_.size(), 0.0);
    for (size_t a = 0; a < probs_.size(); ++a)
      for (size_t b = 0; b < probs_.size(); ++b)
        out[a ^ b] += probs_[a] * first.probs_[b];
    return PauliChannel(n_qubits_, std::move(out), 1e-9);
  }

  PauliChannel tensor(const PauliChannel& other) const {
    int n = n_qubits_ + other.n_qubits_;
    std::vector<double> out(pauli_num_labels(n), 0.0);
    int shift = 2 * other.n_qubits_;
    for (size_t a = 0; a < probs_.size(); ++a)
      for (size_t b = 0; b < other.probs_.size(); ++b)
        out[(a << shift) | b] = probs_[a] * other.probs_[b];
    return PauliChannel(n, std::move(out), 1e-9);
  }

  // relabeled channel P_f . this (appending the Pauli frame P_f)
  PauliChannel with_appended_frame(int frame_index) const {
    std::vector<double> out(probs_.size());
    for (size_t a = 0; a < probs_.size(); ++a)
      out[a ^ static_cast<size_t>(frame_index)] = probs_[a];
    return PauliChannel(n_qubits_, std::move(out), 1e-9);
  }

  // diagonal of the Pauli transfer matrix: f_b = sum_a p_a * sign(a,b)
  std::vector<double> ptm_diagonal() const {
    std::vector<double> f(probs_.size(), 0.0);
    for (size_t b = 0; b < probs_.size(); ++b)
      for (size_t a = 0; a < probs_.size(); ++a)
        f[b] += probs_[a] *
                pauli_commutation_sign(static_cast<int>(a), static_cast<int>(b), n_qubits_);
    return f;
  }

 private:
  int n_qubits_;
  std::vector<double> probs_;
};

}  // namespace pqec
