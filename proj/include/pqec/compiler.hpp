// Compilation of target dissipative steps into convex mixtures of
// implementable logical channels: programmable channel libraries, a
// projection-free Frank-Wolfe fit over the simplex in Choi coordinates, and
// Caratheodory support pruning.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "pqec/channel.hpp"
#include "pqec/errors.hpp"
#include "pqec/lindblad.hpp"
#include "pqec/logical_channel.hpp"
#include "pqec/mixture.hpp"
#include "pqec/numerics.hpp"
#include "pqec/surface_code.hpp"

namespace pqec {

// ---------------------------------------------------------------------------
// libraries

struct LogicalChannelLibrary {
  std::vector<Channel> channels;
  std::vector<std::string> labels;
  RMat coords;  // one column per channel, n_aff rows
  std::string source = "custom";

  std::size_t size() const { return channels.size(); }
  Eigen::Index affine_dim() const { return coords.rows(); }

  static LogicalChannelLibrary from_channels(std::vector<Channel> channels,
                                             std::vector<std::string> labels,
                                             std::string source = "custom") {
    if (channels.empty()) throw invalid_parameter_error("library: empty channel list");
    if (labels.size() != channels.size())
      throw invalid_parameter_error("library: label count mismatch");
    LogicalChannelLibrary lib;
    const ChoiCoordinates first = choi_coordinates(channels.front());
    lib.coords.resize(first.affine_dim, static_cast<Eigen::Index>(channels.size()));
    lib.coords.col(0) = first.vector;
    for (std::size_t k = 1; k < channels.size(); ++k) {
      const ChoiCoordinates c = choi_coordinates(channels[k]);
      if (c.affine_dim != first.affine_dim)
        throw invalid_parameter_error("library: mixed channel dimensions");
      lib.coords.col(static_cast<Eigen::Index>(k)) = c.vector;
    }
    lib.channels = std::move(channels);
    lib.labels = std::move(labels);
    lib.source = std::move(source);
    return lib;
  }
};

// the 4^n unitary Pauli-conjugation channels
inline LogicalChannelLibrary pauli_frame_library(int n_qubits) {
  if (n_qubits < 1 || n_qubits > 2)
    throw invalid_parameter_error("pauli_frame_library: 1 or 2 qubits");
  std::vector<Channel> channels;
  std::vector<std::string> labels;
  for (int a = 0; a < pauli_num_labels(n_qubits); ++a) {
    channels.push_back(Channel::from_unitary(pauli_matrix(a, n_qubits)));
    labels.push_back(pauli_label(a, n_qubits));
  }
  return LogicalChannelLibrary::from_channels(std::move(channels), std::move(labels),
                                              "pauli_frames");
}

inline constexpr double kAmplitudeDampingUnit = 0.5;  // fixed primitive strength

inline Channel amplitude_damping_channel(double lambda) {
  if (lambda < 0.0 || lambda > 1.0)
    throw invalid_parameter_error("amplitude_damping_channel: lambda outside [0,1]");
  Mat k0 = Mat::Zero(2, 2), k1 = Mat::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1.0 - lambda);
  k1(0, 1) = std::sqrt(lambda);
  return Channel::from_kraus({k0, k1});
}

inline Channel reset_to_zero_channel() {
  Mat k0 = Mat::Zero(2, 2), k1 = Mat::Zero(2, 2);
  k0(0, 0) = 1.0;  // |0><0|
  k1(0, 1) = 1.0;  // |0><1|
  return Channel::from_kraus({k0, k1});
}

// Z measurement with discarded outcome: full dephasing
inline Channel measure_z_discard_channel() {
  Mat k0 = Mat::Zero(2, 2), k1 = Mat::Zero(2, 2);
  k0(0, 0) = 1.0;
  k1(1, 1) = 1.0;
  return Channel::from_kraus({k0, k1});
}

// Pauli frames plus, per qubit: reset to |0>, Z-measure-and-discard, and the
// amplitude-damping primitive at the fixed unit strength.
inline LogicalChannelLibrary reset_feedback_library(int n_qubits) {
  if (n_qubits < 1 || n_qubits > 2)
    throw invalid_parameter_error("reset_feedback_library: 1 or 2 qubits");
  LogicalChannelLibrary frames = pauli_frame_library(n_qubits);
  std::vector<Channel> channels = frames.channels;
  std::vector<std::string> labels = frames.labels;

  const Channel prims[3] = {reset_to_zero_channel(), measure_z_discard_channel(),
                            amplitude_damping_channel(kAmplitudeDampingUnit)};
  const std::string prim_names[3] = {"reset0", "measureZ", "ad_unit"};
  const Channel id1 = Channel::identity(2);
  for (int q = 0; q < n_qubits; ++q)
    for (int p = 0; p < 3; ++p) {
      Channel c = prims[p];
      if (n_qubits == 2) c = (q == 0) ? tensor(c, id1) : tensor(id1, c);
      channels.push_back(std::move(c));
      labels.push_back(prim_names[p] + "_q" + std::to_string(q));
    }
  return LogicalChannelLibrary::from_channels(std::move(channels), std::move(labels),
                                              "reset_feedback");
}

// Strategy-A library: the extracted one-round logical channels under a set of
// recovery policies.
inline LogicalChannelLibrary strategyA_library(const SurfaceCode& code, const NoiseModel& noise,
                                               const EstimationMethod& method,
                                               const std::vector<RecoveryPolicy>& policies) {
  const auto rounds = logical_channel_family(code, noise, method, policies);
  std::vector<Channel> channels;
  std::vector<std::string> labels;
  for (const auto& r : rounds) {
    channels.push_back(r.to_channel());
    labels.push_back(r.policy);
  }
  return LogicalChannelLibrary::from_channels(
      std::move(channels), std::move(labels),
      "strategyA(d=" + std::to_string(code.distance()) + ")");
}

// ---------------------------------------------------------------------------
// Frank-Wolfe fit over the simplex

struct FitResult {
  MixtureWeights weights{std::vector<double>{1.0}};
  double residual = 0.0;  // || sum_k r_k x_k - x_tar ||_2
  double fw_gap = 0.0;    // final duality gap; bounds f(r) - f*
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_trace;  // f per iteration when recording is on
};

struct FitOptions {
  double eta = 1e-8;       // stop when the duality gap <= eta^2
  int max_iterations = 200000;
  bool record_objective = false;
  // refine the final iterate by an exact equality-constrained least squares
  // on the active face (keeps the Frank-Wolfe iterates untouched)
  bool polish = true;
};

// minimize f(r) = (1/2) || A r - b ||^2 over the probability simplex with
// vanilla Frank-Wolfe: the linear minimization oracle is the coordinate with
// the smallest gradient entry, the step size comes from exact line search.
// The duality gap g(r) = <r - e_s, grad f(r)> upper-bounds f(r) - f*.
inline FitResult fit_mixture_coords(const RMat& a, const RVec& b, const FitOptions& opts = {}) {
  const Eigen::Index m = a.cols();
  if (m == 0) throw invalid_parameter_error("fit_mixture: empty library");
  if (!a.allFinite() || !b.allFinite()) throw numeric_error("fit_mixture: non-finite input");

  // start at the best single vertex (lowest index on ties)
  Eigen::Index start = 0;
  double best_f = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < m; ++k) {
    const double f = 0.5 * (a.col(k) - b).squaredNorm();
    if (f < best_f - 1e-18) {
      best_f = f;
      start = k;
    }
  }
  RVec r = RVec::Zero(m);
  r(start) = 1.0;
  RVec ar = a.col(start);

  FitResult out;
  double f = 0.5 * (ar - b).squaredNorm();
  double gap = std::numeric_limits<double>::infinity();
  const double gap_floor = 64.0 * std::numeric_limits<double>::epsilon() *
                           std::max(1.0, b.squaredNorm());
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    if (opts.record_objective) out.objective_trace.push_back(f);
    const RVec resid = ar - b;            // gradient in data space
    const RVec grad = a.transpose() * resid;
    Eigen::Index s = 0;
    grad.minCoeff(&s);
    gap = r.dot(grad) - grad(s);
    if (gap <= opts.eta * opts.eta || gap <= gap_floor) break;

    const RVec dir_data = a.col(s) - ar;  // A(e_s - r)
    const double denom = dir_data.squaredNorm();
    if (denom <= 0.0) break;
    double step = -resid.dot(dir_data) / denom;
    step = std::clamp(step, 0.0, 1.0);
    if (step == 0.0) break;
    r = (1.0 - step) * r;
    r(s) += step;
    ar += step * dir_data;
    f = 0.5 * (ar - b).squaredNorm();
  }

  // renormalize away float drift before constructing the simplex point
  RVec rw = r.cwiseMax(0.0);
  rw /= rw.sum();

  if (opts.polish) {
    // Vanilla Frank-Wolfe zigzags near faces and stalls around sqrt(eps)
    // residuals; an exact least squares on the active face finishes the job.
    // Solve min ||A_S w - b|| s.t. sum w = 1 on the support S, dropping
    // negative coordinates NNLS-style until the face solution is feasible.
    std::vector<Eigen::Index> support;
    for (Eigen::Index k = 0; k < m; ++k)
      if (rw(k) > 1e-12) support.push_back(k);
    double f_best = 0.5 * (a * rw - b).squaredNorm();
    while (support.size() >= 1) {
      const Eigen::Index n = static_cast<Eigen::Index>(support.size());
      RMat as(a.rows(), n);
      for (Eigen::Index i = 0; i < n; ++i) as.col(i) = a.col(support[i]);
      // parameterize the sum-one constraint: w = e_0 + N y
      RVec w_full;
      if (n == 1) {
        w_full = RVec::Ones(1);
      } else {
        RMat nbasis = RMat::Zero(n, n - 1);
        for (Eigen::Index j = 0; j < n - 1; ++j) {
          nbasis(0, j) = -1.0;
          nbasis(j + 1, j) = 1.0;
        }
        const RVec rhs = b - as.col(0);
        const RMat an = as * nbasis;
        const RVec y = an.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);
        w_full = RVec::Zero(n);
        w_full(0) = 1.0;
        w_full += nbasis * y;
      }
      const double w_min = w_full.minCoeff();
      if (w_min < -1e-12) {
        Eigen::Index drop = 0;
        w_full.minCoeff(&drop);
        support.erase(support.begin() + drop);
        continue;
      }
      RVec candidate = RVec::Zero(m);
      for (Eigen::Index i = 0; i < n; ++i) candidate(support[i]) = std::max(w_full(i), 0.0);
      candidate /= candidate.sum();
      const double f_cand = 0.5 * (a * candidate - b).squaredNorm();
      if (f_cand <= f_best * (1.0 + 1e-12) + 1e-30) rw = candidate;
      break;
    }
    // refresh the gap certificate at the polished point
    const RVec grad = a.transpose() * (a * rw - b);
    gap = rw.dot(grad) - grad.minCoeff();
  }

  out.weights = MixtureWeights(std::vector<double>(rw.data(), rw.data() + rw.size()));
  out.residual = (a * rw - b).norm();
  out.fw_gap = gap;
  out.iterations = it;
  out.converged = gap <= std::max(opts.eta * opts.eta, gap_floor);
  (void)f;
  return out;
}

inline FitResult fit_mixture(const LogicalChannelLibrary& library, const Channel& target,
                             const FitOptions& opts = {}) {
  const ChoiCoordinates tar = choi_coordinates(target);
  if (tar.affine_dim != library.affine_dim())
    throw invalid_parameter_error("fit_mixture: target dimension mismatch");
  return fit_mixture_coords(library.coords, tar.vector, opts);
}

// ---------------------------------------------------------------------------
// Caratheodory pruning

struct PruneResult {
  MixtureWeights weights{std::vector<double>{1.0}};
  bool pruned_ok = true;  // false: numeric degeneracy, input returned unchanged
};

// Reduce the support of a mixture to at most n_aff + 1 points while keeping
// the mixture point fixed: repeatedly find an affine dependence among the
// active coordinate columns and walk it until a weight hits zero.
inline PruneResult caratheodory_prune(const LogicalChannelLibrary& library,
                                      const MixtureWeights& weights) {
  if (weights.size() != library.size())
    throw invalid_parameter_error("caratheodory_prune: weight count mismatch");
  const Eigen::Index n_aff = library.affine_dim();
  if (static_cast<Eigen::Index>(weights.support_size()) <= n_aff + 1)
    return {MixtureWeights(weights.weights()), true};
  std::vector<double> w = weights.weights();
  const RVec point0 = library.coords * Eigen::Map<const RVec>(w.data(), w.size());

  auto support_of = [&]() {
    std::vector<Eigen::Index> s;
    for (std::size_t k = 0; k < w.size(); ++k)
      if (w[k] > kSupportEps) s.push_back(static_cast<Eigen::Index>(k));
    return s;
  };

  std::vector<Eigen::Index> support = support_of();
  while (static_cast<Eigen::Index>(support.size()) > n_aff + 1) {
    // columns (x_k; 1): a null vector gives sum nu_k x_k = 0 and sum nu_k = 0
    RMat c(n_aff + 1, static_cast<Eigen::Index>(support.size()));
    for (std::size_t i = 0; i < support.size(); ++i) {
      c.block(0, static_cast<Eigen::Index>(i), n_aff, 1) = library.coords.col(support[i]);
      c(n_aff, static_cast<Eigen::Index>(i)) = 1.0;
    }
    // full V: the null space of a wide matrix lives beyond the thin columns
    Eigen::JacobiSVD<RMat> svd(c, Eigen::ComputeFullV);
    const RVec nu = svd.matrixV().col(svd.matrixV().cols() - 1);
    const double null_residual = (c * nu).norm();
    if (null_residual > 1e-8 * std::max(1.0, c.norm()))
      return {MixtureWeights(weights.weights()), false};

    // walk along +nu or -nu, whichever has a positive entry, until a weight
    // hits zero
    double t_pos = std::numeric_limits<double>::infinity();
    double t_neg = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < support.size(); ++i) {
      const double wi = w[support[i]];
      if (nu(static_cast<Eigen::Index>(i)) > 1e-14)
        t_pos = std::min(t_pos, wi / nu(static_cast<Eigen::Index>(i)));
      if (nu(static_cast<Eigen::Index>(i)) < -1e-14)
        t_neg = std::min(t_neg, wi / -nu(static_cast<Eigen::Index>(i)));
    }
    const double sign = (t_pos <= t_neg) ? 1.0 : -1.0;
    const double t = std::min(t_pos, t_neg);
    if (!std::isfinite(t)) return {MixtureWeights(weights.weights()), false};
    for (std::size_t i = 0; i < support.size(); ++i)
      w[support[i]] -= t * sign * nu(static_cast<Eigen::Index>(i));
    for (double& wi : w) wi = std::max(wi, 0.0);

    const std::size_t before = support.size();
    support = support_of();
    if (support.size() >= before) return {MixtureWeights(weights.weights()), false};
  }

  // exact renormalization; drift is bounded by the walk arithmetic
  double sum = 0.0;
  for (double wi : w) sum += wi;
  for (double& wi : w) wi /= sum;
  MixtureWeights pruned(w);
  const RVec point1 = library.coords * Eigen::Map<const RVec>(w.data(), w.size());
  if ((point1 - point0).norm() > 1e-10)
    return {MixtureWeights(weights.weights()), false};
  return {std::move(pruned), true};
}

// ---------------------------------------------------------------------------
// one-step compilation

enum class Strategy { A, B };

inline std::string to_string(Strategy s) { return s == Strategy::A ? "A" : "B"; }

struct CompiledStep {
  Strategy strategy = Strategy::A;
  Channel coherent = Channel::identity(2);   // U^(tau)
  Channel baseline = Channel::identity(2);   // identity for A, B_d^FT for B
  LogicalChannelLibrary library;             // raw programmable family {G_k}
  FitResult fit;
  Channel assembled = Channel::identity(2);  // mix(library) . baseline . coherent
};

struct compile_failure : std::runtime_error {
  FitResult fit;
  compile_failure(const std::string& what, FitResult f)
      : std::runtime_error(what), fit(std::move(f)) {}
};

struct CompileOptions {
  double eta = 1e-6;       // reachability tolerance on the fit residual
  int max_iterations = 200000;
};

// Fit target ~= mix({G_k}, r) . baseline . coherent by fitting the target's
// Choi coordinates against the composed library {G_k . baseline . coherent};
// no channel is ever inverted.
inline CompiledStep compile_step(Strategy strategy, const Channel& target,
                                 const LogicalChannelLibrary& library, const Channel& baseline,
                                 const Channel& coherent, const CompileOptions& opts = {}) {
  const Channel base = compose(baseline, coherent);
  std::vector<Channel> composed;
  composed.reserve(library.size());
  for (const Channel& g : library.channels) composed.push_back(compose(g, base));
  const LogicalChannelLibrary composed_lib = LogicalChannelLibrary::from_channels(
      composed, library.labels, library.source + "*base");

  FitOptions fit_opts;
  fit_opts.eta = std::min(opts.eta, 1e-8);
  fit_opts.max_iterations = opts.max_iterations;
  FitResult fit = fit_mixture(composed_lib, target, fit_opts);
  if (fit.residual > opts.eta)
    throw compile_failure("compile_step: target outside the reachable set (residual " +
                              std::to_string(fit.residual) + " > eta " +
                              std::to_string(opts.eta) + ")",
                          fit);

  CompiledStep step{strategy, coherent, baseline, library, fit,
                    mix(composed_lib.channels, fit.weights)};
  return step;
}

// convenience: coherent part of a Hamiltonian step
inline Channel coherent_step(const Mat& hamiltonian, double tau) {
  return Channel::from_unitary(expm(cxd(0, -1) * hamiltonian * tau));
}

// Strategy-B corrected baseline: identity composed with an isotropic logical
// Pauli channel of strength p_logical.
inline Channel strategyB_baseline(int n_qubits, double p_logical) {
  PauliChannel iso = PauliChannel::identity(n_qubits);
  if (p_logical > 0.0) {
    const int m = pauli_num_labels(n_qubits);
    std::vector<double> probs(m, p_logical / (m - 1));
    probs[0] = 1.0 - p_logical;
    iso = PauliChannel(n_qubits, std::move(probs));
  }
  return Channel::from_pauli(iso);
}

}  // namespace pqec
