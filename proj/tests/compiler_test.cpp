#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pqec/compiler.hpp"
#include "pqec/lindblad.hpp"

using namespace pqec;
namespace oracle = pqec::testing;

namespace {

Channel dephasing_step(double gamma_tau) {
  const double pz = (1.0 - std::exp(-gamma_tau)) / 2.0;
  return Channel::from_pauli(PauliChannel::dephasing(pz));
}

PauliChannel random_pauli_channel(CounterRng& rng, int n_qubits) {
  return PauliChannel(n_qubits, oracle::random_simplex_point(rng, pauli_num_labels(n_qubits)),
                      1e-9);
}

}  // namespace

TEST_SUITE_BEGIN("compiler");

TEST_CASE("pauli_frame_library: four unitary conjugations for one qubit") {
  const auto lib = pauli_frame_library(1);
  REQUIRE(lib.size() == 4);
  CHECK(lib.coords.rows() == 12);
  CHECK(lib.labels == std::vector<std::string>{"I", "X", "Y", "Z"});
  for (std::size_t k = 0; k < lib.size(); ++k) {
    CHECK(validate_cptp(lib.channels[k]).ok());
    CHECK((lib.coords.col(k) - choi_coordinates(lib.channels[k]).vector).norm() < 1e-12);
  }
  CHECK(pauli_frame_library(2).size() == 16);
  CHECK_THROWS_AS(pauli_frame_library(3), invalid_parameter_error);
}

TEST_CASE("pauli_frame_library: hull contains every Pauli channel") {
  const auto lib = pauli_frame_library(1);
  CounterRng rng(0xf17001);
  for (int trial = 0; trial < 50; ++trial) {
    const Channel target = Channel::from_pauli(random_pauli_channel(rng, 1));
    const FitResult fit = fit_mixture(lib, target, {1e-7, 100000, false});
    CHECK(fit.residual < 1e-10);
  }
}

TEST_CASE("pauli_frame_library: amplitude damping is outside the hull") {
  const auto lib = pauli_frame_library(1);
  const FitResult fit = fit_mixture(lib, amplitude_damping_channel(0.3));
  CHECK(fit.residual > 0.01);
  // best Pauli approximation misses by exactly the non-unital PTM entry
  CHECK(fit.residual == doctest::Approx(0.3).epsilon(1e-4));
}

TEST_CASE("reset_feedback_library: primitives behave and validate") {
  const auto lib = reset_feedback_library(1);
  REQUIRE(lib.size() == 7);
  for (const Channel& c : lib.channels) CHECK(validate_cptp(c).ok());

  const Channel reset = reset_to_zero_channel();
  CounterRng rng(0xf17002);
  for (int trial = 0; trial < 10; ++trial) {
    const Mat rho = oracle::random_density(rng, 2);
    Mat want = Mat::Zero(2, 2);
    want(0, 0) = 1.0;
    CHECK((reset.apply(rho) - want).norm() < 1e-12);
  }
  CHECK(reset_feedback_library(2).size() == 22);
}

TEST_CASE("reset_feedback_library: amplitude-damping reachability structure") {
  const auto lib = reset_feedback_library(1);
  // exact at the endpoints of the {I, AD(lambda_unit)} segment
  const FitResult at_zero = fit_mixture(lib, Channel::identity(2));
  CHECK(at_zero.residual < 1e-10);
  const FitResult at_unit = fit_mixture(lib, amplitude_damping_channel(kAmplitudeDampingUnit));
  CHECK(at_unit.residual < 1e-8);
  // strictly positive in between: AD(lambda) is not affine in lambda
  const FitResult mid = fit_mixture(lib, amplitude_damping_channel(0.1));
  CHECK(mid.residual > 1e-3);
  CHECK(mid.residual < 0.05);
}

TEST_CASE("reset_feedback_library: the achievable residual curve over lambda") {
  // the curve is zero at both segment endpoints and humped in between, set by
  // the non-affine sqrt(1 - lambda) coherence of the damping family
  const auto lib = reset_feedback_library(1);
  std::vector<double> residuals;
  for (double lambda : {0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5}) {
    const FitResult fit = fit_mixture(lib, amplitude_damping_channel(lambda));
    residuals.push_back(fit.residual);
  }
  CHECK(residuals.front() < 1e-8);
  CHECK(residuals.back() < 1e-8);
  double peak = 0.0;
  for (std::size_t i = 1; i + 1 < residuals.size(); ++i) {
    CHECK(residuals[i] > 1e-4);
    peak = std::max(peak, residuals[i]);
  }
  // the hump tops out between the endpoints, near lambda ~ 0.3
  CHECK(peak > 0.01);
  CHECK(peak < 0.05);
  CHECK(residuals[6] == doctest::Approx(peak).epsilon(0.2));
}

TEST_CASE("strategyA_library: noiseless frames reduce to exact Pauli frames") {
  const SurfaceCode code(3);
  const auto lib = strategyA_library(code, {NoiseKind::dephasing_only, 0.0, 1.0},
                                     EstimationMethod::exact(), RecoveryPolicy::all_frames());
  const auto frames = pauli_frame_library(1);
  REQUIRE(lib.size() == 4);
  CHECK(lib.coords.rows() == 12);
  for (std::size_t k = 0; k < 4; ++k)
    CHECK((lib.channels[k].choi() - frames.channels[k].choi()).norm() < 1e-12);
}

TEST_CASE("strategyA_library: baseline element equals extract_logical_channel") {
  const SurfaceCode code(3);
  NoiseModel noise{NoiseKind::dephasing_only, 0.01, 1.0};
  const auto lib = strategyA_library(code, noise, EstimationMethod::exact(),
                                     RecoveryPolicy::all_frames());
  const Channel baseline = extract_logical_channel(code, noise, EstimationMethod::exact())
                               .to_channel();
  CHECK((lib.channels[0].choi() - baseline.choi()).norm() < 1e-13);
}

TEST_CASE("fit_mixture: recovers a library element exactly") {
  CounterRng rng(0xf17003);
  std::vector<Channel> chans;
  std::vector<std::string> labels;
  for (int k = 0; k < 6; ++k) {
    chans.push_back(oracle::random_cptp(rng, 2, 2));
    labels.push_back("c" + std::to_string(k));
  }
  const auto lib = LogicalChannelLibrary::from_channels(chans, labels);
  const FitResult fit = fit_mixture(lib, chans[0]);
  CHECK(fit.residual < 1e-10);
  CHECK(fit.weights[0] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("fit_mixture: dephasing target against the frame library") {
  const double gamma_tau = 0.08;
  const double pz = (1.0 - std::exp(-gamma_tau)) / 2.0;
  const FitResult fit = fit_mixture(pauli_frame_library(1), dephasing_step(gamma_tau));
  CHECK(fit.residual < 1e-8);
  CHECK(fit.weights[pauli_index("I")] == doctest::Approx(1.0 - pz).epsilon(1e-8));
  CHECK(fit.weights[pauli_index("Z")] == doctest::Approx(pz).epsilon(1e-8));
  CHECK(fit.weights[pauli_index("X")] < 1e-10);
  CHECK(fit.weights[pauli_index("Y")] < 1e-10);
}

TEST_CASE("fit_mixture: objective is monotone and the optimum is certified") {
  CounterRng rng(0xf17004);
  std::vector<Channel> chans;
  std::vector<std::string> labels;
  for (int k = 0; k < 20; ++k) {
    chans.push_back(oracle::random_cptp(rng, 2, 2));
    labels.push_back("c" + std::to_string(k));
  }
  const auto lib = LogicalChannelLibrary::from_channels(chans, labels);
  const Channel target = oracle::random_cptp(rng, 2, 3);

  FitOptions opts;
  opts.max_iterations = 3000;
  opts.eta = 1e-9;
  opts.record_objective = true;
  const FitResult fit = fit_mixture(lib, target, opts);
  for (std::size_t t = 1; t < fit.objective_trace.size(); ++t)
    CHECK(fit.objective_trace[t] <= fit.objective_trace[t - 1] + 1e-15);

  // independent projected-gradient solver agrees on the optimal value
  const double f_star = oracle::simplex_least_squares_optimum(
      lib.coords, choi_coordinates(target).vector, 300000);
  const double f_final = 0.5 * fit.residual * fit.residual;
  CHECK(f_final <= f_star + 1e-6);
  CHECK(f_final >= f_star - 1e-8);
}

TEST_CASE("fit_mixture: exact recovery of in-hull mixture points") {
  CounterRng rng(0xf17005);
  std::vector<Channel> chans;
  std::vector<std::string> labels;
  for (int k = 0; k < 8; ++k) {
    chans.push_back(oracle::random_cptp(rng, 2, 2));
    labels.push_back("c" + std::to_string(k));
  }
  const auto lib = LogicalChannelLibrary::from_channels(chans, labels);
  for (int trial = 0; trial < 10; ++trial) {
    const MixtureWeights w(oracle::random_simplex_point(rng, 8));
    const Channel target = mix(lib.channels, w);
    const FitResult fit = fit_mixture(lib, target, {1e-7, 200000, false});
    CHECK(fit.residual < 1e-8);
    // the mixture point is recovered even if the weights differ
    const RVec want = lib.coords * Eigen::Map<const RVec>(w.weights().data(), 8);
    const RVec got =
        lib.coords * Eigen::Map<const RVec>(fit.weights.weights().data(), 8);
    CHECK((want - got).norm() < 1e-8);
  }
}

TEST_CASE("reachable set is convex: weight blends give Choi blends") {
  CounterRng rng(0xf17006);
  std::vector<Channel> chans;
  for (int k = 0; k < 5; ++k) chans.push_back(oracle::random_cptp(rng, 2, 2));
  const MixtureWeights r(oracle::random_simplex_point(rng, 5));
  const MixtureWeights rp(oracle::random_simplex_point(rng, 5));
  const double lambda = 0.3;
  std::vector<double> blend(5);
  for (int k = 0; k < 5; ++k) blend[k] = lambda * r[k] + (1 - lambda) * rp[k];
  const Mat blended = mix(chans, MixtureWeights(blend)).choi();
  const Mat want = lambda * mix(chans, r).choi() + (1 - lambda) * mix(chans, rp).choi();
  CHECK((blended - want).norm() < 1e-12);
}

TEST_CASE("caratheodory_prune: small supports pass through unchanged") {
  const auto lib = pauli_frame_library(1);
  const MixtureWeights w({0.7, 0.1, 0.1, 0.1});
  const PruneResult res = caratheodory_prune(lib, w);
  CHECK(res.pruned_ok);
  CHECK(res.weights.weights() == w.weights());
}

TEST_CASE("caratheodory_prune: duplicated channels collapse to the bound") {
  CounterRng rng(0xf17007);
  std::vector<Channel> base;
  for (int k = 0; k < 6; ++k) base.push_back(oracle::random_cptp(rng, 2, 2));
  std::vector<Channel> chans;
  std::vector<std::string> labels;
  for (int rep = 0; rep < 5; ++rep)
    for (int k = 0; k < 6; ++k) {
      chans.push_back(base[k]);
      labels.push_back("dup" + std::to_string(rep * 6 + k));
    }
  const auto lib = LogicalChannelLibrary::from_channels(chans, labels);  // 30 channels
  const MixtureWeights uniform(std::vector<double>(30, 1.0 / 30.0));
  const RVec point0 =
      lib.coords * Eigen::Map<const RVec>(uniform.weights().data(), 30);

  const PruneResult res = caratheodory_prune(lib, uniform);
  CHECK(res.pruned_ok);
  CHECK(res.weights.support_size() <= 13);
  const RVec point1 =
      lib.coords * Eigen::Map<const RVec>(res.weights.weights().data(), 30);
  CHECK((point0 - point1).norm() < 1e-10);
  double sum = 0.0;
  for (double wi : res.weights.weights()) {
    CHECK(wi >= 0.0);
    sum += wi;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("compile_step: pure unitary target with a noiseless library") {
  ExcitonParams p;
  p.gamma1 = p.gamma2 = p.gamma12 = p.kappa1 = p.kappa2 = 0.0;
  const LindbladModel m = build_exciton_model(p);
  const Channel u = coherent_step(m.hamiltonian, 0.2);
  const Channel target = exact_step(m, 0.2);

  const auto lib = pauli_frame_library(2);
  const CompiledStep step =
      compile_step(Strategy::A, target, lib, Channel::identity(4), u, {1e-8, 200000});
  CHECK(step.fit.residual < 1e-10);
  CHECK((step.assembled.choi() - target.choi()).norm() < 1e-8);
  // assembled = mix(library) . baseline . coherent
  const Channel reassembled =
      compose(mix(step.library.channels, step.fit.weights),
              compose(step.baseline, step.coherent));
  CHECK((reassembled.choi() - step.assembled.choi()).norm() < 1e-10);
}

TEST_CASE("compile_step: reachability gap raises compile_failure with the fit attached") {
  const Channel target = amplitude_damping_channel(0.3);
  const auto lib = pauli_frame_library(1);
  try {
    compile_step(Strategy::B, target, lib, Channel::identity(2), Channel::identity(2),
                 {1e-6, 50000});
    FAIL("expected compile_failure");
  } catch (const compile_failure& e) {
    CHECK(e.fit.residual > 0.01);
  }
}

TEST_CASE("amplitude-damping primitive is pinned at the unit strength") {
  // the golden fixtures and fit sweeps depend on this constant: its Choi has
  // a sqrt(1 - lambda_unit) coherence entry that is not affine in lambda
  CHECK(kAmplitudeDampingUnit == 0.5);
  const Mat j = amplitude_damping_channel(kAmplitudeDampingUnit).choi();
  CHECK(j(0, 0).real() == doctest::Approx(1.0));
  CHECK(j(0, 3).real() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(j(1, 1).real() == doctest::Approx(0.5));
  CHECK(j(3, 3).real() == doctest::Approx(0.5));
}

TEST_CASE("strategyB_baseline: isotropic Pauli noise of the requested strength") {
  const Channel b = strategyB_baseline(1, 3e-3);
  const RMat r = b.ptm();
  CHECK(r(0, 0) == doctest::Approx(1.0));
  CHECK(r(1, 1) == doctest::Approx(1.0 - 4e-3).epsilon(1e-12));
  CHECK(validate_cptp(b).ok());
  CHECK((strategyB_baseline(1, 0.0).ptm() - RMat::Identity(4, 4)).norm() < 1e-14);
}

TEST_SUITE_END();
