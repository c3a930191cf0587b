// End-to-end stroboscopic experiments: the channel-fit study (1-qubit
// dephasing targets, Strategies A and B, mismatch sweeps), the two-site
// exciton dynamics study against the exact Lindblad oracle, and the
// resource-overhead study.
//
// All studies are deterministic for a fixed spec and seed; grid results are
// merged in grid order.
#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pqec/channel.hpp"
#include "pqec/compiler.hpp"
#include "pqec/diamond.hpp"
#include "pqec/lindblad.hpp"
#include "pqec/logical_channel.hpp"
#include "pqec/resource.hpp"
#include "pqec/surface_code.hpp"

namespace pqec {

// round-trip-exact decimal formatting so CSV bytes are reproducible
inline std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// short form for labels and human-facing fields
inline std::string short_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// channel-fit study (one-qubit dephasing target)

struct FitStudySpec {
  std::vector<double> gamma_tau_grid;  // defaults to 16 log-spaced in [0.01, 0.2]
  std::vector<double> mismatch_grid;   // defaults to 7 points in [0.85, 1.15]
  NoiseModel noise{NoiseKind::dephasing_only, 0.01, 1.0};  // assumed physical noise
  int distance_a = 3;
  int distance_b = 7;
  ScalingAnsatz strategyB_ansatz{0.1, 1e-4, 1e-2, 1.0};  // p_L(7) = 1e-9
  std::uint64_t seed = 1;

  static std::vector<double> default_gamma_grid() {
    std::vector<double> g;
    const double lo = std::log(0.01), hi = std::log(0.2);
    for (int i = 0; i < 16; ++i) g.push_back(std::exp(lo + (hi - lo) * i / 15.0));
    return g;
  }
  static std::vector<double> default_mismatch_grid() {
    std::vector<double> g;
    for (int i = 0; i < 7; ++i) g.push_back(0.85 + 0.05 * i);
    return g;
  }

  void fill_defaults() {
    if (gamma_tau_grid.empty()) gamma_tau_grid = default_gamma_grid();
    if (mismatch_grid.empty()) mismatch_grid = default_mismatch_grid();
  }
};

struct FitStudyPoint {
  double gamma_tau = 0.0;
  double mismatch = 1.0;
  // ideal Pauli-frame fit (library-independent reference)
  double ideal_residual = 0.0;
  double ideal_z_weight = 0.0;
  // Strategy A: d=3 extracted library, fitted on the assumed noise, realized
  // on the mismatched noise
  double a_fit_residual = 0.0;
  double a_realized_residual = 0.0;
  double a_frame_z_weight = 0.0;
  bool a_ok = true;
  // Strategy B: strong correction (ansatz baseline at distance_b), programmed
  // frames; never consults the physical noise, so mismatch cannot move it
  double b_fit_residual = 0.0;
  bool b_ok = true;
};

struct FitStudyReport {
  FitStudySpec spec;
  std::vector<FitStudyPoint> points;

  void write_csv(std::ostream& os) const {
    os << "gamma_tau,mismatch,ideal_residual,ideal_z_weight,a_fit_residual,"
          "a_realized_residual,a_frame_z_weight,a_ok,b_fit_residual,b_ok\n";
    for (const auto& p : points)
      os << csv_num(p.gamma_tau) << ',' << csv_num(p.mismatch) << ','
         << csv_num(p.ideal_residual) << ',' << csv_num(p.ideal_z_weight) << ','
         << csv_num(p.a_fit_residual) << ',' << csv_num(p.a_realized_residual) << ','
         << csv_num(p.a_frame_z_weight) << ',' << (p.a_ok ? 1 : 0) << ','
         << csv_num(p.b_fit_residual) << ',' << (p.b_ok ? 1 : 0) << '\n';
  }
};

inline Channel dephasing_target(double gamma_tau) {
  return Channel::from_pauli(PauliChannel::dephasing((1.0 - std::exp(-gamma_tau)) / 2.0));
}

inline FitStudyReport run_channel_fit_study(FitStudySpec spec) {
  spec.fill_defaults();
  spec.noise.validate();
  if (spec.noise.kind != NoiseKind::dephasing_only)
    throw invalid_parameter_error("fit study: one-qubit dephasing target needs dephasing noise");

  const SurfaceCode code(spec.distance_a);
  const auto frames = pauli_frame_library(1);
  const double p_l_b = logical_error_rate(spec.strategyB_ansatz, spec.distance_b);
  const Channel b_baseline = strategyB_baseline(1, p_l_b);

  // Strategy-B composed library is mismatch- and gamma-independent
  std::vector<Channel> b_composed;
  for (const Channel& g : frames.channels) b_composed.push_back(compose(g, b_baseline));
  const auto b_lib = LogicalChannelLibrary::from_channels(b_composed, frames.labels,
                                                          "frames*B_FT");

  FitStudyReport report;
  report.spec = spec;
  for (double gt : spec.gamma_tau_grid)
    for (double mm : spec.mismatch_grid) {
      FitStudyPoint pt;
      pt.gamma_tau = gt;
      pt.mismatch = mm;
      const Channel target = dephasing_target(gt);

      const FitResult ideal = fit_mixture(frames, target);
      pt.ideal_residual = ideal.residual;
      pt.ideal_z_weight = ideal.weights[pauli_index("Z")];

      NoiseModel assumed = spec.noise;
      assumed.mismatch_factor = 1.0;
      NoiseModel actual = spec.noise;
      actual.mismatch_factor = mm;
      try {
        const auto lib_assumed = strategyA_library(code, assumed, EstimationMethod::exact(),
                                                   RecoveryPolicy::all_frames());
        const auto lib_actual = strategyA_library(code, actual.actual(),
                                                  EstimationMethod::exact(),
                                                  RecoveryPolicy::all_frames());
        const FitResult fit = fit_mixture(lib_assumed, target);
        pt.a_fit_residual = fit.residual;
        pt.a_frame_z_weight = fit.weights[pauli_index("Z")];
        const Channel realized = mix(lib_actual.channels, fit.weights);
        pt.a_realized_residual =
            (choi_coordinates(realized).vector - choi_coordinates(target).vector).norm();
      } catch (const std::exception&) {
        pt.a_ok = false;
      }

      try {
        const FitResult bfit = fit_mixture(b_lib, target);
        pt.b_fit_residual = bfit.residual;
      } catch (const std::exception&) {
        pt.b_ok = false;
      }
      report.points.push_back(pt);
    }
  return report;
}

// ---------------------------------------------------------------------------
// dynamics study (two-site exciton model)

struct DynamicsSpec {
  ExcitonParams params;          // nominal model: target physics and compile input
  double tau = 0.2;
  int steps = 100;
  double dephasing_mismatch = 1.0;  // true hardware dephasing rates / nominal
  std::vector<double> dwell_grid = {0.0, 0.5, 1.0, 1.5};  // native-dissipation dwell fractions
  int distance_b = 7;
  ScalingAnsatz strategyB_ansatz{0.1, 1e-4, 1e-2, 1.0};
  std::uint64_t seed = 1;

  void validate() const {
    params.validate();
    if (tau <= 0.0) throw invalid_parameter_error("dynamics: tau must be positive");
    if (steps < 1) throw invalid_parameter_error("dynamics: steps must be >= 1");
    if (dephasing_mismatch <= 0.0)
      throw invalid_parameter_error("dynamics: mismatch must be positive");
    if (dwell_grid.empty()) throw invalid_parameter_error("dynamics: empty dwell grid");
  }
};

struct TrajectoryRow {
  double time = 0.0;
  std::array<double, 4> oracle_pops{};
  double oracle_coherence = 0.0;  // |rho_{10,01}|
  double oracle_trace = 0.0;
  std::array<double, 4> a_pops{};
  double a_coherence = 0.0;
  double a_trace = 0.0;
  double a_distance = 0.0;  // (1/2)||rho_A - rho_oracle||_1
  std::array<double, 4> b_pops{};
  double b_coherence = 0.0;
  double b_trace = 0.0;
  double b_distance = 0.0;
};

struct TrajectoryReport {
  DynamicsSpec spec;
  std::vector<TrajectoryRow> rows;
  double a_fit_residual = 0.0;
  double b_fit_residual = 0.0;
  double a_max_distance = 0.0, a_final_distance = 0.0;
  double b_max_distance = 0.0, b_final_distance = 0.0;
  // per-step channel-distance interval (realized step vs exact target step)
  DiamondBounds a_step_bounds, b_step_bounds;

  void write_csv(std::ostream& os) const {
    os << "step,time";
    for (const char* who : {"oracle", "A", "B"})
      os << ',' << who << "_p00," << who << "_p01," << who << "_p10," << who << "_p11," << who
         << "_coh," << who << "_trace";
    os << ",A_dist,B_dist\n";
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto& r = rows[k];
      os << k << ',' << csv_num(r.time);
      for (double p : r.oracle_pops) os << ',' << csv_num(p);
      os << ',' << csv_num(r.oracle_coherence) << ',' << csv_num(r.oracle_trace);
      for (double p : r.a_pops) os << ',' << csv_num(p);
      os << ',' << csv_num(r.a_coherence) << ',' << csv_num(r.a_trace);
      for (double p : r.b_pops) os << ',' << csv_num(p);
      os << ',' << csv_num(r.b_coherence) << ',' << csv_num(r.b_trace);
      os << ',' << csv_num(r.a_distance) << ',' << csv_num(r.b_distance) << '\n';
    }
  }
};

namespace detail {

// dwell-fraction dissipator family of a model, composed with the coherent
// step and the 16 two-qubit Pauli frames
inline LogicalChannelLibrary dwell_frame_library(const LindbladModel& model, double tau,
                                                 const std::vector<double>& dwell_grid,
                                                 const Channel& coherent,
                                                 const std::string& source) {
  const auto frames = pauli_frame_library(2);
  std::vector<Channel> channels;
  std::vector<std::string> labels;
  for (double alpha : dwell_grid) {
    if (alpha < 0.0) throw invalid_parameter_error("dwell fraction must be >= 0");
    const Channel d_alpha = exact_step(model.dissipator_only(), alpha * tau);
    for (std::size_t f = 0; f < frames.size(); ++f) {
      channels.push_back(compose(frames.channels[f], compose(d_alpha, coherent)));
      labels.push_back(frames.labels[f] + "*D(" + short_num(alpha) + ")");
    }
  }
  return LogicalChannelLibrary::from_channels(std::move(channels), std::move(labels), source);
}

inline void fill_row(const Mat& rho, std::array<double, 4>& pops, double& coherence,
                     double& trace) {
  for (int i = 0; i < 4; ++i) pops[i] = rho(i, i).real();
  coherence = std::abs(rho(2, 1));  // |<10| rho |01>|
  trace = rho.trace().real();
}

}  // namespace detail

inline TrajectoryReport run_dynamics_study(const DynamicsSpec& spec) {
  spec.validate();
  const LindbladModel nominal = build_exciton_model(spec.params);
  const LindbladModel actual =
      build_exciton_model(spec.params.with_dephasing_scaled(spec.dephasing_mismatch));

  const Channel target = exact_step(nominal, spec.tau);
  const Channel coherent = coherent_step(nominal.hamiltonian, spec.tau);

  // Strategy A: calibrated native dissipation (assumed = nominal), realized
  // with the true rates at the fitted weights
  const auto lib_assumed = detail::dwell_frame_library(nominal, spec.tau, spec.dwell_grid,
                                                       coherent, "A_dwell_frames");
  const FitResult a_fit = fit_mixture(lib_assumed, target);
  const auto lib_actual = detail::dwell_frame_library(actual, spec.tau, spec.dwell_grid,
                                                      coherent, "A_dwell_frames_actual");
  const Channel a_step = mix(lib_actual.channels, a_fit.weights);

  // Strategy B: correct hard (ansatz baseline), then program the nominal
  // dissipator; independent of the hardware mismatch
  const double p_l_b = logical_error_rate(spec.strategyB_ansatz, spec.distance_b);
  const Channel b_baseline = strategyB_baseline(2, p_l_b);
  const Channel b_base_step = compose(b_baseline, coherent);
  const auto b_frames = pauli_frame_library(2);
  std::vector<Channel> b_channels;
  std::vector<std::string> b_labels;
  for (double alpha : spec.dwell_grid) {
    const Channel d_alpha = exact_step(nominal.dissipator_only(), alpha * spec.tau);
    for (std::size_t f = 0; f < b_frames.size(); ++f) {
      b_channels.push_back(compose(b_frames.channels[f], compose(d_alpha, b_base_step)));
      b_labels.push_back(b_frames.labels[f] + "*G(" + short_num(alpha) + ")");
    }
  }
  const auto b_lib =
      LogicalChannelLibrary::from_channels(std::move(b_channels), std::move(b_labels), "B_prog");
  const FitResult b_fit = fit_mixture(b_lib, target);
  const Channel b_step = mix(b_lib.channels, b_fit.weights);

  TrajectoryReport report;
  report.spec = spec;
  report.a_fit_residual = a_fit.residual;
  report.b_fit_residual = b_fit.residual;
  DiamondOptions dopts;
  dopts.restarts = 6;
  dopts.max_iterations = 200;
  report.a_step_bounds = diamond_distance_bounds(a_step, target, dopts);
  report.b_step_bounds = diamond_distance_bounds(b_step, target, dopts);

  const Mat oracle_prop = expm(liouvillian(nominal) * spec.tau);
  Vec v_oracle = vectorize(DensityMatrix::basis_state(4, 2).matrix());  // |10>
  Mat rho_a = unvectorize(v_oracle, 4, 4);
  Mat rho_b = rho_a;

  for (int step = 0; step <= spec.steps; ++step) {
    TrajectoryRow row;
    row.time = step * spec.tau;
    const Mat rho_oracle = unvectorize(v_oracle, 4, 4);
    detail::fill_row(rho_oracle, row.oracle_pops, row.oracle_coherence, row.oracle_trace);
    detail::fill_row(rho_a, row.a_pops, row.a_coherence, row.a_trace);
    detail::fill_row(rho_b, row.b_pops, row.b_coherence, row.b_trace);
    row.a_distance = state_trace_distance(rho_a, rho_oracle);
    row.b_distance = state_trace_distance(rho_b, rho_oracle);
    report.a_max_distance = std::max(report.a_max_distance, row.a_distance);
    report.b_max_distance = std::max(report.b_max_distance, row.b_distance);
    report.a_final_distance = row.a_distance;
    report.b_final_distance = row.b_distance;
    // every simulated state must still be a physical state
    DensityMatrix(rho_a, 1e-8, 1e-8, 1e-8);
    DensityMatrix(rho_b, 1e-8, 1e-8, 1e-8);
    report.rows.push_back(row);

    if (step == spec.steps) break;
    v_oracle = oracle_prop * v_oracle;
    rho_a = a_step.apply(rho_a);
    rho_b = b_step.apply(rho_b);
  }
  return report;
}

// ---------------------------------------------------------------------------
// resource study

struct ResourceStudySpec {
  ScalingAnsatz ansatz{1.0, 1e-3, 1e-2, 1.0};
  int n_logical = 2;
  double zeta = 0.1;
  std::vector<double> delta_tar_grid = {1e-4, 1e-3, 1e-2, 1e-1};  // per-step Delta_tar
  std::vector<double> eps_over_m_grid = {1e-7, 1e-6, 1e-5};       // closed-system eps/m
};

struct ResourceRow {
  std::string scenario;
  double delta_tar = 0.0, eps_over_m = 0.0;
  double x_a = 0.0, x_b = 0.0;
  int d_a = 0, d_b = 0;
  std::int64_t footprint_a = 0, footprint_b = 0;
  double ratio = 0.0, ratio_square_approx = 0.0;
  bool feasible = true;
};

struct ResourceReport {
  ResourceStudySpec spec;
  std::vector<ResourceRow> rows;

  void write_csv(std::ostream& os) const {
    os << "scenario,d_A,d_B,footprint_A,footprint_B,ratio,"
          "delta_tar,eps_over_m,x_A,x_B,ratio_square_approx,feasible\n";
    for (const auto& r : rows)
      os << r.scenario << ',' << r.d_a << ',' << r.d_b << ',' << r.footprint_a << ','
         << r.footprint_b << ',' << csv_num(r.ratio) << ',' << csv_num(r.delta_tar) << ','
         << csv_num(r.eps_over_m) << ',' << csv_num(r.x_a) << ',' << csv_num(r.x_b) << ','
         << csv_num(r.ratio_square_approx) << ',' << (r.feasible ? 1 : 0) << '\n';
  }
};

// Target-aware thresholds per scenario: Strategy A runs at x_A = zeta *
// Delta_tar while Strategy B (and full QEC) runs at the closed-system
// x_B = eps/m.
inline ResourceReport run_resource_study(const ResourceStudySpec& spec) {
  spec.ansatz.validate();
  ResourceReport report;
  report.spec = spec;
  for (double dt : spec.delta_tar_grid)
    for (double em : spec.eps_over_m_grid) {
      ResourceRow row;
      row.delta_tar = dt;
      row.eps_over_m = em;
      row.x_a = spec.zeta * dt;
      row.x_b = em;
      row.scenario = "dtar" + short_num(dt) + "_em" + short_num(em);
      try {
        row.d_a = distance_for_budget(spec.ansatz, row.x_a);
        row.d_b = distance_for_budget(spec.ansatz, row.x_b);
        row.footprint_a = footprint(spec.n_logical, row.d_a);
        row.footprint_b = footprint(spec.n_logical, row.d_b);
        row.ratio = savings_ratio(row.d_b, row.d_a);
        row.ratio_square_approx = savings_ratio_square_approx(row.d_b, row.d_a);
      } catch (const std::exception&) {
        row.feasible = false;
      }
      report.rows.push_back(row);
    }
  return report;
}

}  // namespace pqec
