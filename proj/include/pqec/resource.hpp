// Closed-form fault-tolerance resource calculus: below-threshold scaling,
// target-aware distance selection, patch footprints and savings ratios.
#pragma once

#include <cmath>
#include <cstdint>

#include "pqec/channel.hpp"
#include "pqec/diamond.hpp"
#include "pqec/errors.hpp"
#include "pqec/lindblad.hpp"

namespace pqec {

struct ScalingAnsatz {
  double prefactor = 0.1;      // A
  double p_phys = 1e-3;
  double p_th = 1e-2;          // threshold rate
  double multiplicity = 1.0;   // C

  void validate() const {
    if (!(p_phys > 0.0 && p_phys < p_th))
      throw invalid_parameter_error("ScalingAnsatz: need 0 < p_phys < p_th");
    if (prefactor <= 0.0) throw invalid_parameter_error("ScalingAnsatz: A must be positive");
    if (multiplicity < 1.0) throw invalid_parameter_error("ScalingAnsatz: C must be >= 1");
  }
};

struct BudgetSpec {
  double epsilon = 0.0;     // total diamond-norm budget
  int m = 1;                // step count
  double zeta = 0.0;        // target-aware fraction, << 1
  double delta_tar = 0.0;   // per-step dissipative strength
  double eps_prog_A = 0.0;  // fitting-error allowance, Strategy A
  double nu = 0.0;          // model-mismatch allowance
  double eps_prog_B = 0.0;  // programming-error allowance, Strategy B

  void validate() const {
    if (epsilon < 0 || zeta < 0 || delta_tar < 0 || eps_prog_A < 0 || nu < 0 || eps_prog_B < 0)
      throw invalid_parameter_error("BudgetSpec: negative entry");
    if (m < 1) throw invalid_parameter_error("BudgetSpec: m must be >= 1");
    if (zeta >= 1.0) throw invalid_parameter_error("BudgetSpec: zeta must be < 1");
  }
};

// p_L(d) = A (p_phys / p_th)^((d+1)/2)
inline double logical_error_rate(const ScalingAnsatz& ansatz, int d) {
  ansatz.validate();
  if (d < 3 || d % 2 == 0)
    throw invalid_parameter_error("logical_error_rate: d must be odd and >= 3");
  return ansatz.prefactor *
         std::pow(ansatz.p_phys / ansatz.p_th, static_cast<double>(d + 1) / 2.0);
}

// closed form d(x) ~= 2 log[x/(AC)] / log(p_phys/p_th) - 1, rounded up to the
// next odd distance >= 3
inline int distance_closed_form(const ScalingAnsatz& ansatz, double x) {
  ansatz.validate();
  if (x <= 0.0) throw invalid_parameter_error("distance_closed_form: x must be positive");
  const double raw = 2.0 * std::log(x / (ansatz.prefactor * ansatz.multiplicity)) /
                         std::log(ansatz.p_phys / ansatz.p_th) -
                     1.0;
  // ceil to the next odd integer, with a small slack so exact-integer inputs
  // do not round up through float noise
  const double eps = 1e-9;
  int d = static_cast<int>(std::ceil((raw - eps - 1.0) / 2.0)) * 2 + 1;
  return d < 3 ? 3 : d;
}

// smallest odd d >= 3 with C p_L(d) <= x (relative slack 1e-12 on the
// comparison so exact-boundary inputs resolve to the intended distance)
inline int distance_for_budget(const ScalingAnsatz& ansatz, double x) {
  ansatz.validate();
  if (x <= 0.0) throw invalid_parameter_error("distance_for_budget: x must be positive");
  for (int d = 3;; d += 2) {
    if (ansatz.multiplicity * logical_error_rate(ansatz, d) <= x * (1.0 + 1e-12)) return d;
    if (d > 9999) throw numeric_error("distance_for_budget: no feasible distance");
  }
}

// Strategy A: target-aware rule.  The unwanted component C p_L(d) must fit in
// min{epsilon/m, zeta Delta_tar} after the fixed fitting and mismatch
// allowances are subtracted.
inline int strategyA_distance(const ScalingAnsatz& ansatz, const BudgetSpec& budget) {
  budget.validate();
  const double x_a = std::min(budget.epsilon / budget.m, budget.zeta * budget.delta_tar);
  const double slack = x_a - budget.eps_prog_A - budget.nu;
  if (slack <= 0.0)
    throw infeasible_budget_error("strategyA_distance: allowances exceed the budget x_A");
  return distance_for_budget(ansatz, slack);
}

// Strategy B: closed-system rule, independent of Delta_tar.
inline int strategyB_distance(const ScalingAnsatz& ansatz, const BudgetSpec& budget) {
  budget.validate();
  const double slack = budget.epsilon / budget.m - budget.eps_prog_B;
  if (slack <= 0.0)
    throw infeasible_budget_error("strategyB_distance: allowances exceed the budget x_B");
  return distance_for_budget(ansatz, slack);
}

// N_tot = n_L (2 d^2 - 1)
inline std::int64_t footprint(int n_logical, int d) {
  if (d < 3 || d % 2 == 0) throw invalid_parameter_error("footprint: d must be odd and >= 3");
  if (n_logical < 1) throw invalid_parameter_error("footprint: n_logical must be >= 1");
  return static_cast<std::int64_t>(n_logical) * (2 * static_cast<std::int64_t>(d) * d - 1);
}

inline double savings_ratio(int d_b, int d_a) {
  return static_cast<double>(2 * d_b * d_b - 1) / static_cast<double>(2 * d_a * d_a - 1);
}

inline double savings_ratio_square_approx(int d_b, int d_a) {
  const double q = static_cast<double>(d_b) / static_cast<double>(d_a);
  return q * q;
}

// Delta_tar(tau): diamond-norm size of the dissipative step (Hamiltonian
// zeroed), reported unhalved as a (lower, upper) interval.
struct DeltaTarBounds {
  double lower = 0.0;
  double upper = 0.0;
  bool converged = true;
};

inline DeltaTarBounds delta_tar(const LindbladModel& model, double tau,
                                const DiamondOptions& opts = {}) {
  const LindbladModel diss = model.dissipator_only();
  const Channel step = exact_step(diss, tau);
  const Channel id = Channel::identity(model.dim);
  const DiamondBounds b = diamond_distance_bounds(step, id, opts);
  return {2.0 * b.lower, 2.0 * b.upper, b.converged};
}

// Chaining check: the m-step distance lower bound must sit below m times the
// per-step upper bound.
struct MultistepReport {
  int m = 1;
  double per_step_lower = 0.0;
  double per_step_upper = 0.0;
  double m_step_lower = 0.0;
  double m_step_upper = 0.0;
  double chained_bound = 0.0;  // m * per_step_upper
  bool chaining_holds = false;
};

inline Channel channel_power(const Channel& c, int m) {
  if (m < 1) throw invalid_parameter_error("channel_power: m must be >= 1");
  RMat acc = c.ptm();
  RMat base = acc;
  // PTMs multiply under composition
  acc = RMat::Identity(base.rows(), base.cols());
  int e = m;
  while (e > 0) {
    if (e & 1) acc = acc * base;
    base = base * base;
    e >>= 1;
  }
  return Channel::from_ptm(acc, 1e-8);
}

inline MultistepReport multistep_error_check(const Channel& step_sim, const Channel& step_tar,
                                             int m, const DiamondOptions& opts = {}) {
  MultistepReport rep;
  rep.m = m;
  const DiamondBounds per = diamond_distance_bounds(step_sim, step_tar, opts);
  rep.per_step_lower = per.lower;
  rep.per_step_upper = per.upper;
  const DiamondBounds multi =
      diamond_distance_bounds(channel_power(step_sim, m), channel_power(step_tar, m), opts);
  rep.m_step_lower = multi.lower;
  rep.m_step_upper = multi.upper;
  rep.chained_bound = m * per.upper;
  rep.chaining_holds = rep.m_step_lower <= rep.chained_bound + 1e-9;
  if (!rep.chaining_holds)
    throw numeric_error("multistep_error_check: chaining bound violated; "
                        "metric implementation bug");
  return rep;
}

}  // namespace pqec
