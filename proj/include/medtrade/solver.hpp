#pragma once

#include <cstddef>
#include <functional>
#include <utility>

#include "medtrade/mechanism.hpp"

namespace medtrade {

struct SolveOptions {
  std::size_t grid_size = 2049;   ///< base uniform grid over T
  double interp_tol = 1e-9;       ///< node-insertion budget for lambda/P_b interpolation
  std::size_t max_nodes = 400000;
  double quad_abs_tol = 1e-12;
  double quad_rel_tol = 1e-10;
  double root_tol_scale = 1e-10;  ///< bisection resolution, times the support span
};

/// Virtual surplus eta(q, t) = v(q,t) - v_t(q,t) * (1-F(t))/f(t) - r.
/// In linear mode this is alpha(q) * [t - (1-F)/f] - r.
double eta(const ProblemInstance& inst, double q, double t);

/// (d eta/dq, d eta/dt). Under MHR the t-partial is strictly positive.
std::pair<double, double> eta_partials(const ProblemInstance& inst, double q,
                                       double t);

/// Threshold lambda(t): q_lo if eta(q_lo, t) >= 0, q_hi if eta(q_hi, t) <= 0,
/// otherwise the unique root of eta(., t) by bisection.
double threshold(const ProblemInstance& inst, double t);

/// (t1, t2): t1 = inf{t : lambda(t) < q_hi}, t2 = sup{t : lambda(t) > q_lo},
/// located as roots of eta at the support corners.
std::pair<double, double> cutoffs(const ProblemInstance& inst);

/// R_b(t) = integral over (lambda(t), q_hi] of v_t(q, t) g(q) dq.
double r_b(const ProblemInstance& inst, const ThresholdMechanism& mech,
           double t);

/// Optimal buyer payment at t: E[v(q,t) | q > lambda(t)] minus the accrued
/// information rent over (1 - G(lambda(t))); constant v(q_hi, t1) below t1.
double pay_buyer(const ProblemInstance& inst, const ThresholdMechanism& mech,
                 double t);

/// U_b(t) = integral over (lambda(t), q_hi] of [v(q,t) - P_b(t)] g(q) dq.
double buyer_utility(const ProblemInstance& inst,
                     const ThresholdMechanism& mech, double t);

/// Utility of true type t reporting t_report and obeying the trade signal.
double misreport_utility(const ProblemInstance& inst,
                         const ThresholdMechanism& mech, double t,
                         double t_report);

/// Pr_t[pi(q, t) = 1] for a fixed quality q.
double trade_probability(const ProblemInstance& inst,
                         const ThresholdMechanism& mech, double q);

/// SU_s(q) = [P_s - r] * Pr_t[pi = 1]; identically zero when P_s = r.
double seller_surplus(const ProblemInstance& inst,
                      const ThresholdMechanism& mech, double q);

/// Mediator revenue by direct quadrature of pi * (P_b(t) - r) f g.
double revenue(const ProblemInstance& inst, const ThresholdMechanism& mech);

/// Revenue in the rewritten form -U_b(t_lo) + double integral of eta pi g f.
/// Agrees with revenue() for envelope payments.
double revenue_rewrite(const ProblemInstance& inst,
                       const ThresholdMechanism& mech);

/// Builds the revenue-optimal threshold mechanism. Throws assumption_error
/// (naming the failed check) if the instance does not validate, including
/// the monotone hazard rate requirement.
ThresholdMechanism solve(const ProblemInstance& inst,
                         const SolveOptions& opt = {});

/// Assembles a mechanism with envelope payments for an arbitrary
/// non-increasing threshold function (perturbation studies, adversarial
/// fixtures). Skips validation.
ThresholdMechanism solve_with_threshold(
    const ProblemInstance& inst, const std::function<double(double)>& lambda,
    const SolveOptions& opt = {});

}  // namespace medtrade
