#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "medtrade/mechanism.hpp"

namespace medtrade {

struct VerifyOptions {
  std::size_t t_points = 201;
  std::size_t q_points = 201;
  /// Feasibility tolerance; an order above the quadrature stack so that true
  /// mechanisms never false-fail.
  double tolerance = 1e-7;
};

/// Signed worst violation of one constraint family over the scan grid.
/// Negative values are satisfaction margins; the argmax location is kept so
/// adversarial fixtures stay debuggable.
struct ConstraintResult {
  std::string name;
  double worst_violation = 0.0;
  double at_t = 0.0;
  double at_t_report = 0.0;
  double at_q = 0.0;
  bool has_t = false, has_t_report = false, has_q = false;
  /// Extra diagnostic (e.g. the minimum P_b slope for the strict-decrease
  /// claim); meaning depends on the constraint.
  double aux = 0.0;
};

struct VerificationReport {
  std::vector<ConstraintResult> constraints;
  std::size_t t_points = 0, q_points = 0;
  double tolerance = 0.0;
  bool feasible = false;

  const ConstraintResult* find(std::string_view name) const;
};

/// IR: U_b(t) >= 0 over the t-grid and SU_s(q) >= 0 over the q-grid.
std::vector<ConstraintResult> check_ir(const ProblemInstance& inst,
                                       const ThresholdMechanism& mech,
                                       const VerifyOptions& opt = {});

/// Obedience: U_b(t) >= 0 (signal 1), U_b(t) >= v(t) - P_b(t) (signal 0),
/// and P_s(q) = r for the seller.
std::vector<ConstraintResult> check_obedience(const ProblemInstance& inst,
                                              const ThresholdMechanism& mech,
                                              const VerifyOptions& opt = {});

/// Truthfulness over every (t, t') grid pair. "truthfulness" is the original
/// non-linear form max{U_b(t';t),0} + max{0, v(t)-P_b(t')-U_b(t';t)};
/// "truthfulness_maxform" is the reduced max{U_b(t';t), v(t)-P_b(t')} form,
/// kept as a consistency check of the case analysis. The seller side reduces
/// to SU_s constant (zero), reported under check_structure.
std::vector<ConstraintResult> check_truthfulness(
    const ProblemInstance& inst, const ThresholdMechanism& mech,
    const VerifyOptions& opt = {});

/// Structural claims of the optimal mechanism: lambda non-increasing, R_b
/// non-decreasing, P_b non-increasing and strictly decreasing on (t1, t2)
/// (aux carries the minimum finite-difference slope), SU_s identically zero.
std::vector<ConstraintResult> check_structure(const ProblemInstance& inst,
                                              const ThresholdMechanism& mech,
                                              const VerifyOptions& opt = {});

/// Runs every check; feasible iff all worst violations are within tolerance.
VerificationReport certify(const ProblemInstance& inst,
                           const ThresholdMechanism& mech,
                           const VerifyOptions& opt = {});

}  // namespace medtrade
