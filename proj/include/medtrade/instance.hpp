#pragma once

#include <string>
#include <vector>

#include "medtrade/distribution.hpp"
#include "medtrade/valuation.hpp"

namespace medtrade {

/// One bilateral-trade problem: seller quality distribution G over
/// Q = [q_lo, q_hi], buyer type distribution F over T = [t_lo, t_hi],
/// valuation v(q, t), and the seller's reserve price r.
///
/// Immutable after validation; safe for concurrent reads.
struct ProblemInstance {
  Distribution q_dist;
  Distribution t_dist;
  Valuation valuation;
  double reserve = 0.0;

  double q_lo() const { return q_dist.support_lo(); }
  double q_hi() const { return q_dist.support_hi(); }
  double t_lo() const { return t_dist.support_lo(); }
  double t_hi() const { return t_dist.support_hi(); }

  double v(double q, double t) const;
  double v_q(double q, double t) const;
  double v_t(double q, double t) const;
  double v_tt(double q, double t) const;
  double v_qt(double q, double t) const;

  /// Linear-mode coefficient alpha(q); throws std::logic_error in general mode.
  double alpha(double q) const;
  double alpha_deriv(double q) const;

  /// E_q[v(q, t)] under the prior G, by quadrature.
  /// Throws std::domain_error for t outside T.
  double prior_value(double t) const;
};

struct ValidationReport {
  struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
  };
  std::vector<Check> checks;
  MhrReport mhr;
  // recorded v_qt bounds over the validation grid (general mode)
  double v_qt_lo = 0.0, v_qt_hi = 0.0;

  bool ok() const;
  const Check* find(const std::string& name) const;
  std::string first_failure() const;
};

/// Runs every instance-level check and reports pass/fail per check:
/// non-trivial price range v(q_lo,t_lo) < r < v(q_hi,t_hi), monotone hazard
/// rate of the type distribution, positivity/monotonicity of alpha (linear
/// mode) or the valuation shape conditions on a 64x64 grid (general mode),
/// and strictly positive densities on the open supports.
///
/// Pure: the same instance always yields an identical report.
ValidationReport validate(const ProblemInstance& inst);

}  // namespace medtrade
