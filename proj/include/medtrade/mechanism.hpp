#pragma once

#include <cstddef>
#include <vector>

#include "medtrade/instance.hpp"

namespace medtrade {

/// Threshold mechanism (pi, P_b, P_s): recommend trade iff the quality
/// exceeds a type-dependent threshold lambda(t), charge the buyer P_b(t) and
/// pay the seller the constant P_s on trade.
///
/// lambda, R_b, its running integral, and P_b are sampled on a shared sorted
/// grid over T (uniform base grid plus the cutoffs t1/t2 plus error-driven
/// refinement nodes) and evaluated by piecewise-linear interpolation.
/// Immutable once assembled.
struct ThresholdMechanism {
  ProblemInstance instance;

  std::vector<double> grid;     ///< sorted t nodes
  std::vector<double> lambda;   ///< threshold at nodes, within [q_lo, q_hi]
  std::vector<double> rb;       ///< R_b at nodes
  std::vector<double> cum_rb;   ///< integral of R_b from t_lo to each node
  std::vector<double> pay;      ///< buyer payment at nodes

  double t1 = 0.0;  ///< lowest type recommended to buy with positive probability
  double t2 = 0.0;  ///< highest type with lambda(t) > q_lo
  double pay_seller = 0.0;

  double lambda_at(double t) const;
  double pay_buyer_at(double t) const;
  double r_b_at(double t) const;
  double cum_r_b_at(double t) const;

  /// Signal rule: trade iff q > lambda(t); the tie q == lambda(t) maps to
  /// no-trade (measure zero, fixed for determinism).
  bool recommends_trade(double q, double t) const {
    return q > lambda_at(t);
  }

  std::size_t size() const { return grid.size(); }
};

/// View of the mechanism's signaling scheme as the binary experiment
/// pi(q, t) in {0, 1}.
struct SignalRule {
  const ThresholdMechanism* mech = nullptr;
  double pi(double q, double t) const {
    return mech->recommends_trade(q, t) ? 1.0 : 0.0;
  }
};

}  // namespace medtrade
