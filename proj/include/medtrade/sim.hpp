#pragma once

#include <cstdint>
#include <vector>

#include "medtrade/mechanism.hpp"

namespace medtrade {

/// The two signals of the binary experiment: (1,1) recommends trade to both
/// agents, (0,0) recommends no trade.
enum class Signal { TradeTrade, NoNo };

struct UtilityBucket {
  double t_lo = 0.0, t_hi = 0.0;
  std::uint64_t count = 0;
  double mean_utility = 0.0;
};

struct SimulationResult {
  std::uint64_t n_runs = 0;
  double mean_revenue = 0.0;
  double se_revenue = 0.0;  ///< sample stdev / sqrt(n_runs)
  double trade_rate = 0.0;
  std::vector<UtilityBucket> buyer_utility_buckets;
  std::uint64_t seed = 0;
};

/// Executes the direct mechanism protocol n times: sample (q, t), signal per
/// pi(q, t), both agents obey, transfers P_b(t) / P_s on trade. Runs are
/// keyed by (seed, run index); aggregation uses pairwise summation, so the
/// result is bit-identical for a fixed seed under any partition.
SimulationResult run(const ProblemInstance& inst,
                     const ThresholdMechanism& mech, std::uint64_t n,
                     std::uint64_t seed, std::size_t n_buckets = 20);

struct DeviationEstimate {
  double mean = 0.0;
  double se = 0.0;
  std::uint64_t n = 0;
};

/// Simulates a buyer of true_type reporting report_type. With best_response,
/// the buyer plays the better of obey/deviate per signal using the analytic
/// posterior payoff sign (no nested estimation); otherwise the buyer obeys.
DeviationEstimate run_deviation(const ProblemInstance& inst,
                                const ThresholdMechanism& mech,
                                double true_type, double report_type,
                                bool best_response, std::uint64_t n,
                                std::uint64_t seed);

}  // namespace medtrade
