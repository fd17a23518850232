#include "medtrade/sim.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "medtrade/quadrature.hpp"
#include "medtrade/rng.hpp"

namespace medtrade {
namespace {

// fixed-shape reduction: totals do not depend on how runs were partitioned
double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 64) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

double stderr_of(std::span<const double> xs, double mean) {
  if (xs.size() < 2) return 0.0;
  std::vector<double> dev(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double d = xs[i] - mean;
    dev[i] = d * d;
  }
  const double ss = pairwise_sum(dev);
  const double n = static_cast<double>(xs.size());
  return std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
}

}  // namespace

SimulationResult run(const ProblemInstance& inst,
                     const ThresholdMechanism& mech, std::uint64_t n,
                     std::uint64_t seed, std::size_t n_buckets) {
  if (n < 1) throw std::invalid_argument("sim::run: need at least one run");
  std::vector<double> rev(n), util(n), traded(n), types(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    Rng rng(seed, i);
    const double q = inst.q_dist.quantile(rng.next_double());
    const double t = inst.t_dist.quantile(rng.next_double());
    types[i] = t;
    if (mech.recommends_trade(q, t)) {
      const double pb = mech.pay_buyer_at(t);
      rev[i] = pb - mech.pay_seller;
      util[i] = inst.v(q, t) - pb;
      traded[i] = 1.0;
    }
  }
  SimulationResult res;
  res.n_runs = n;
  res.seed = seed;
  res.mean_revenue = pairwise_sum(rev) / static_cast<double>(n);
  res.se_revenue = stderr_of(rev, res.mean_revenue);
  res.trade_rate = pairwise_sum(traded) / static_cast<double>(n);

  res.buyer_utility_buckets.resize(n_buckets);
  const double tlo = inst.t_lo(), span = inst.t_hi() - inst.t_lo();
  std::vector<double> sums(n_buckets, 0.0);
  std::vector<std::uint64_t> counts(n_buckets, 0);
  for (std::uint64_t i = 0; i < n; ++i) {
    auto b = static_cast<std::size_t>((types[i] - tlo) / span *
                                      static_cast<double>(n_buckets));
    b = std::min(b, n_buckets - 1);
    sums[b] += util[i];
    ++counts[b];
  }
  for (std::size_t b = 0; b < n_buckets; ++b) {
    auto& bucket = res.buyer_utility_buckets[b];
    bucket.t_lo = tlo + span * static_cast<double>(b) / static_cast<double>(n_buckets);
    bucket.t_hi = tlo + span * static_cast<double>(b + 1) / static_cast<double>(n_buckets);
    bucket.count = counts[b];
    bucket.mean_utility = counts[b] ? sums[b] / static_cast<double>(counts[b]) : 0.0;
  }
  return res;
}

DeviationEstimate run_deviation(const ProblemInstance& inst,
                                const ThresholdMechanism& mech,
                                double true_type, double report_type,
                                bool best_response, std::uint64_t n,
                                std::uint64_t seed) {
  if (true_type < inst.t_lo() || true_type > inst.t_hi() ||
      report_type < inst.t_lo() || report_type > inst.t_hi())
    throw std::domain_error("run_deviation: types outside the support");
  const double lam = mech.lambda_at(report_type);
  const double pb = mech.pay_buyer_at(report_type);
  const double mass_hi = 1.0 - inst.q_dist.cdf(lam);
  const double mass_lo = inst.q_dist.cdf(lam);

  // analytic posterior sign tests decide the deviation policy once per call
  bool buy_on_signal1 = true;  // obedient default
  bool buy_on_signal0 = false;
  if (best_response) {
    if (mass_hi > 0.0) {
      const double cond = integrate(
                              [&](double q) {
                                return inst.v(q, true_type) * inst.q_dist.pdf(q);
                              },
                              lam, inst.q_hi(), {}) /
                          mass_hi;
      buy_on_signal1 = cond - pb >= 0.0;
    }
    if (mass_lo > 0.0) {
      const double cond = integrate(
                              [&](double q) {
                                return inst.v(q, true_type) * inst.q_dist.pdf(q);
                              },
                              inst.q_lo(), lam, {}) /
                          mass_lo;
      buy_on_signal0 = cond - pb > 0.0;
    }
  }

  std::vector<double> util(n, 0.0);
  for (std::uint64_t i = 0; i < n; ++i) {
    Rng rng(seed, i);
    const double q = inst.q_dist.quantile(rng.next_double());
    const bool signal1 = q > lam;
    const bool buys = signal1 ? buy_on_signal1 : buy_on_signal0;
    if (buys) util[i] = inst.v(q, true_type) - pb;
  }
  DeviationEstimate est;
  est.n = n;
  est.mean = pairwise_sum(util) / static_cast<double>(n);
  est.se = stderr_of(util, est.mean);
  return est;
}

}  // namespace medtrade
