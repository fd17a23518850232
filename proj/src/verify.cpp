#include "medtrade/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "medtrade/quadrature.hpp"
#include "medtrade/solver.hpp"

namespace medtrade {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i)
    xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  xs.front() = lo;
  xs.back() = hi;
  return xs;
}

struct Worst {
  double value = kNegInf;
  double t = 0.0, t_report = 0.0, q = 0.0;
  void update_t(double v, double at_t) {
    if (v > value) {
      value = v;
      t = at_t;
    }
  }
  void update_tt(double v, double at_t, double at_rep) {
    if (v > value) {
      value = v;
      t = at_t;
      t_report = at_rep;
    }
  }
  void update_q(double v, double at_q) {
    if (v > value) {
      value = v;
      q = at_q;
    }
  }
};

ConstraintResult result_t(std::string name, const Worst& w) {
  ConstraintResult r;
  r.name = std::move(name);
  r.worst_violation = w.value;
  r.at_t = w.t;
  r.has_t = true;
  return r;
}

ConstraintResult result_q(std::string name, const Worst& w) {
  ConstraintResult r;
  r.name = std::move(name);
  r.worst_violation = w.value;
  r.at_q = w.q;
  r.has_q = true;
  return r;
}

}  // namespace

const ConstraintResult* VerificationReport::find(std::string_view name) const {
  for (const auto& c : constraints)
    if (c.name == name) return &c;
  return nullptr;
}

std::vector<ConstraintResult> check_ir(const ProblemInstance& inst,
                                       const ThresholdMechanism& mech,
                                       const VerifyOptions& opt) {
  const auto ts = linspace(inst.t_lo(), inst.t_hi(), opt.t_points);
  const auto qs = linspace(inst.q_lo(), inst.q_hi(), opt.q_points);
  Worst buyer, seller;
  for (double t : ts) buyer.update_t(-buyer_utility(inst, mech, t), t);
  for (double q : qs) seller.update_q(-seller_surplus(inst, mech, q), q);
  return {result_t("ir_buyer", buyer), result_q("ir_seller", seller)};
}

std::vector<ConstraintResult> check_obedience(const ProblemInstance& inst,
                                              const ThresholdMechanism& mech,
                                              const VerifyOptions& opt) {
  const auto ts = linspace(inst.t_lo(), inst.t_hi(), opt.t_points);
  const auto qs = linspace(inst.q_lo(), inst.q_hi(), opt.q_points);
  Worst sig1, sig0, pay;
  for (double t : ts) {
    const double u = buyer_utility(inst, mech, t);
    sig1.update_t(-u, t);
    sig0.update_t(inst.prior_value(t) - mech.pay_buyer_at(t) - u, t);
  }
  for (double q : qs)
    pay.update_q(std::fabs(mech.pay_seller - inst.reserve), q);
  return {result_t("obedience_signal1", sig1),
          result_t("obedience_signal0", sig0),
          result_q("seller_payment_equals_reserve", pay)};
}

std::vector<ConstraintResult> check_truthfulness(const ProblemInstance& inst,
                                                 const ThresholdMechanism& mech,
                                                 const VerifyOptions& opt) {
  const auto ts = linspace(inst.t_lo(), inst.t_hi(), opt.t_points);
  const std::size_t n = ts.size();
  const bool linear = inst.valuation.is_linear();

  std::vector<double> u(n), vbar(n), lam(n), pb(n), mass(n), awt(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = buyer_utility(inst, mech, ts[i]);
    vbar[i] = inst.prior_value(ts[i]);
    lam[i] = mech.lambda_at(ts[i]);
    pb[i] = mech.pay_buyer_at(ts[i]);
    mass[i] = 1.0 - inst.q_dist.cdf(lam[i]);
    if (linear)
      // type-independent weighted trade mass: integral of alpha g above lambda
      awt[i] = (lam[i] >= inst.q_hi())
                   ? 0.0
                   : integrate(
                         [&](double q) {
                           return inst.alpha(q) * inst.q_dist.pdf(q);
                         },
                         lam[i], inst.q_hi(), {});
  }

  Worst raw, maxform;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double udev;
      if (linear) {
        udev = ts[i] * awt[j] - pb[j] * mass[j];
      } else if (lam[j] >= inst.q_hi()) {
        udev = 0.0;
      } else {
        udev = integrate(
            [&](double q) {
              return (inst.v(q, ts[i]) - pb[j]) * inst.q_dist.pdf(q);
            },
            lam[j], inst.q_hi(), {});
      }
      const double rhs_raw = std::max(udev, 0.0) +
                             std::max(0.0, vbar[i] - pb[j] - udev);
      raw.update_tt(rhs_raw - u[i], ts[i], ts[j]);
      const double rhs_max = std::max(udev, vbar[i] - pb[j]);
      maxform.update_tt(rhs_max - u[i], ts[i], ts[j]);
    }
  }
  ConstraintResult r1 = result_t("truthfulness", raw);
  r1.at_t_report = raw.t_report;
  r1.has_t_report = true;
  ConstraintResult r2 = result_t("truthfulness_maxform", maxform);
  r2.at_t_report = maxform.t_report;
  r2.has_t_report = true;
  return {r1, r2};
}

std::vector<ConstraintResult> check_structure(const ProblemInstance& inst,
                                              const ThresholdMechanism& mech,
                                              const VerifyOptions& opt) {
  const auto ts = linspace(inst.t_lo(), inst.t_hi(), opt.t_points);
  const auto qs = linspace(inst.q_lo(), inst.q_hi(), opt.q_points);
  const std::size_t n = ts.size();

  std::vector<double> lam(n), rb_v(n), pb(n);
  for (std::size_t i = 0; i < n; ++i) {
    lam[i] = mech.lambda_at(ts[i]);
    rb_v[i] = r_b(inst, mech, ts[i]);
    pb[i] = mech.pay_buyer_at(ts[i]);
  }

  Worst lam_up, rb_down, pb_up, su;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    lam_up.update_t(lam[i + 1] - lam[i], ts[i]);
    rb_down.update_t(rb_v[i] - rb_v[i + 1], ts[i]);
    pb_up.update_t(pb[i + 1] - pb[i], ts[i]);
  }
  for (double q : qs) su.update_q(std::fabs(seller_surplus(inst, mech, q)), q);

  // strict decrease of P_b on the open interval (t1, t2)
  double min_slope = std::numeric_limits<double>::infinity();
  double at = mech.t1;
  std::size_t interior = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (ts[i] > mech.t1 && ts[i + 1] < mech.t2) {
      ++interior;
      const double slope = (pb[i + 1] - pb[i]) / (ts[i + 1] - ts[i]);
      if (slope < min_slope) {
        min_slope = slope;
        at = ts[i];
      }
    }
  }
  ConstraintResult strict;
  strict.name = "pb_strict_decrease";
  strict.has_t = true;
  strict.at_t = at;
  if (interior == 0) {
    strict.worst_violation = -1.0;  // vacuous interval
    strict.aux = 0.0;
  } else {
    strict.worst_violation = min_slope + 1e-9;
    strict.aux = min_slope;
  }

  return {result_t("lambda_monotone", lam_up), result_t("rb_monotone", rb_down),
          result_t("pb_monotone", pb_up), strict,
          result_q("seller_surplus_zero", su)};
}

VerificationReport certify(const ProblemInstance& inst,
                           const ThresholdMechanism& mech,
                           const VerifyOptions& opt) {
  VerificationReport report;
  report.t_points = opt.t_points;
  report.q_points = opt.q_points;
  report.tolerance = opt.tolerance;
  for (auto&& group :
       {check_ir(inst, mech, opt), check_obedience(inst, mech, opt),
        check_truthfulness(inst, mech, opt), check_structure(inst, mech, opt)})
    for (auto&& c : group) report.constraints.push_back(std::move(c));
  report.feasible =
      std::all_of(report.constraints.begin(), report.constraints.end(),
                  [&](const ConstraintResult& c) {
                    return c.worst_violation <= opt.tolerance;
                  });
  return report;
}

}  // namespace medtrade
