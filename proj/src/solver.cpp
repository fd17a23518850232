#include "medtrade/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "medtrade/errors.hpp"
#include "medtrade/quadrature.hpp"
#include "medtrade/rootfind.hpp"

namespace medtrade {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMassFloor = 1e-12;  // 1-G(lambda) below this counts as no trade

double eta_with_ih(const ProblemInstance& inst, double q, double t,
                   double ih) {
  if (inst.valuation.is_linear())
    return inst.alpha(q) * (t - ih) - inst.reserve;
  if (std::isinf(ih)) return -kInf;
  return inst.v(q, t) - inst.v_t(q, t) * ih - inst.reserve;
}

double threshold_with_ih(const ProblemInstance& inst, double t, double ih) {
  const double qlo = inst.q_lo(), qhi = inst.q_hi();
  auto e = [&](double q) { return eta_with_ih(inst, q, t, ih); };
  if (e(qlo) >= 0.0) return qlo;
  if (e(qhi) <= 0.0) return qhi;
  return bisect(e, qlo, qhi, 1e-10 * (qhi - qlo));
}

// R_b and payment pieces for a given threshold value.
double rb_from_lambda(const ProblemInstance& inst, double lam, double t,
                      const QuadratureOptions& qopt) {
  if (lam >= inst.q_hi()) return 0.0;
  return integrate(
      [&](double q) { return inst.v_t(q, t) * inst.q_dist.pdf(q); }, lam,
      inst.q_hi(), qopt);
}

double value_mass_from_lambda(const ProblemInstance& inst, double lam,
                              double t, const QuadratureOptions& qopt) {
  if (lam >= inst.q_hi()) return 0.0;
  return integrate([&](double q) { return inst.v(q, t) * inst.q_dist.pdf(q); },
                   lam, inst.q_hi(), qopt);
}

struct Assembler {
  const ProblemInstance& inst;
  const std::function<double(double)>& lam_eval;
  const SolveOptions& opt;
  QuadratureOptions qopt;   // conditional-expectation integrals
  QuadratureOptions segopt; // per-segment R_b integrals

  double rb_exact(double x) const {
    return rb_from_lambda(inst, lam_eval(x), x, qopt);
  }

  ThresholdMechanism build(double t1, double t2, bool strict) const {
    const double tlo = inst.t_lo(), thi = inst.t_hi();
    const double span = thi - tlo;
    const double qhi = inst.q_hi();
    const double min_len = 1e-9 * span;

    // seed nodes: uniform base grid with the cutoffs snapped in exactly
    std::vector<double> nodes;
    const std::size_t n = std::max<std::size_t>(opt.grid_size, 9);
    nodes.reserve(n + 2);
    for (std::size_t i = 0; i < n; ++i)
      nodes.push_back(tlo + span * static_cast<double>(i) /
                                static_cast<double>(n - 1));
    for (double cut : {t1, t2}) {
      auto it = std::lower_bound(nodes.begin(), nodes.end(), cut);
      if (it != nodes.end() && std::fabs(*it - cut) < 1e-9 * span)
        *it = cut;
      else if (it != nodes.begin() && std::fabs(*(it - 1) - cut) < 1e-9 * span)
        *(it - 1) = cut;
      else
        nodes.insert(it, cut);
    }
    nodes.front() = tlo;
    nodes.back() = thi;

    std::vector<double> lam(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) lam[i] = lam_eval(nodes[i]);

    // error-driven refinement of the lambda sampling
    for (int pass = 0; pass < 48; ++pass) {
      std::vector<double> nt, nl;
      for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        if (nodes.size() + nt.size() >= opt.max_nodes) break;
        const double a = nodes[i], b = nodes[i + 1];
        if (b - a <= min_len) continue;
        const double m = 0.5 * (a + b);
        const double lm = lam_eval(m);
        if (std::fabs(lm - 0.5 * (lam[i] + lam[i + 1])) > opt.interp_tol) {
          nt.push_back(m);
          nl.push_back(lm);
        }
      }
      if (nt.empty()) break;
      merge_nodes(nodes, lam, nt, nl);
    }

    // clamp fp noise: lambda stays within [q_lo, q_hi] and non-increasing
    for (double& l : lam) l = std::min(std::max(l, inst.q_lo()), qhi);
    for (std::size_t i = 1; i < lam.size(); ++i)
      lam[i] = std::min(lam[i], lam[i - 1]);

    std::vector<double> rb(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i)
      rb[i] = rb_from_lambda(inst, lam[i], nodes[i], qopt);

    std::vector<double> seg(nodes.size() - 1);
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
      seg[i] = (nodes[i + 1] <= t1)
                   ? 0.0
                   : integrate([this](double x) { return rb_exact(x); },
                               nodes[i], nodes[i + 1], segopt);

    std::vector<double> cum = prefix(seg);
    const double pay_below = inst.v(qhi, t1);
    double cum_t1 = cum_at(nodes, cum, t1);

    auto pay_formula = [&](double t, double lam_t, double cum_t) {
      if (t < t1) return pay_below;
      const double mass = 1.0 - inst.q_dist.cdf(lam_t);
      if (mass < kMassFloor) return pay_below;
      const double cond = value_mass_from_lambda(inst, lam_t, t, qopt) / mass;
      return cond - (cum_t - cum_t1) / mass;
    };

    std::vector<double> pay(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i)
      pay[i] = pay_formula(nodes[i], lam[i], cum[i]);

    // second refinement pass driven by the payment interpolation error
    for (int pass = 0; pass < 24; ++pass) {
      std::vector<double> nt, nl, nr, np;
      std::vector<std::size_t> at;
      for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        if (nodes.size() + nt.size() >= opt.max_nodes) break;
        const double a = nodes[i], b = nodes[i + 1];
        if (b <= t1 || b - a <= min_len) continue;
        const double m = 0.5 * (a + b);
        const double lm = lam_eval(m);
        const double cm =
            cum[i] + ((m <= t1) ? 0.0
                                : integrate([this](double x) { return rb_exact(x); },
                                            a, m, segopt));
        const double pm = pay_formula(m, lm, cm);
        const double predicted = 0.5 * (pay[i] + pay[i + 1]);
        if (std::fabs(pm - predicted) >
            opt.interp_tol * std::max(1.0, std::fabs(pm))) {
          nt.push_back(m);
          nl.push_back(lm);
          nr.push_back(rb_from_lambda(inst, lm, m, qopt));
          np.push_back(pm);
          at.push_back(i);
        }
      }
      if (nt.empty()) break;
      insert_full(nodes, lam, rb, pay, seg, nt, nl, nr, np, at, t1);
      cum = prefix(seg);
      cum_t1 = cum_at(nodes, cum, t1);
    }

    ThresholdMechanism mech{inst,
                            std::move(nodes),
                            std::move(lam),
                            std::move(rb),
                            prefix(seg),
                            std::move(pay),
                            t1,
                            t2,
                            inst.reserve};
    if (strict) {
      if (!(mech.t1 >= tlo && mech.t1 < mech.t2 && mech.t2 <= thi))
        throw std::logic_error("solve: cutoff ordering t_lo <= t1 < t2 <= t_hi failed");
    }
    return mech;
  }

 private:
  static std::vector<double> prefix(const std::vector<double>& seg) {
    std::vector<double> cum(seg.size() + 1, 0.0);
    for (std::size_t i = 0; i < seg.size(); ++i) cum[i + 1] = cum[i] + seg[i];
    return cum;
  }

  static double cum_at(const std::vector<double>& nodes,
                       const std::vector<double>& cum, double t) {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), t);
    if (it == nodes.end()) return cum.back();
    return cum[static_cast<std::size_t>(it - nodes.begin())];
  }

  static void merge_nodes(std::vector<double>& nodes, std::vector<double>& lam,
                          const std::vector<double>& nt,
                          const std::vector<double>& nl) {
    std::vector<double> mn, ml;
    mn.reserve(nodes.size() + nt.size());
    ml.reserve(nodes.size() + nt.size());
    std::size_t i = 0, j = 0;
    while (i < nodes.size() || j < nt.size()) {
      if (j >= nt.size() || (i < nodes.size() && nodes[i] <= nt[j])) {
        mn.push_back(nodes[i]);
        ml.push_back(lam[i]);
        ++i;
      } else {
        mn.push_back(nt[j]);
        ml.push_back(nl[j]);
        ++j;
      }
    }
    nodes.swap(mn);
    lam.swap(ml);
  }

  // insert payment-pass midpoints, splitting the affected R_b segments
  void insert_full(std::vector<double>& nodes, std::vector<double>& lam,
                   std::vector<double>& rb, std::vector<double>& pay,
                   std::vector<double>& seg, const std::vector<double>& nt,
                   const std::vector<double>& nl, const std::vector<double>& nr,
                   const std::vector<double>& np,
                   const std::vector<std::size_t>& at, double t1) const {
    std::vector<double> mn, ml, mr, mp, ms;
    const std::size_t total = nodes.size() + nt.size();
    mn.reserve(total);
    ml.reserve(total);
    mr.reserve(total);
    mp.reserve(total);
    ms.reserve(total - 1);
    std::size_t j = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      mn.push_back(nodes[i]);
      ml.push_back(lam[i]);
      mr.push_back(rb[i]);
      mp.push_back(pay[i]);
      if (i + 1 == nodes.size()) break;
      if (j < at.size() && at[j] == i) {
        const double m = nt[j];
        mn.push_back(m);
        ml.push_back(nl[j]);
        mr.push_back(nr[j]);
        mp.push_back(np[j]);
        const double left =
            (m <= t1) ? 0.0
                      : integrate([this](double x) { return rb_exact(x); },
                                  nodes[i], m, segopt);
        const double right =
            (nodes[i + 1] <= t1)
                ? 0.0
                : integrate([this](double x) { return rb_exact(x); }, m,
                            nodes[i + 1], segopt);
        ms.push_back(left);
        ms.push_back(right);
        ++j;
      } else {
        ms.push_back(seg[i]);
      }
    }
    nodes.swap(mn);
    lam.swap(ml);
    rb.swap(mr);
    pay.swap(mp);
    seg.swap(ms);
  }
};

ThresholdMechanism assemble(const ProblemInstance& inst,
                            const std::function<double(double)>& lam_eval,
                            double t1, double t2, const SolveOptions& opt,
                            bool strict) {
  QuadratureOptions qopt{opt.quad_abs_tol, opt.quad_rel_tol, 48};
  QuadratureOptions segopt{1e-13, 1e-11, 48};
  Assembler as{inst, lam_eval, opt, qopt, segopt};
  return as.build(t1, t2, strict);
}

}  // namespace

double eta(const ProblemInstance& inst, double q, double t) {
  return eta_with_ih(inst, q, t, inst.t_dist.inverse_hazard(t));
}

std::pair<double, double> eta_partials(const ProblemInstance& inst, double q,
                                       double t) {
  const double ih = inst.t_dist.inverse_hazard(t);
  const double ihd = inst.t_dist.inverse_hazard_deriv(t);
  if (inst.valuation.is_linear()) {
    return {inst.alpha_deriv(q) * (t - ih), inst.alpha(q) * (1.0 - ihd)};
  }
  const double dq = inst.v_q(q, t) - inst.v_qt(q, t) * ih;
  const double dt =
      inst.v_t(q, t) - inst.v_tt(q, t) * ih - inst.v_t(q, t) * ihd;
  return {dq, dt};
}

double threshold(const ProblemInstance& inst, double t) {
  return threshold_with_ih(inst, t, inst.t_dist.inverse_hazard(t));
}

std::pair<double, double> cutoffs(const ProblemInstance& inst) {
  const double tlo = inst.t_lo(), thi = inst.t_hi();
  const double tol = 1e-10 * (thi - tlo);
  auto at_qhi = [&](double t) { return eta(inst, inst.q_hi(), t); };
  auto at_qlo = [&](double t) { return eta(inst, inst.q_lo(), t); };
  const double t1 = (at_qhi(tlo) >= 0.0) ? tlo : bisect(at_qhi, tlo, thi, tol);
  const double t2 = (at_qlo(thi) <= 0.0) ? thi : bisect(at_qlo, tlo, thi, tol);
  return {t1, t2};
}

double r_b(const ProblemInstance& inst, const ThresholdMechanism& mech,
           double t) {
  return rb_from_lambda(inst, mech.lambda_at(t), t, {});
}

double pay_buyer(const ProblemInstance& inst, const ThresholdMechanism& mech,
                 double t) {
  if (t < mech.t1) return inst.v(inst.q_hi(), mech.t1);
  const double lam = mech.lambda_at(t);
  const double mass = 1.0 - inst.q_dist.cdf(lam);
  if (mass < kMassFloor) return inst.v(inst.q_hi(), mech.t1);
  const double cond = value_mass_from_lambda(inst, lam, t, {}) / mass;
  const double rent =
      (mech.cum_r_b_at(t) - mech.cum_r_b_at(mech.t1)) / mass;
  return cond - rent;
}

double buyer_utility(const ProblemInstance& inst,
                     const ThresholdMechanism& mech, double t) {
  const double lam = mech.lambda_at(t);
  if (lam >= inst.q_hi()) return 0.0;
  const double p = mech.pay_buyer_at(t);
  return integrate(
      [&](double q) { return (inst.v(q, t) - p) * inst.q_dist.pdf(q); }, lam,
      inst.q_hi(), {});
}

double misreport_utility(const ProblemInstance& inst,
                         const ThresholdMechanism& mech, double t,
                         double t_report) {
  const double lam = mech.lambda_at(t_report);
  if (lam >= inst.q_hi()) return 0.0;
  const double p = mech.pay_buyer_at(t_report);
  return integrate(
      [&](double q) { return (inst.v(q, t) - p) * inst.q_dist.pdf(q); }, lam,
      inst.q_hi(), {});
}

double trade_probability(const ProblemInstance& inst,
                         const ThresholdMechanism& mech, double q) {
  if (q < inst.q_lo() || q > inst.q_hi())
    throw std::domain_error("trade_probability: q outside the support");
  if (mech.lambda_at(inst.t_hi()) >= q) return 0.0;
  if (mech.lambda_at(inst.t_lo()) < q) return 1.0;
  const double tau = bisect_predicate(
      [&](double t) { return mech.lambda_at(t) < q; }, inst.t_lo(),
      inst.t_hi(), 1e-12 * (inst.t_hi() - inst.t_lo()));
  return 1.0 - inst.t_dist.cdf(tau);
}

double seller_surplus(const ProblemInstance& inst,
                      const ThresholdMechanism& mech, double q) {
  const double margin = mech.pay_seller - inst.reserve;
  if (margin == 0.0) return 0.0;
  return margin * trade_probability(inst, mech, q);
}

double revenue(const ProblemInstance& inst, const ThresholdMechanism& mech) {
  QuadratureOptions opt{1e-12, 1e-9, 48};
  auto integrand = [&](double t) {
    const double lam = mech.lambda_at(t);
    const double mass = 1.0 - inst.q_dist.cdf(lam);
    if (mass <= 0.0) return 0.0;
    return (mech.pay_buyer_at(t) - inst.reserve) * mass * inst.t_dist.pdf(t);
  };
  return integrate_split(integrand, inst.t_lo(), inst.t_hi(),
                         {mech.t1, mech.t2}, opt);
}

double revenue_rewrite(const ProblemInstance& inst,
                       const ThresholdMechanism& mech) {
  QuadratureOptions opt{1e-12, 1e-9, 48};
  const double u0 = buyer_utility(inst, mech, inst.t_lo());
  auto outer = [&](double t) {
    const double lam = mech.lambda_at(t);
    if (lam >= inst.q_hi()) return 0.0;
    const double ih = inst.t_dist.inverse_hazard(t);
    const double inner = integrate(
        [&](double q) {
          return eta_with_ih(inst, q, t, ih) * inst.q_dist.pdf(q);
        },
        lam, inst.q_hi(), {});
    return inner * inst.t_dist.pdf(t);
  };
  return -u0 + integrate_split(outer, inst.t_lo(), inst.t_hi(),
                               {mech.t1, mech.t2}, opt);
}

ThresholdMechanism solve(const ProblemInstance& inst, const SolveOptions& opt) {
  const ValidationReport report = validate(inst);
  if (!report.ok())
    throw assumption_error("instance failed validation: " +
                           report.first_failure());
  auto [t1, t2] = cutoffs(inst);
  // one inverse-hazard evaluation per t, shared across the bisection in q
  std::function<double(double)> lam_eval = [&inst](double t) {
    return threshold_with_ih(inst, t, inst.t_dist.inverse_hazard(t));
  };
  return assemble(inst, lam_eval, t1, t2, opt, /*strict=*/true);
}

ThresholdMechanism solve_with_threshold(
    const ProblemInstance& inst, const std::function<double(double)>& lambda,
    const SolveOptions& opt) {
  const double qlo = inst.q_lo(), qhi = inst.q_hi();
  std::function<double(double)> lam_eval = [&, qlo, qhi](double t) {
    return std::min(std::max(lambda(t), qlo), qhi);
  };
  const double tol = 1e-12 * (inst.t_hi() - inst.t_lo());
  const double t1 = bisect_predicate(
      [&](double t) { return lam_eval(t) < qhi; }, inst.t_lo(), inst.t_hi(),
      tol);
  const double t2 = bisect_predicate(
      [&](double t) { return lam_eval(t) <= qlo; }, inst.t_lo(), inst.t_hi(),
      tol);
  return assemble(inst, lam_eval, t1, t2, opt, /*strict=*/false);
}

}  // namespace medtrade
