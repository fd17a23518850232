#include "medtrade/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

#include "medtrade/errors.hpp"
#include "medtrade/solver.hpp"

namespace medtrade {
namespace {

// suffix-sum tables shared by the enumerator and the payment construction
struct Tables {
  std::size_t n_q = 0, n_t = 0;
  std::vector<double> suf_mass;             // [i] sum of q_mass from i up
  std::vector<std::vector<double>> suf_v;   // [j][i] sum of v*mass from i up
  std::vector<std::vector<double>> suf_dv;  // [j][i] sum of (v_{j+1}-v_j)*mass
  std::vector<double> vbar;                 // prior value per type row
  double reserve = 0.0;
};

Tables build_tables(const DiscreteInstance& d) {
  Tables tb;
  tb.n_q = d.n_q();
  tb.n_t = d.n_t();
  tb.reserve = d.reserve;
  tb.suf_mass.assign(tb.n_q + 1, 0.0);
  for (std::size_t i = tb.n_q; i-- > 0;)
    tb.suf_mass[i] = tb.suf_mass[i + 1] + d.q_mass[i];
  tb.suf_v.assign(tb.n_t, std::vector<double>(tb.n_q + 1, 0.0));
  for (std::size_t j = 0; j < tb.n_t; ++j)
    for (std::size_t i = tb.n_q; i-- > 0;)
      tb.suf_v[j][i] = tb.suf_v[j][i + 1] + d.values[i][j] * d.q_mass[i];
  if (tb.n_t > 1) {
    tb.suf_dv.assign(tb.n_t - 1, std::vector<double>(tb.n_q + 1, 0.0));
    for (std::size_t j = 0; j + 1 < tb.n_t; ++j)
      for (std::size_t i = tb.n_q; i-- > 0;)
        tb.suf_dv[j][i] = tb.suf_dv[j][i + 1] +
                          (d.values[i][j + 1] - d.values[i][j]) * d.q_mass[i];
  }
  tb.vbar.resize(tb.n_t);
  for (std::size_t j = 0; j < tb.n_t; ++j) tb.vbar[j] = tb.suf_v[j][0];
  return tb;
}

struct Candidate {
  double revenue = -std::numeric_limits<double>::infinity();
  double trade = 0.0;
  std::vector<int> k;
  std::vector<double> payments;
  bool valid = false;
};

// total order: higher revenue, then higher trade probability, then
// lexicographically smaller vector; exact comparisons keep the reduction
// associative across any worker partition
bool better(const Candidate& a, const Candidate& b) {
  if (!b.valid) return a.valid;
  if (!a.valid) return false;
  if (a.revenue != b.revenue) return a.revenue > b.revenue;
  if (a.trade != b.trade) return a.trade > b.trade;
  return a.k < b.k;
}

// envelope payments + full original-constraint scan for one vector
struct Evaluator {
  const DiscreteInstance& d;
  const Tables& tb;
  double tol;
  std::vector<double> u, p, s;

  explicit Evaluator(const DiscreteInstance& dd, const Tables& t, double tl)
      : d(dd), tb(t), tol(tl), u(t.n_t), p(t.n_t), s(t.n_t) {}

  // fills u/p/s; returns revenue (no feasibility verdict)
  double envelope(const std::vector<int>& k, double* trade_out) {
    const std::size_t n_t = tb.n_t, n_q = tb.n_q;
    u[0] = 0.0;
    for (std::size_t j = 0; j + 1 < n_t; ++j)
      u[j + 1] = u[j] + tb.suf_dv[j][static_cast<std::size_t>(k[j])];
    std::size_t jstar = n_t;
    for (std::size_t j = 0; j < n_t; ++j)
      if (static_cast<std::size_t>(k[j]) < n_q) {
        jstar = j;
        break;
      }
    const double p_no_trade =
        (jstar < n_t) ? d.values[n_q - 1][jstar]
                      : d.values[n_q - 1][n_t - 1] + 1.0;
    double rev = 0.0, trade = 0.0;
    for (std::size_t j = 0; j < n_t; ++j) {
      const auto ki = static_cast<std::size_t>(k[j]);
      s[j] = tb.suf_mass[ki];
      p[j] = (s[j] > 0.0) ? (tb.suf_v[j][ki] - u[j]) / s[j] : p_no_trade;
      rev += d.t_mass[j] * s[j] * (p[j] - tb.reserve);
      trade += d.t_mass[j] * s[j];
    }
    if (trade_out) *trade_out = trade;
    return rev;
  }

  bool feasible(const std::vector<int>& k) {
    const std::size_t n_t = tb.n_t;
    for (std::size_t j = 0; j < n_t; ++j) {
      if (u[j] < -tol) return false;
      if (tb.vbar[j] - p[j] - u[j] > tol) return false;
    }
    for (std::size_t jp = 0; jp < n_t; ++jp) {
      const auto ki = static_cast<std::size_t>(k[jp]);
      const double ps = p[jp] * tb.suf_mass[ki];
      for (std::size_t j = 0; j < n_t; ++j) {
        const double udev = tb.suf_v[j][ki] - ps;
        const double raw = std::max(udev, 0.0) +
                           std::max(0.0, tb.vbar[j] - p[jp] - udev);
        if (raw - u[j] > tol) return false;
      }
    }
    return true;
  }
};

int worker_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MEDTRADE_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return std::min(w, 256);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 32u));
}

}  // namespace

DiscreteInstance DiscreteInstance::from(const ProblemInstance& inst,
                                        std::size_t n_q, std::size_t n_t) {
  if (n_q < 1 || n_t < 1)
    throw std::invalid_argument("DiscreteInstance: grids must be non-empty");
  DiscreteInstance d;
  d.reserve = inst.reserve;
  auto fill = [](const Distribution& dist, std::size_t n,
                 std::vector<double>& mid, std::vector<double>& mass,
                 std::vector<double>* width) {
    const double lo = dist.support_lo(), hi = dist.support_hi();
    mid.resize(n);
    mass.resize(n);
    if (width) width->resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double a = lo + (hi - lo) * static_cast<double>(i) / n;
      const double b = lo + (hi - lo) * static_cast<double>(i + 1) / n;
      mid[i] = 0.5 * (a + b);
      mass[i] = dist.cdf(b) - dist.cdf(a);
      if (width) (*width)[i] = b - a;
    }
  };
  fill(inst.q_dist, n_q, d.q_points, d.q_mass, nullptr);
  fill(inst.t_dist, n_t, d.t_points, d.t_mass, &d.t_width);

  // suffix tail keeps 1 - Fhat exactly zero on the last cell
  std::vector<double> tail(n_t + 1, 0.0);
  for (std::size_t j = n_t; j-- > 0;) tail[j] = tail[j + 1] + d.t_mass[j];

  d.values.assign(n_q, std::vector<double>(n_t));
  d.virtuals.assign(n_q, std::vector<double>(n_t));
  for (std::size_t j = 0; j < n_t; ++j) {
    const double fhat = d.t_mass[j] / d.t_width[j];
    const double ih = tail[j + 1] / fhat;
    for (std::size_t i = 0; i < n_q; ++i) {
      const double q = d.q_points[i], t = d.t_points[j];
      d.values[i][j] = inst.v(q, t);
      d.virtuals[i][j] =
          d.values[i][j] - inst.v_t(q, t) * ih - inst.reserve;
    }
  }
  return d;
}

bool DiscreteInstance::virtuals_monotone_in_t() const {
  for (std::size_t i = 0; i < n_q(); ++i)
    for (std::size_t j = 0; j + 1 < n_t(); ++j)
      if (virtuals[i][j + 1] < virtuals[i][j] - 1e-12) return false;
  return true;
}

std::uint64_t threshold_vector_count(std::size_t n_t, std::size_t n_q) {
  // C(n_t + n_q, n_q) with saturation
  unsigned __int128 r = 1;
  for (std::size_t i = 1; i <= n_q; ++i) {
    r = r * (n_t + i) / i;
    if (r > static_cast<unsigned __int128>(std::numeric_limits<std::uint64_t>::max()))
      return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(r);
}

std::vector<int> unrank_threshold_vector(std::size_t n_t, std::size_t n_q,
                                         std::uint64_t rank) {
  std::vector<int> k(n_t, 0);
  std::uint64_t r = rank;
  std::size_t cap = n_q;
  for (std::size_t pos = 0; pos < n_t; ++pos) {
    const std::size_t len = n_t - pos - 1;
    std::size_t v = 0;
    for (; v <= cap; ++v) {
      const std::uint64_t cnt = threshold_vector_count(len, v);
      if (r < cnt) break;
      r -= cnt;
    }
    if (v > cap)
      throw std::invalid_argument("unrank_threshold_vector: rank out of range");
    k[pos] = static_cast<int>(v);
    cap = v;
  }
  return k;
}

bool next_threshold_vector(std::vector<int>& k, std::size_t n_q) {
  const std::size_t n = k.size();
  for (std::size_t p = n; p-- > 0;) {
    const int cap = (p == 0) ? static_cast<int>(n_q) : k[p - 1];
    if (k[p] < cap) {
      ++k[p];
      std::fill(k.begin() + static_cast<std::ptrdiff_t>(p) + 1, k.end(), 0);
      return true;
    }
  }
  return false;
}

DiscreteMechanism envelope_mechanism(const DiscreteInstance& dinst,
                                     std::vector<int> k) {
  if (k.size() != dinst.n_t())
    throw std::invalid_argument("envelope_mechanism: vector length mismatch");
  for (int ki : k)
    if (ki < 0 || static_cast<std::size_t>(ki) > dinst.n_q())
      throw std::invalid_argument("envelope_mechanism: index out of range");
  const Tables tb = build_tables(dinst);
  Evaluator ev(dinst, tb, 0.0);
  ev.envelope(k, nullptr);
  DiscreteMechanism m;
  m.threshold_index = std::move(k);
  m.payments = ev.p;
  m.pay_seller = dinst.reserve;
  return m;
}

DiscreteMechanism pointwise_rule(const DiscreteInstance& dinst) {
  std::vector<int> k(dinst.n_t());
  for (std::size_t j = 0; j < dinst.n_t(); ++j) {
    std::size_t i = 0;
    for (; i < dinst.n_q(); ++i)
      if (dinst.virtuals[i][j] >= 0.0) break;
    k[j] = static_cast<int>(i);
  }
  return envelope_mechanism(dinst, std::move(k));
}

DiscreteMechanism discretize(const DiscreteInstance& dinst,
                             const ThresholdMechanism& mech) {
  std::vector<int> k(dinst.n_t());
  for (std::size_t j = 0; j < dinst.n_t(); ++j) {
    const double lam = mech.lambda_at(dinst.t_points[j]);
    std::size_t i = 0;
    for (; i < dinst.n_q(); ++i)
      if (dinst.q_points[i] > lam) break;
    k[j] = static_cast<int>(i);
  }
  return envelope_mechanism(dinst, std::move(k));
}

DiscreteEval evaluate_discrete(const DiscreteInstance& dinst,
                               const DiscreteMechanism& dmech) {
  const std::size_t n_t = dinst.n_t(), n_q = dinst.n_q();
  if (dmech.threshold_index.size() != n_t || dmech.payments.size() != n_t)
    throw std::invalid_argument("evaluate_discrete: shape mismatch");
  std::vector<double> u(n_t), s(n_t), vbar(n_t, 0.0);
  double rev = 0.0;
  for (std::size_t j = 0; j < n_t; ++j) {
    const int kj = dmech.threshold_index[j];
    if (kj < 0 || static_cast<std::size_t>(kj) > n_q)
      throw std::invalid_argument("evaluate_discrete: index out of range");
    double uu = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < n_q; ++i) {
      vbar[j] += dinst.values[i][j] * dinst.q_mass[i];
      if (i >= static_cast<std::size_t>(kj)) {
        uu += (dinst.values[i][j] - dmech.payments[j]) * dinst.q_mass[i];
        ss += dinst.q_mass[i];
      }
    }
    u[j] = uu;
    s[j] = ss;
    rev += dinst.t_mass[j] * ss * (dmech.payments[j] - dmech.pay_seller);
  }
  double worst = std::fabs(dmech.pay_seller - dinst.reserve);
  for (std::size_t j = 0; j < n_t; ++j) {
    worst = std::max(worst, -u[j]);
    worst = std::max(worst, vbar[j] - dmech.payments[j] - u[j]);
  }
  for (std::size_t jp = 0; jp < n_t; ++jp) {
    for (std::size_t j = 0; j < n_t; ++j) {
      double udev = 0.0;
      for (std::size_t i = static_cast<std::size_t>(dmech.threshold_index[jp]);
           i < n_q; ++i)
        udev += (dinst.values[i][j] - dmech.payments[jp]) * dinst.q_mass[i];
      const double raw =
          std::max(udev, 0.0) +
          std::max(0.0, vbar[j] - dmech.payments[jp] - udev);
      worst = std::max(worst, raw - u[j]);
    }
  }
  return {rev, worst};
}

EnumerationResult enumerate_optimal(const DiscreteInstance& dinst,
                                    const EnumerateOptions& opt) {
  const std::size_t n_t = dinst.n_t(), n_q = dinst.n_q();
  const std::uint64_t count = threshold_vector_count(n_t, n_q);
  if (count > opt.max_candidates)
    throw input_error("enumerate_optimal: " + std::to_string(count) +
                      " threshold vectors exceed the bound of " +
                      std::to_string(opt.max_candidates));
  const Tables tb = build_tables(dinst);
  const int workers =
      static_cast<int>(std::min<std::uint64_t>(worker_count(opt.workers), count));

  std::vector<Candidate> bests(static_cast<std::size_t>(workers));
  auto scan = [&](int w) {
    const std::uint64_t lo = count * static_cast<std::uint64_t>(w) /
                             static_cast<std::uint64_t>(workers);
    const std::uint64_t hi = count * static_cast<std::uint64_t>(w + 1) /
                             static_cast<std::uint64_t>(workers);
    if (lo >= hi) return;
    Evaluator ev(dinst, tb, opt.feasibility_tol);
    Candidate best;
    std::vector<int> k = unrank_threshold_vector(n_t, n_q, lo);
    for (std::uint64_t r = lo; r < hi; ++r) {
      double trade = 0.0;
      const double rev = ev.envelope(k, &trade);
      // cheap dominance cut before the quadratic constraint scan
      if (!best.valid || rev > best.revenue ||
          (rev == best.revenue && trade >= best.trade)) {
        if (ev.feasible(k)) {
          Candidate cand;
          cand.revenue = rev;
          cand.trade = trade;
          cand.k = k;
          cand.payments = ev.p;
          cand.valid = true;
          if (better(cand, best)) best = std::move(cand);
        }
      }
      if (r + 1 < hi) next_threshold_vector(k, n_q);
    }
    bests[static_cast<std::size_t>(w)] = std::move(best);
  };

  if (workers <= 1) {
    scan(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(scan, w);
    for (auto& th : pool) th.join();
  }

  Candidate best;
  for (auto& c : bests)
    if (better(c, best)) best = std::move(c);
  if (!best.valid)
    throw std::logic_error("enumerate_optimal: no feasible candidate found");

  EnumerationResult res;
  res.best.threshold_index = std::move(best.k);
  res.best.payments = std::move(best.payments);
  res.best.pay_seller = dinst.reserve;
  res.best_revenue = best.revenue;
  res.candidates = count;
  return res;
}

std::vector<ComparisonRow> compare(const ProblemInstance& inst,
                                   const ThresholdMechanism& mech,
                                   const std::vector<std::size_t>& grid_sizes,
                                   const EnumerateOptions& opt) {
  const double quad_rev = revenue(inst, mech);
  std::vector<ComparisonRow> rows;
  rows.reserve(grid_sizes.size());
  for (std::size_t n : grid_sizes) {
    const DiscreteInstance dinst = DiscreteInstance::from(inst, n, n);
    ComparisonRow row;
    row.grid_size = n;
    row.closed_form_quadrature = quad_rev;
    const DiscreteMechanism pw = pointwise_rule(dinst);
    if (threshold_vector_count(n, n) <= opt.max_candidates) {
      const EnumerationResult er = enumerate_optimal(dinst, opt);
      row.discrete_opt = er.best_revenue;
      row.enumerated = true;
      row.vectors_match =
          er.best.threshold_index == pw.threshold_index;
    } else {
      // beyond the enumeration bound the pointwise rule stands in for the
      // discrete optimum (they coincide under MHR wherever enumerable)
      row.discrete_opt = evaluate_discrete(dinst, pw).revenue;
      row.enumerated = false;
      row.vectors_match = false;
    }
    row.closed_form = evaluate_discrete(dinst, discretize(dinst, mech)).revenue;
    row.gap = (row.discrete_opt - row.closed_form) /
              std::max(std::fabs(row.discrete_opt), 1e-300);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace medtrade
