#include "medtrade/instance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "medtrade/quadrature.hpp"

namespace medtrade {
namespace {

constexpr double kShapeTol = 1e-9;
constexpr std::size_t kShapeGrid = 64;  // (q, t) grid for the valuation checks
constexpr std::size_t kDensityGrid = 512;

// Central difference with the stencil shifted inside [lo, hi] near the edges.
template <typename F>
double central_diff(F&& f, double x, double h, double lo, double hi) {
  double a = x - h, b = x + h;
  if (a < lo) {
    a = lo;
    b = std::min(lo + 2.0 * h, hi);
  } else if (b > hi) {
    b = hi;
    a = std::max(hi - 2.0 * h, lo);
  }
  return (f(b) - f(a)) / (b - a);
}

}  // namespace

double ProblemInstance::v(double q, double t) const {
  if (valuation.is_linear()) return valuation.alpha().value(q) * t;
  return valuation.raw_v()(q, t);
}

double ProblemInstance::v_q(double q, double t) const {
  if (valuation.is_linear()) return valuation.alpha().deriv(q) * t;
  if (valuation.raw_v_q()) return valuation.raw_v_q()(q, t);
  const double h = 1e-5 * (q_hi() - q_lo());
  return central_diff([&](double x) { return v(x, t); }, q, h, q_lo(), q_hi());
}

double ProblemInstance::v_t(double q, double t) const {
  if (valuation.is_linear()) return valuation.alpha().value(q);
  if (valuation.raw_v_t()) return valuation.raw_v_t()(q, t);
  const double h = 1e-5 * (t_hi() - t_lo());
  return central_diff([&](double x) { return v(q, x); }, t, h, t_lo(), t_hi());
}

double ProblemInstance::v_tt(double q, double t) const {
  if (valuation.is_linear()) return 0.0;
  if (valuation.raw_v_tt()) return valuation.raw_v_tt()(q, t);
  const double h = 1e-5 * (t_hi() - t_lo());
  return central_diff([&](double x) { return v_t(q, x); }, t, h, t_lo(), t_hi());
}

double ProblemInstance::v_qt(double q, double t) const {
  if (valuation.is_linear()) return valuation.alpha().deriv(q);
  if (valuation.raw_v_qt()) return valuation.raw_v_qt()(q, t);
  const double h = 1e-5 * (q_hi() - q_lo());
  return central_diff([&](double x) { return v_t(x, t); }, q, h, q_lo(), q_hi());
}

double ProblemInstance::alpha(double q) const {
  return valuation.alpha().value(q);
}

double ProblemInstance::alpha_deriv(double q) const {
  return valuation.alpha().deriv(q);
}

double ProblemInstance::prior_value(double t) const {
  if (t < t_lo() || t > t_hi())
    throw std::domain_error("prior_value: t outside the type support");
  return integrate([&](double q) { return v(q, t) * q_dist.pdf(q); }, q_lo(),
                   q_hi());
}

bool ValidationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const Check& c) { return c.passed; });
}

const ValidationReport::Check* ValidationReport::find(
    const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::string ValidationReport::first_failure() const {
  for (const auto& c : checks)
    if (!c.passed) return c.name + ": " + c.detail;
  return {};
}

ValidationReport validate(const ProblemInstance& inst) {
  ValidationReport report;
  auto add = [&](std::string name, bool passed, std::string detail) {
    report.checks.push_back({std::move(name), passed, std::move(detail)});
  };

  {
    const double lo = inst.v(inst.q_lo(), inst.t_lo());
    const double hi = inst.v(inst.q_hi(), inst.t_hi());
    const bool passed = lo < inst.reserve && inst.reserve < hi;
    std::ostringstream os;
    os << "require v(q_lo,t_lo) < r < v(q_hi,t_hi): " << lo << " < "
       << inst.reserve << " < " << hi;
    add("non_trivial_range", passed, os.str());
  }

  {
    report.mhr = inst.t_dist.check_mhr();
    std::ostringstream os;
    os << "hazard rate of the type distribution must be monotone increasing "
          "(Assumption 1); worst decrease "
       << report.mhr.worst_violation;
    add("monotone_hazard_rate", report.mhr.holds, os.str());
  }

  {
    // strictly positive densities on the open supports
    bool pos = true;
    double worst = std::numeric_limits<double>::infinity();
    for (const Distribution* d : {&inst.q_dist, &inst.t_dist}) {
      const double lo = d->support_lo(), hi = d->support_hi();
      for (std::size_t i = 1; i < kDensityGrid; ++i) {
        const double x =
            lo + (hi - lo) * static_cast<double>(i) / kDensityGrid;
        const double f = d->pdf(x);
        worst = std::min(worst, f);
        if (!(f > 0.0)) pos = false;
      }
    }
    std::ostringstream os;
    os << "minimum interior density " << worst;
    add("positive_densities", pos, os.str());
  }

  if (inst.valuation.is_linear()) {
    bool ok = true;
    double amin = std::numeric_limits<double>::infinity();
    double admin = amin;
    for (std::size_t i = 0; i <= kDensityGrid; ++i) {
      const double q = inst.q_lo() + (inst.q_hi() - inst.q_lo()) *
                                         static_cast<double>(i) / kDensityGrid;
      const double a = inst.alpha(q);
      const double ad = inst.alpha_deriv(q);
      amin = std::min(amin, a);
      admin = std::min(admin, ad);
      if (!(a > 0.0) || !(ad > 0.0)) ok = false;
    }
    std::ostringstream os;
    os << "alpha > 0 and alpha' > 0 on Q; minima " << amin << ", " << admin;
    add("alpha_positive_increasing", ok, os.str());
  } else {
    bool ok = true;
    double qt_lo = std::numeric_limits<double>::infinity();
    double qt_hi = -qt_lo;
    std::string why;
    for (std::size_t i = 0; i <= kShapeGrid && ok; ++i) {
      const double q = inst.q_lo() + (inst.q_hi() - inst.q_lo()) *
                                         static_cast<double>(i) / kShapeGrid;
      for (std::size_t j = 0; j <= kShapeGrid; ++j) {
        const double t = inst.t_lo() + (inst.t_hi() - inst.t_lo()) *
                                           static_cast<double>(j) / kShapeGrid;
        const double vq = inst.v_q(q, t);
        const double vt = inst.v_t(q, t);
        const double vtt = inst.v_tt(q, t);
        const double vqt = inst.v_qt(q, t);
        qt_lo = std::min(qt_lo, vqt);
        qt_hi = std::max(qt_hi, vqt);
        if (!(vq > 0.0)) { ok = false; why = "v_q <= 0"; break; }
        if (!(vt > 0.0)) { ok = false; why = "v_t <= 0"; break; }
        if (vtt > kShapeTol) { ok = false; why = "v_tt > 0"; break; }
        if (!std::isfinite(vqt)) { ok = false; why = "v_qt unbounded"; break; }
      }
    }
    report.v_qt_lo = qt_lo;
    report.v_qt_hi = qt_hi;
    std::ostringstream os;
    if (ok)
      os << "v_q > 0, v_t > 0, v_tt <= 0 on the grid; v_qt in [" << qt_lo
         << ", " << qt_hi << "]";
    else
      os << why;
    add("valuation_assumptions", ok, os.str());
  }

  return report;
}

}  // namespace medtrade
