#include "medtrade/valuation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace medtrade {
namespace {

// Fritsch-Carlson knot derivatives for a monotonicity-preserving cubic.
std::vector<double> pchip_derivs(const std::vector<double>& xs,
                                 const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  std::vector<double> h(n - 1), delta(n - 1), d(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = xs[i + 1] - xs[i];
    delta[i] = (ys[i + 1] - ys[i]) / h[i];
  }
  if (n == 2) {
    d[0] = d[1] = delta[0];
    return d;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      d[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  auto end_deriv = [](double h0, double h1, double d0, double d1) {
    double e = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (e * d0 <= 0.0)
      e = 0.0;
    else if (d0 * d1 <= 0.0 && std::fabs(e) > 3.0 * std::fabs(d0))
      e = 3.0 * d0;
    return e;
  };
  d[0] = end_deriv(h[0], h[1], delta[0], delta[1]);
  d[n - 1] = end_deriv(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  return d;
}

std::size_t spline_segment(const std::vector<double>& xs, double q) {
  auto it = std::upper_bound(xs.begin(), xs.end(), q);
  std::size_t i = static_cast<std::size_t>(it - xs.begin());
  if (i == 0) return 0;
  if (i >= xs.size()) return xs.size() - 2;
  return i - 1;
}

}  // namespace

AlphaFunction AlphaFunction::power(double exponent, double scale) {
  if (!(exponent > 0.0) || !(scale > 0.0))
    throw std::invalid_argument("alpha power: exponent and scale must be positive");
  return AlphaFunction(Power{exponent, scale});
}

AlphaFunction AlphaFunction::affine(double intercept, double slope) {
  if (!(slope > 0.0))
    throw std::invalid_argument("alpha affine: slope must be positive");
  return AlphaFunction(Affine{intercept, slope});
}

AlphaFunction AlphaFunction::exponential(double scale, double rate) {
  if (!(scale > 0.0) || !(rate > 0.0))
    throw std::invalid_argument("alpha exponential: scale and rate must be positive");
  return AlphaFunction(Exponential{scale, rate});
}

AlphaFunction AlphaFunction::monotone_spline(std::vector<double> xs,
                                             std::vector<double> ys) {
  if (xs.size() != ys.size() || xs.size() < 3)
    throw std::invalid_argument("alpha spline: need at least 3 knots");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1]))
      throw std::invalid_argument("alpha spline: abscissae must strictly increase");
    if (!(ys[i] > ys[i - 1]))
      throw std::invalid_argument(
          "alpha spline: values must strictly increase (alpha' > 0)");
  }
  if (!(ys.front() > 0.0))
    throw std::invalid_argument("alpha spline: values must be positive");
  auto ds = pchip_derivs(xs, ys);
  return AlphaFunction(Spline{std::move(xs), std::move(ys), std::move(ds)});
}

double AlphaFunction::value(double q) const {
  return visit([q](const auto& a) -> double {
    using T = std::decay_t<decltype(a)>;
    if constexpr (std::is_same_v<T, Power>) {
      return a.scale * std::pow(q, a.exponent);
    } else if constexpr (std::is_same_v<T, Affine>) {
      return a.intercept + a.slope * q;
    } else if constexpr (std::is_same_v<T, Exponential>) {
      return a.scale * std::exp(a.rate * q);
    } else {
      const std::size_t i = spline_segment(a.xs, q);
      const double h = a.xs[i + 1] - a.xs[i];
      const double s = (q - a.xs[i]) / h;
      const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
      const double h10 = s * (1.0 - s) * (1.0 - s);
      const double h01 = s * s * (3.0 - 2.0 * s);
      const double h11 = s * s * (s - 1.0);
      return h00 * a.ys[i] + h * h10 * a.ds[i] + h01 * a.ys[i + 1] +
             h * h11 * a.ds[i + 1];
    }
  });
}

double AlphaFunction::deriv(double q) const {
  return visit([q](const auto& a) -> double {
    using T = std::decay_t<decltype(a)>;
    if constexpr (std::is_same_v<T, Power>) {
      return a.scale * a.exponent * std::pow(q, a.exponent - 1.0);
    } else if constexpr (std::is_same_v<T, Affine>) {
      return a.slope;
    } else if constexpr (std::is_same_v<T, Exponential>) {
      return a.scale * a.rate * std::exp(a.rate * q);
    } else {
      const std::size_t i = spline_segment(a.xs, q);
      const double h = a.xs[i + 1] - a.xs[i];
      const double s = (q - a.xs[i]) / h;
      const double g00 = 6.0 * s * (s - 1.0) / h;
      const double g10 = (3.0 * s - 1.0) * (s - 1.0);
      const double g01 = -g00;
      const double g11 = s * (3.0 * s - 2.0);
      return g00 * a.ys[i] + g10 * a.ds[i] + g01 * a.ys[i + 1] +
             g11 * a.ds[i + 1];
    }
  });
}

const AlphaFunction& Valuation::alpha() const {
  if (!alpha_) throw std::logic_error("Valuation::alpha: general-mode valuation");
  return *alpha_;
}

Valuation Valuation::linear_in_type(AlphaFunction alpha) {
  Valuation val;
  val.alpha_ = std::move(alpha);
  return val;
}

Valuation Valuation::general(Fn2 v, Fn2 v_q, Fn2 v_t, Fn2 v_tt, Fn2 v_qt) {
  if (!v) throw std::invalid_argument("Valuation::general: v is required");
  Valuation val;
  val.v_ = std::move(v);
  val.v_q_ = std::move(v_q);
  val.v_t_ = std::move(v_t);
  val.v_tt_ = std::move(v_tt);
  val.v_qt_ = std::move(v_qt);
  return val;
}

Valuation Valuation::power_product(double scale, double q_exp, double t_exp) {
  if (!(scale > 0.0) || !(q_exp > 0.0) || !(t_exp > 0.0))
    throw std::invalid_argument("power_product: parameters must be positive");
  auto val = general(
      [=](double q, double t) { return scale * std::pow(q, q_exp) * std::pow(t, t_exp); },
      [=](double q, double t) {
        return scale * q_exp * std::pow(q, q_exp - 1.0) * std::pow(t, t_exp);
      },
      [=](double q, double t) {
        return scale * t_exp * std::pow(q, q_exp) * std::pow(t, t_exp - 1.0);
      },
      [=](double q, double t) {
        const double c = scale * t_exp * (t_exp - 1.0);
        if (c == 0.0) return 0.0;  // avoid 0 * pow(0, negative)
        return c * std::pow(q, q_exp) * std::pow(t, t_exp - 2.0);
      },
      [=](double q, double t) {
        return scale * q_exp * t_exp * std::pow(q, q_exp - 1.0) *
               std::pow(t, t_exp - 1.0);
      });
  val.form_ = "power_product";
  val.params_ = {scale, q_exp, t_exp};
  return val;
}

Valuation Valuation::product_plus_t() {
  auto val = general([](double q, double t) { return q * t + t; },
                     [](double, double t) { return t; },
                     [](double q, double) { return q + 1.0; },
                     [](double, double) { return 0.0; },
                     [](double, double) { return 1.0; });
  val.form_ = "product_plus_t";
  return val;
}

}  // namespace medtrade
