#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace medtrade {

/// Positive increasing coefficient alpha(q) for valuations linear in the
/// buyer type. Closed forms (power, affine, exponential) carry analytic
/// derivatives; the spline form is a monotone (Fritsch-Carlson) cubic whose
/// knot values must be strictly increasing.
class AlphaFunction {
 public:
  static AlphaFunction power(double exponent, double scale = 1.0);
  static AlphaFunction affine(double intercept, double slope);
  static AlphaFunction exponential(double scale, double rate);
  static AlphaFunction monotone_spline(std::vector<double> xs,
                                       std::vector<double> ys);

  double value(double q) const;
  double deriv(double q) const;

  struct Power {
    double exponent, scale;
  };
  struct Affine {
    double intercept, slope;
  };
  struct Exponential {
    double scale, rate;
  };
  struct Spline {
    std::vector<double> xs, ys, ds;  // knot abscissae, values, derivatives
  };

  template <typename Visitor>
  decltype(auto) visit(Visitor&& vis) const {
    return std::visit(std::forward<Visitor>(vis), impl_);
  }

 private:
  template <typename Impl>
  explicit AlphaFunction(Impl impl) : impl_(std::move(impl)) {}
  std::variant<Power, Affine, Exponential, Spline> impl_;
};

/// Buyer valuation v(q, t). Either linear in the type, v = alpha(q) * t, or a
/// general twice-differentiable function supplied with (optionally) analytic
/// partial derivatives; missing derivatives are filled in by central finite
/// differences with steps proportional to the instance supports.
class Valuation {
 public:
  using Fn2 = std::function<double(double, double)>;

  static Valuation linear_in_type(AlphaFunction alpha);

  static Valuation general(Fn2 v, Fn2 v_q = {}, Fn2 v_t = {}, Fn2 v_tt = {},
                           Fn2 v_qt = {});

  /// v = scale * q^q_exp * t^t_exp with analytic derivatives. The named form
  /// survives serialization; general() with raw callables does not.
  static Valuation power_product(double scale, double q_exp, double t_exp);

  /// v = q*t + t, the linear-coefficient example with v_tt = 0.
  static Valuation product_plus_t();

  bool is_linear() const { return alpha_.has_value(); }
  const AlphaFunction& alpha() const;

  // Raw pieces; evaluation with finite-difference fallbacks lives on
  // ProblemInstance, which knows the support spans.
  const Fn2& raw_v() const { return v_; }
  const Fn2& raw_v_q() const { return v_q_; }
  const Fn2& raw_v_t() const { return v_t_; }
  const Fn2& raw_v_tt() const { return v_tt_; }
  const Fn2& raw_v_qt() const { return v_qt_; }

  /// Named general form, when constructed through one ("power_product",
  /// "product_plus_t"); empty for linear mode or raw callables.
  const std::string& general_form() const { return form_; }
  const std::vector<double>& general_params() const { return params_; }

 private:
  Valuation() = default;
  std::optional<AlphaFunction> alpha_;
  Fn2 v_, v_q_, v_t_, v_tt_, v_qt_;
  std::string form_;
  std::vector<double> params_;
};

}  // namespace medtrade
