#include "medtrade/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace medtrade {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMhrTol = 1e-9;
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrt2Pi = 2.5066282746310002;

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / kSqrt2Pi; }

void require_support(double lo, double hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw std::invalid_argument("distribution support must be a finite interval");
}

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0)) {
    if (p == 0.0) return -kInf;
    if (p == 1.0) return kInf;
    throw std::domain_error("normal_quantile: p outside [0, 1]");
  }
  // Acklam's rational approximation, then one Halley refinement.
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = normal_cdf(x) - p;
  const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

Distribution Distribution::uniform(double lo, double hi) {
  require_support(lo, hi);
  return Distribution(Uniform{lo, hi}, lo, hi);
}

Distribution Distribution::truncated_exponential(double rate, double lo,
                                                 double hi) {
  require_support(lo, hi);
  if (!(rate > 0.0))
    throw std::invalid_argument("truncated_exponential: rate must be positive");
  const double z = -std::expm1(-rate * (hi - lo));  // 1 - e^{-rate*span}
  return Distribution(TruncatedExponential{rate, lo, hi, z}, lo, hi);
}

Distribution Distribution::truncated_normal(double mu, double sigma, double lo,
                                            double hi) {
  require_support(lo, hi);
  if (!(sigma > 0.0))
    throw std::invalid_argument("truncated_normal: sigma must be positive");
  const double phi_a = normal_cdf((lo - mu) / sigma);
  const double z = normal_cdf((hi - mu) / sigma) - phi_a;
  if (!(z > 1e-12))
    throw std::invalid_argument(
        "truncated_normal: support carries negligible mass");
  return Distribution(TruncatedNormal{mu, sigma, lo, hi, phi_a, z}, lo, hi);
}

Distribution Distribution::piecewise_linear_pdf(
    std::vector<std::array<double, 2>> knots) {
  if (knots.size() < 2)
    throw std::invalid_argument("piecewise_linear_pdf: need at least 2 knots");
  std::vector<double> xs(knots.size()), ys(knots.size());
  for (std::size_t i = 0; i < knots.size(); ++i) {
    xs[i] = knots[i][0];
    ys[i] = knots[i][1];
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i]) || ys[i] < 0.0)
      throw std::invalid_argument("piecewise_linear_pdf: bad knot");
    if (i > 0 && !(xs[i] > xs[i - 1]))
      throw std::invalid_argument(
          "piecewise_linear_pdf: knot abscissae must strictly increase");
    // Interior zeros would leave the inverse hazard undefined and posterior
    // updates ill-conditioned; only endpoint zeros are admitted.
    if (i > 0 && i + 1 < knots.size() && ys[i] == 0.0)
      throw std::invalid_argument(
          "piecewise_linear_pdf: zero density at an interior knot");
  }
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    total += 0.5 * (ys[i] + ys[i + 1]) * (xs[i + 1] - xs[i]);
  if (!(total > 0.0))
    throw std::invalid_argument("piecewise_linear_pdf: zero total mass");
  for (double& y : ys) y /= total;
  std::vector<double> cum(xs.size(), 0.0);
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    cum[i + 1] = cum[i] + 0.5 * (ys[i] + ys[i + 1]) * (xs[i + 1] - xs[i]);
  cum.back() = 1.0;
  return Distribution(PiecewiseLinear{std::move(xs), std::move(ys), std::move(cum)},
                      knots.front()[0], knots.back()[0]);
}

namespace {

std::size_t segment_of(const std::vector<double>& xs, double x) {
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t i = static_cast<std::size_t>(it - xs.begin());
  if (i == 0) return 0;
  if (i >= xs.size()) return xs.size() - 2;
  return i - 1;
}

double pl_pdf(const Distribution::PiecewiseLinear& d, double x) {
  const std::size_t i = segment_of(d.xs, x);
  const double w = (x - d.xs[i]) / (d.xs[i + 1] - d.xs[i]);
  return d.ys[i] * (1.0 - w) + d.ys[i + 1] * w;
}

double pl_cdf(const Distribution::PiecewiseLinear& d, double x) {
  const std::size_t i = segment_of(d.xs, x);
  const double h = d.xs[i + 1] - d.xs[i];
  const double m = (d.ys[i + 1] - d.ys[i]) / h;
  const double w = x - d.xs[i];
  return d.cum[i] + d.ys[i] * w + 0.5 * m * w * w;
}

double pl_quantile(const Distribution::PiecewiseLinear& d, double u) {
  auto it = std::upper_bound(d.cum.begin(), d.cum.end(), u);
  std::size_t i = static_cast<std::size_t>(it - d.cum.begin());
  i = (i == 0) ? 0 : i - 1;
  if (i >= d.xs.size() - 1) i = d.xs.size() - 2;
  const double du = u - d.cum[i];
  const double h = d.xs[i + 1] - d.xs[i];
  const double m = (d.ys[i + 1] - d.ys[i]) / h;
  const double y0 = d.ys[i];
  double w;
  if (m == 0.0) {
    w = (y0 > 0.0) ? du / y0 : 0.0;
  } else {
    const double disc = std::max(y0 * y0 + 2.0 * m * du, 0.0);
    const double root = std::sqrt(disc);
    // stable for either slope sign; reduces to sqrt(2 du / m) when y0 = 0
    w = (y0 + root > 0.0) ? 2.0 * du / (y0 + root) : 0.0;
  }
  return std::min(std::max(d.xs[i] + w, d.xs[i]), d.xs[i + 1]);
}

}  // namespace

double Distribution::pdf(double x) const {
  if (x < lo_ || x > hi_)
    throw std::domain_error("pdf: x outside the support");
  return visit([x](const auto& d) -> double {
    using T = std::decay_t<decltype(d)>;
    if constexpr (std::is_same_v<T, Uniform>) {
      return 1.0 / (d.hi - d.lo);
    } else if constexpr (std::is_same_v<T, TruncatedExponential>) {
      return d.rate * std::exp(-d.rate * (x - d.lo)) / d.z;
    } else if constexpr (std::is_same_v<T, TruncatedNormal>) {
      return normal_pdf((x - d.mu) / d.sigma) / (d.sigma * d.z);
    } else {
      return pl_pdf(d, x);
    }
  });
}

double Distribution::cdf(double x) const {
  if (x <= lo_) return 0.0;
  if (x >= hi_) return 1.0;
  return visit([x](const auto& d) -> double {
    using T = std::decay_t<decltype(d)>;
    if constexpr (std::is_same_v<T, Uniform>) {
      return (x - d.lo) / (d.hi - d.lo);
    } else if constexpr (std::is_same_v<T, TruncatedExponential>) {
      return -std::expm1(-d.rate * (x - d.lo)) / d.z;
    } else if constexpr (std::is_same_v<T, TruncatedNormal>) {
      return (normal_cdf((x - d.mu) / d.sigma) - d.phi_a) / d.z;
    } else {
      return std::min(pl_cdf(d, x), 1.0);
    }
  });
}

double Distribution::quantile(double u) const {
  if (!(u >= 0.0) || !(u <= 1.0))
    throw std::domain_error("quantile: u outside [0, 1]");
  if (u == 0.0) return lo_;
  if (u == 1.0) return hi_;
  return visit([u, this](const auto& d) -> double {
    using T = std::decay_t<decltype(d)>;
    if constexpr (std::is_same_v<T, Uniform>) {
      return d.lo + u * (d.hi - d.lo);
    } else if constexpr (std::is_same_v<T, TruncatedExponential>) {
      return d.lo - std::log1p(-u * d.z) / d.rate;
    } else if constexpr (std::is_same_v<T, TruncatedNormal>) {
      const double x = d.mu + d.sigma * normal_quantile(d.phi_a + u * d.z);
      return std::min(std::max(x, lo_), hi_);
    } else {
      return pl_quantile(d, u);
    }
  });
}

double Distribution::hazard(double x) const {
  if (x < lo_ || x > hi_)
    throw std::domain_error("hazard: x outside the support");
  if (x == hi_) return kInf;  // F = 1 pole
  const double tail = 1.0 - cdf(x);
  if (tail <= 0.0) return kInf;
  return pdf(x) / tail;
}

double Distribution::inverse_hazard(double x) const {
  if (x < lo_ || x > hi_)
    throw std::domain_error("inverse_hazard: x outside the support");
  if (x == hi_) return 0.0;
  return visit([x](const auto& d) -> double {
    using T = std::decay_t<decltype(d)>;
    if constexpr (std::is_same_v<T, Uniform>) {
      return d.hi - x;
    } else if constexpr (std::is_same_v<T, TruncatedExponential>) {
      return -std::expm1(-d.rate * (d.hi - x)) / d.rate;
    } else if constexpr (std::is_same_v<T, TruncatedNormal>) {
      const double z = (x - d.mu) / d.sigma;
      const double b = (d.hi - d.mu) / d.sigma;
      const double tail =
          0.5 * (std::erfc(z / kSqrt2) - std::erfc(b / kSqrt2));
      return d.sigma * tail / normal_pdf(z);
    } else {
      const double f = pl_pdf(d, x);
      if (f <= 0.0) return kInf;  // degenerate endpoint density
      return (1.0 - pl_cdf(d, x)) / f;
    }
  });
}

double Distribution::inverse_hazard_deriv(double x) const {
  if (x < lo_ || x > hi_)
    throw std::domain_error("inverse_hazard_deriv: x outside the support");
  return visit([x, this](const auto& d) -> double {
    using T = std::decay_t<decltype(d)>;
    if constexpr (std::is_same_v<T, Uniform>) {
      return -1.0;
    } else if constexpr (std::is_same_v<T, TruncatedExponential>) {
      return -std::exp(-d.rate * (d.hi - x));
    } else if constexpr (std::is_same_v<T, TruncatedNormal>) {
      return -1.0 + inverse_hazard(x) * (x - d.mu) / (d.sigma * d.sigma);
    } else {
      if (x == hi_) return -1.0;
      const double f = pl_pdf(d, x);
      if (f <= 0.0) return -1.0;
      const std::size_t i = segment_of(d.xs, x);
      const double m = (d.ys[i + 1] - d.ys[i]) / (d.xs[i + 1] - d.xs[i]);
      return -1.0 - (1.0 - pl_cdf(d, x)) * m / (f * f);
    }
  });
}

MhrReport Distribution::check_mhr(std::size_t grid_size) const {
  if (grid_size < 16)
    throw std::invalid_argument("check_mhr: grid_size must be at least 16");
  MhrReport report;
  report.grid_size = grid_size;
  const double span = hi_ - lo_;
  double worst = -kInf;
  double prev = 0.0;
  for (std::size_t i = 1; i <= grid_size; ++i) {
    const double x = lo_ + span * static_cast<double>(i) /
                               static_cast<double>(grid_size + 1);
    const double h = hazard(x);
    if (i > 1) worst = std::max(worst, prev - h);
    prev = h;
  }
  report.worst_violation = worst;
  report.holds = worst <= kMhrTol;
  return report;
}

std::vector<double> Distribution::sample(Rng& rng, std::size_t n) const {
  std::vector<double> out(n);
  for (double& x : out) x = sample(rng);
  return out;
}

std::string Distribution::family_name() const {
  return visit([](const auto& d) -> std::string {
    using T = std::decay_t<decltype(d)>;
    if constexpr (std::is_same_v<T, Uniform>) return "uniform";
    else if constexpr (std::is_same_v<T, TruncatedExponential>)
      return "truncated_exponential";
    else if constexpr (std::is_same_v<T, TruncatedNormal>)
      return "truncated_normal";
    else
      return "piecewise_linear";
  });
}

}  // namespace medtrade
