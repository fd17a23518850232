#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "medtrade/rng.hpp"

namespace medtrade {

/// Result of a hazard-rate monotonicity scan over an interior grid.
struct MhrReport {
  bool holds = false;
  /// Largest decrease of the hazard between adjacent grid points
  /// (negative means the hazard never decreased).
  double worst_violation = 0.0;
  std::size_t grid_size = 0;
};

/// Continuous distribution on a compact support [lo, hi] with the derived
/// quantities the solver needs: hazard rate f/(1-F), inverse hazard rate
/// (1-F)/f and its derivative, quantile-based sampling, and a monotone
/// hazard rate diagnostic.
///
/// Families:
///  - uniform(lo, hi)
///  - truncated_exponential(rate, lo, hi), rate > 0
///  - truncated_normal(mu, sigma, lo, hi)
///  - piecewise_linear_pdf(knots): density linear between knots, normalized
///    at construction. Zero density is rejected at interior knots (the
///    inverse hazard would be undefined there); endpoint zeros are allowed.
///
/// Values are immutable after construction and safe for concurrent reads.
class Distribution {
 public:
  static Distribution uniform(double lo, double hi);
  static Distribution truncated_exponential(double rate, double lo, double hi);
  static Distribution truncated_normal(double mu, double sigma, double lo,
                                       double hi);
  static Distribution piecewise_linear_pdf(
      std::vector<std::array<double, 2>> knots);

  double support_lo() const { return lo_; }
  double support_hi() const { return hi_; }

  /// Density at x. Throws std::domain_error outside the support.
  double pdf(double x) const;

  /// CDF at x, clamped to 0 below the support and 1 above it.
  double cdf(double x) const;

  /// Inverse CDF for u in [0, 1]. Throws std::domain_error otherwise.
  double quantile(double u) const;

  /// f(x)/(1-F(x)). Reports +infinity at the upper endpoint (the pole);
  /// solver formulas go through inverse_hazard, which is 0 there.
  double hazard(double x) const;

  /// (1-F(x))/f(x). Exactly 0 at x = support_hi. Returns +infinity where the
  /// density vanishes with mass still above (degenerate endpoint density).
  double inverse_hazard(double x) const;

  /// d/dx [(1-F(x))/f(x)]. For piecewise-linear densities the value is
  /// right-continuous at knots. Equals -1 at the upper endpoint whenever the
  /// density is positive there.
  double inverse_hazard_deriv(double x) const;

  /// Scans the hazard on an evenly spaced interior grid (grid_size >= 16)
  /// and reports whether it is weakly increasing within tolerance 1e-9.
  MhrReport check_mhr(std::size_t grid_size = 512) const;

  double sample(Rng& rng) const { return quantile(rng.next_double()); }
  std::vector<double> sample(Rng& rng, std::size_t n) const;

  std::string family_name() const;

  struct Uniform {
    double lo, hi;
  };
  struct TruncatedExponential {
    double rate, lo, hi;
    double z;  // e^{-rate*lo} - e^{-rate*hi}
  };
  struct TruncatedNormal {
    double mu, sigma, lo, hi;
    double phi_a, z;  // Phi((lo-mu)/sigma), Phi(b)-Phi(a)
  };
  struct PiecewiseLinear {
    std::vector<double> xs;
    std::vector<double> ys;   // normalized density at knots
    std::vector<double> cum;  // cdf at knots
  };

  template <typename Visitor>
  decltype(auto) visit(Visitor&& vis) const {
    return std::visit(std::forward<Visitor>(vis), impl_);
  }

 private:
  template <typename Impl>
  Distribution(Impl impl, double lo, double hi)
      : impl_(std::move(impl)), lo_(lo), hi_(hi) {}

  std::variant<Uniform, TruncatedExponential, TruncatedNormal, PiecewiseLinear>
      impl_;
  double lo_, hi_;
};

/// Standard normal CDF via erfc.
double normal_cdf(double z);

/// Standard normal quantile (rational approximation plus one Halley step).
double normal_quantile(double p);

}  // namespace medtrade
