#pragma once

#include <functional>
#include <vector>

namespace medtrade {

struct QuadratureOptions {
  double abs_tol = 1e-10;  ///< per-panel acceptance threshold, halved on bisection
  double rel_tol = 0.0;    ///< optional relative component, kept across splits
  int max_depth = 48;
};

/// Adaptive Gauss-Kronrod (G7,K15) integral of f over [a, b].
/// Orientation follows the usual convention: a > b flips the sign.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opt = {});

/// Same, but the interval is pre-split at the given interior breakpoints
/// (integrand kinks). Breakpoints outside (a, b) are ignored.
double integrate_split(const std::function<double(double)>& f, double a,
                       double b, const std::vector<double>& breakpoints,
                       const QuadratureOptions& opt = {});

}  // namespace medtrade
