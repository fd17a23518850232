#pragma once

#include <functional>

namespace medtrade {

/// Bisection root of f on [lo, hi]; requires f(lo) and f(hi) of opposite sign
/// (either may be zero). Stops once the bracket width drops below x_tol.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double x_tol);

/// Infimum of the true-region of a monotone predicate on [lo, hi]:
/// pred is false near lo and true near hi. Returns hi if pred is never true,
/// lo if pred(lo) already holds.
double bisect_predicate(const std::function<bool(double)>& pred, double lo,
                        double hi, double x_tol);

}  // namespace medtrade
