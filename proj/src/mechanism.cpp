#include "medtrade/mechanism.hpp"

#include <algorithm>
#include <cmath>

namespace medtrade {
namespace {

double interp(const std::vector<double>& xs, const std::vector<double>& ys,
              double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
  const double w = (x - xs[i]) / (xs[i + 1] - xs[i]);
  return ys[i] + w * (ys[i + 1] - ys[i]);
}

}  // namespace

double ThresholdMechanism::lambda_at(double t) const {
  return interp(grid, lambda, t);
}

double ThresholdMechanism::pay_buyer_at(double t) const {
  return interp(grid, pay, t);
}

double ThresholdMechanism::r_b_at(double t) const { return interp(grid, rb, t); }

double ThresholdMechanism::cum_r_b_at(double t) const {
  return interp(grid, cum_rb, t);
}

}  // namespace medtrade
