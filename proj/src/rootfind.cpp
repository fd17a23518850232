#include "medtrade/rootfind.hpp"

#include <cmath>
#include <stdexcept>

namespace medtrade {

double bisect(const std::function<double(double)>& f, double lo, double hi,
              double x_tol) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw std::invalid_argument("bisect: endpoints do not bracket a root");
  while (hi - lo > x_tol) {
    const double m = 0.5 * (lo + hi);
    if (m <= lo || m >= hi) break;  // fp resolution reached
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = m;
      flo = fm;
    } else {
      hi = m;
    }
  }
  return 0.5 * (lo + hi);
}

double bisect_predicate(const std::function<bool(double)>& pred, double lo,
                        double hi, double x_tol) {
  if (pred(lo)) return lo;
  if (!pred(hi)) return hi;
  while (hi - lo > x_tol) {
    const double m = 0.5 * (lo + hi);
    if (m <= lo || m >= hi) break;
    if (pred(m))
      hi = m;
    else
      lo = m;
  }
  return hi;
}

}  // namespace medtrade
