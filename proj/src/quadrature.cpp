#include "medtrade/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace medtrade {
namespace {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK dqk15).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double kronrod;
  double err;
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double resk = kWgk[7] * fc;
  double resg = kWg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kXgk[i];
    const double fsum = f(c - dx) + f(c + dx);
    resk += kWgk[i] * fsum;
    if (i % 2 == 1) resg += kWg[i / 2] * fsum;
  }
  return {resk * h, std::fabs((resk - resg) * h)};
}

double adapt(const std::function<double(double)>& f, double a, double b,
             double abs_tol, double rel_tol, int depth, int max_depth) {
  const Panel p = gk15(f, a, b);
  const double tol = std::max(abs_tol, rel_tol * std::fabs(p.kronrod));
  if (p.err <= tol || depth >= max_depth) return p.kronrod;
  const double m = 0.5 * (a + b);
  if (!(a < m && m < b)) return p.kronrod;  // interval exhausted in fp
  return adapt(f, a, m, 0.5 * abs_tol, rel_tol, depth + 1, max_depth) +
         adapt(f, m, b, 0.5 * abs_tol, rel_tol, depth + 1, max_depth);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opt) {
  if (a == b) return 0.0;
  if (a > b) return -integrate(f, b, a, opt);
  return adapt(f, a, b, opt.abs_tol, opt.rel_tol, 0, opt.max_depth);
}

double integrate_split(const std::function<double(double)>& f, double a,
                       double b, const std::vector<double>& breakpoints,
                       const QuadratureOptions& opt) {
  if (a == b) return 0.0;
  if (a > b) return -integrate_split(f, b, a, breakpoints, opt);
  std::vector<double> pts;
  pts.reserve(breakpoints.size() + 2);
  pts.push_back(a);
  for (double x : breakpoints)
    if (x > a && x < b) pts.push_back(x);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    if (pts[i] < pts[i + 1]) total += integrate(f, pts[i], pts[i + 1], opt);
  return total;
}

}  // namespace medtrade
