#include "bigjump/numeric/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "bigjump/errors.hpp"

namespace bigjump::numeric {

QuadResult integrate(const std::function<double(double)>& f, double a, double b, double rel_tol, double abs_tol) {
  if (a == b) return {};
  if (a > b) {
    QuadResult r = integrate(f, b, a, rel_tol, abs_tol);
    return {-r.value, r.error};
  }
  double err = 0.0;
  double l1 = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, rel_tol * 0.1, &err, &l1);
  // Below ~64 ulp of the L1 norm the error estimate is roundoff.
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * l1;
  const double allowed = std::max({rel_tol * std::abs(v), abs_tol, floor});
  if ((!std::isfinite(v) || err > allowed) && std::isfinite(a) && std::isfinite(b)) {
    // Endpoint singularities: tanh-sinh clusters nodes at the ends.
    double e2 = 0.0, l2 = 0.0;
    boost::math::quadrature::tanh_sinh<double> ts;
    const double w = ts.integrate(f, a, b, rel_tol * 0.1, &e2, &l2);
    const double allowed2 = std::max({rel_tol * std::abs(w), abs_tol, 64.0 * std::numeric_limits<double>::epsilon() * l2});
    if (std::isfinite(w) && e2 <= allowed2) return {w, e2};
  }
  if ((!std::isfinite(v) || err > allowed) && std::isfinite(a) && b == std::numeric_limits<double>::infinity()) {
    // Slowly decaying tails on [a, inf).
    double e2 = 0.0, l2 = 0.0;
    boost::math::quadrature::exp_sinh<double> es;
    const double w = es.integrate(f, a, b, rel_tol * 0.1, &e2, &l2);
    const double allowed2 = std::max({rel_tol * std::abs(w), abs_tol, 64.0 * std::numeric_limits<double>::epsilon() * l2});
    if (std::isfinite(w) && e2 <= allowed2) return {w, e2};
  }
  if (!std::isfinite(v) || err > allowed) {
    // Cancellation can make |v| tiny relative to the L1 norm; accept the L1-relative error there.
    if (std::isfinite(v) && err <= rel_tol * l1 && std::abs(v) < 1e-6 * l1) return {v, err};
    std::ostringstream os;
    os << "quadrature did not converge on [" << a << ", " << b << "]: value " << v << ", achieved error " << err;
    throw NumericalError(os.str());
  }
  return {v, err};
}

QuadResult integrate_pieces(const std::function<double(double)>& f, double a, double b,
                            const std::vector<double>& breaks, double rel_tol, double abs_tol) {
  std::vector<double> pts{a};
  std::vector<double> inner(breaks);
  std::sort(inner.begin(), inner.end());
  for (double x : inner) {
    if (x > pts.back() && x < b) pts.push_back(x);
  }
  pts.push_back(b);
  QuadResult total;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const QuadResult r = integrate(f, pts[i], pts[i + 1], rel_tol, abs_tol);
    total.value += r.value;
    total.error += r.error;
  }
  return total;
}

}  // namespace bigjump::numeric
