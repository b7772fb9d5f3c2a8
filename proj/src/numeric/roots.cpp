#include "bigjump/numeric/roots.hpp"

#include <cmath>

#include "bigjump/errors.hpp"

namespace bigjump::numeric {

double bisect(const std::function<double(double)>& f, double lo, double hi, double rel_tol) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (std::signbit(flo) == std::signbit(fhi)) throw NumericalError("bisection bracket has no sign change");
  for (int it = 0; it < 2000; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (rel_tol > 0.0 && (hi - lo) <= rel_tol * std::max(std::abs(lo), std::abs(hi))) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (std::signbit(fm) == std::signbit(flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  return std::abs(flo) <= std::abs(fhi) ? lo : hi;
}

double bisect_predicate(const std::function<bool(double)>& pred, double lo, double hi, double rel_tol) {
  if (pred(lo)) return lo;
  for (int it = 0; it < 2000; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if ((hi - lo) <= rel_tol * std::max(std::abs(lo), std::abs(hi))) break;
    if (pred(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace bigjump::numeric
