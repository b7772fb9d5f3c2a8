#pragma once

#include <functional>

namespace bigjump::numeric {

// Bisection for a sign change of f on [lo, hi] (f(lo) and f(hi) must have
// opposite signs or one of them is zero). Runs until the bracket is
// rel_tol-relative narrow; rel_tol = 0 runs to adjacent doubles. Returns the
// endpoint with the smaller |f|.
double bisect(const std::function<double(double)>& f, double lo, double hi, double rel_tol = 0.0);

// Finds the smallest x in [lo, hi] with pred(x) true, assuming pred is false
// then true along the interval. pred(hi) must hold.
double bisect_predicate(const std::function<bool(double)>& pred, double lo, double hi, double rel_tol = 1e-12);

}  // namespace bigjump::numeric
