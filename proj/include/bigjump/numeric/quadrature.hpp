#pragma once

#include <functional>
#include <vector>

namespace bigjump::numeric {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

// Adaptive Gauss-Kronrod on [a, b]; either limit may be infinite. Throws
// NumericalError (message carries the achieved error) when the estimate is
// worse than max(rel_tol * |value|, abs_tol).
QuadResult integrate(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-9,
                     double abs_tol = 0.0);

// Same, split at the given interior breakpoints (sorted, duplicates ignored).
QuadResult integrate_pieces(const std::function<double(double)>& f, double a, double b,
                            const std::vector<double>& breaks, double rel_tol = 1e-9, double abs_tol = 0.0);

}  // namespace bigjump::numeric
