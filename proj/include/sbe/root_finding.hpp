#pragma once

#include <cmath>
#include <limits>
#include <utility>

namespace sbe {

struct RootResult {
  double x = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Solves g(x) = target for g strictly increasing on the bracket [lo, hi],
/// g(lo) <= target <= g(hi). `eval(x)` returns {g(x), g'(x)}.
///
/// Newton steps are taken while they stay strictly inside the current
/// bracket; otherwise the bracket is bisected. The bracket shrinks on every
/// evaluation, so the iteration cannot diverge.
template <class Eval>
RootResult newton_bisect(Eval&& eval, double target, double lo, double hi, double guess, double abs_tol,
                         int max_iterations = 200) {
  RootResult out;
  double x = (guess > lo && guess < hi) ? guess : 0.5 * (lo + hi);
  for (int it = 1; it <= max_iterations; ++it) {
    const auto [g, dg] = eval(x);
    const double r = g - target;
    out.x = x;
    out.residual = r;
    out.iterations = it;
    if (std::abs(r) <= abs_tol) {
      out.converged = true;
      return out;
    }
    if (r < 0.0)
      lo = x;
    else
      hi = x;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) return out;

    double next = x - r / dg;
    if (!std::isfinite(next) || next <= lo || next >= hi) next = 0.5 * (lo + hi);
    x = next;
  }
  return out;
}

}  // namespace sbe
