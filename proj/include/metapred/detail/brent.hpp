#pragma once

#include <cmath>
#include <limits>

#include "metapred/errors.hpp"

namespace metapred::detail {

// Brent's zeroin on a bracket [a, b] with f(a) * f(b) <= 0 (netlib
// zeroin structure: bisection + secant/inverse quadratic steps).
// Returns as soon as |f| <= f_tol, or when the bracket collapses to
// machine precision; throws numeric_error if max_iter steps pass
// without reaching f_tol.
template <class F>
double brent_root(F&& f, double a, double b, double fa, double fb,
                  double f_tol, int max_iter = 200) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;

  double c = a, fc = fa;
  for (int it = 0; it < max_iter; ++it) {
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    if (std::abs(fb) <= f_tol) return b;

    const double tol_act = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b);
    double new_step = 0.5 * (c - b);
    if (std::abs(new_step) <= tol_act) return b;

    const double prev_step = b - a;
    if (std::abs(prev_step) >= tol_act && std::abs(fa) > std::abs(fb)) {
      const double cb = c - b;
      double p, q;
      if (a == c) {
        const double t1 = fb / fa;
        p = cb * t1;
        q = 1.0 - t1;
      } else {
        const double r = fa / fc, t1 = fb / fc, t2 = fb / fa;
        p = t2 * (cb * r * (r - t1) - (b - a) * (t1 - 1.0));
        q = (r - 1.0) * (t1 - 1.0) * (t2 - 1.0);
      }
      if (p > 0.0)
        q = -q;
      else
        p = -p;
      if (p < 0.75 * cb * q - 0.5 * std::abs(tol_act * q) &&
          p < std::abs(0.5 * prev_step * q))
        new_step = p / q;
    }

    if (std::abs(new_step) < tol_act) new_step = new_step > 0.0 ? tol_act : -tol_act;

    a = b;
    fa = fb;
    b += new_step;
    fb = f(b);
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
    }
  }
  throw numeric_error("brent_root: no convergence to the requested tolerance");
}

}  // namespace metapred::detail
