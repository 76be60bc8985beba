#pragma once

#include <functional>

namespace gbf {

struct QuadResult {
  double value = 0.0;
  double abs_err = 0.0;
  long evals = 0;
  bool converged = false;
};

// Globally adaptive Gauss-Kronrod 7/15 on (lo, hi).  Intervals are split
// worst-error-first; endpoint behavior like t^c with c > -1 is handled by
// refinement (Kronrod nodes are interior).
QuadResult integrate(const std::function<double(double)>& f, double lo, double hi, double rtol,
                     int max_intervals = 4000);

// log of ∫_(0,1) exp(phi(t)) dt, max-factored so that huge magnitudes are
// safe.  Throws Error(quadrature_nonconverged) if refinement fails.
double log_integrate_01(const std::function<double(double)>& phi, double rtol);

}  // namespace gbf
