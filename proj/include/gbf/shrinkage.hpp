#pragma once

#include <Eigen/Dense>

#include "gbf/criteria.hpp"
#include "gbf/design.hpp"
#include "gbf/types.hpp"

namespace gbf {

struct ShrinkageFit {
  ModelId id;
  double H = 0.0;
  Eigen::VectorXd fitted;   // intercept restored: ybar + shrunk projection
  Eigen::VectorXd weights;  // per principal component, 1 - H/nu_i
};

// Posterior shrink factor H(y) = E[sigma^-2 (1+g)^-1 | y] / E[sigma^-2 | y].
// Closed form for q < n-1; (1 + E[g])^-1 with the configured E[g] rule for
// q >= n-1.
double shrink_factor(const FitStats& stats, const Hyperparams& hp);

// Independent double-quadrature evaluation of the same ratio (tests only).
double shrink_factor_oracle(const FitStats& stats, const Hyperparams& hp);

// Fitted values ybar + sum_i (u_i'v) (1 - H/nu_i) u_i.  Eigenvectors of the
// submodel Gram are materialized here (scoring never needs them).
ShrinkageFit fitted_values(const ModelSpectrum& spec, const StandardizedDesign& design, double H,
                           const Hyperparams& hp);
ShrinkageFit fitted_values(const ModelSpectrum& spec, const StandardizedDesign& design, double H);

}  // namespace gbf
