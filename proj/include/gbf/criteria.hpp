#pragma once

#include "gbf/design.hpp"
#include "gbf/types.hpp"

namespace gbf {

// R2, Q2, sum_log_nu and friends under the hyperparameter nu scheme.
// Requires spec.status == ok.
FitStats fit_statistics(const ModelSpectrum& spec, const Hyperparams& hp, int n);

// log BF[M_gamma; M_N] under the recommended defaults (a = -3/4, paper nu).
// Throws SaturatedFit / InvalidModel per contract; q = 0 returns 0.
CriterionScore log_gbf(const ModelSpectrum& spec, int n);
CriterionScore log_gbf(const FitStats& stats);

// General closed-form BF(a, nu), both branches.
CriterionScore log_bf_general(const FitStats& stats, const Hyperparams& hp);

// ZE: Zellner g-prior special case (a = -3/4, unit nu), written from its own
// closed form rather than by delegation so the reduction identity is a real
// cross-check.
CriterionScore log_ze(const FitStats& stats);

// Adaptive-quadrature evaluation of the g-marginal Bayes factor; independent
// oracle for log_bf_general, never used in production scoring.  q < n-1 only.
double log_marginal_oracle(const FitStats& stats, const Hyperparams& hp);

// Empirical Bayes: max_g of the exact log marginal ratio with plug-in
// sigma^2 = rss/(n-q-1), by golden-section search on log(1+g) in [0, 40].
CriterionScore eb_score(const FitStats& stats, double rss, int n);

struct IcScores {
  CriterionScore aic;
  CriterionScore aicc;
  CriterionScore bic;
};

// AIC/AICc/BIC from the residual sum of squares (q+2 parameters).
IcScores ic_scores(double rss, int n, int q, ModelId id = ModelId{});

struct GPriorDiagnostics {
  double mode_g = 0.0;         // b/(a+2)
  double inv_mean_inv_g = 0.0; // b/(a+1)
};

GPriorDiagnostics g_prior_diagnostics(const Hyperparams& hp, int n, int q);

namespace detail {

// Maximizing log(1+g) behind eb_score; the fitted-value rule needs it too.
// Preconditions as for eb_score (1 <= q <= n-3, non-saturated).
double eb_log1pg(const FitStats& stats) noexcept;

// Non-throwing scorers used by the enumeration sweep.
CriterionScore try_log_gbf(const FitStats& stats) noexcept;
CriterionScore try_log_bf_general(const FitStats& stats, const Hyperparams& hp) noexcept;
CriterionScore try_log_ze(const FitStats& stats) noexcept;
CriterionScore try_eb_score(const FitStats& stats, double rss, int n) noexcept;
void try_ic_scores(double rss_scaled, double vnorm2, int n, int q, ModelId id, CriterionScore& aic,
                   CriterionScore& aicc, CriterionScore& bic) noexcept;

// log Beta via lgamma.
double lbeta(double x, double y) noexcept;

}  // namespace detail

}  // namespace gbf
