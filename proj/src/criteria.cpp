#include "gbf/criteria.hpp"

#include <cmath>
#include <numbers>

#include "gbf/errors.hpp"
#include "gbf/quadrature.hpp"

namespace gbf {

namespace {

constexpr double kSaturatedTol = 1e-12;  // 1 - R2 below this: numerically saturated
constexpr double kEbLogGMax = 40.0;      // search window for log(1+g)
constexpr double kEbTol = 1e-10;         // absolute tolerance on log(1+g)

[[noreturn]] void throw_status(ScoreStatus st, ModelId id) {
  switch (st) {
    case ScoreStatus::rank_deficient:
      raise(errc::rank_deficient, "model " + std::to_string(id.mask) + " is rank deficient");
    case ScoreStatus::saturated:
      raise(errc::saturated_fit, "model " + std::to_string(id.mask) + " is numerically saturated (1-R2 < 1e-12)");
    case ScoreStatus::unavailable_large_q:
      raise(errc::invalid_model, "criterion undefined for q >= n-1");
    case ScoreStatus::no_residual_df:
      raise(errc::no_residual_df, "no residual degrees of freedom (q >= n-2)");
    case ScoreStatus::aicc_undefined:
      raise(errc::aicc_undefined, "AICc undefined (n-q-3 <= 0)");
    case ScoreStatus::ok:
      break;
  }
  raise(errc::bad_input, "unexpected status");
}

CriterionScore checked(CriterionScore s) {
  if (s.status != ScoreStatus::ok) throw_status(s.status, s.id);
  return s;
}

}  // namespace

namespace detail {

double lbeta(double x, double y) noexcept {
  int sign;
  return ::lgamma_r(x, &sign) + ::lgamma_r(y, &sign) - ::lgamma_r(x + y, &sign);
}

CriterionScore try_log_gbf(const FitStats& s) noexcept {
  CriterionScore out{s.id, Criterion::gbf, 0.0, ScoreStatus::ok, false};
  const int q = s.q, n = s.n;
  if (q == 0) return out;
  if (q < n - 1) {
    if (s.rss_scaled < kSaturatedTol) {
      out.status = ScoreStatus::saturated;
      return out;
    }
    const double h = 0.5 * (n - q) - 0.75;
    out.value = -q * std::log(s.dbar / s.dmin)
                + lbeta(0.5 * q + 0.25, h) - lbeta(0.25, h)
                - (0.25 + 0.5 * q) * std::log(s.rss_scaled + s.dmin * s.dmin * s.lsnorm2)
                - h * std::log(s.rss_scaled);
  } else {
    out.value = -(n - 1) * (std::log(s.dbar) + 0.5 * std::log(s.lsnorm2));
  }
  return out;
}

CriterionScore try_log_bf_general(const FitStats& s, const Hyperparams& hp) noexcept {
  CriterionScore out{s.id, Criterion::general, 0.0, ScoreStatus::ok, false};
  const int q = s.q, n = s.n;
  const double a = hp.a;
  if (q == 0) return out;
  if (q < n - 1) {
    if (s.rss_scaled < kSaturatedTol) {
      out.status = ScoreStatus::saturated;
      return out;
    }
    const double h = 0.5 * (n - q - 3) - a;
    out.value = -0.5 * s.sum_log_nu
                + lbeta(0.5 * q + a + 1.0, h) - lbeta(a + 1.0, h)
                - (0.5 * q + a + 1.0) * std::log(s.one_minus_Q2)
                - h * std::log(s.rss_scaled);
  } else {
    out.value = -0.5 * s.sum_log_nu - 0.5 * (n - 1) * std::log(s.one_minus_Q2);
  }
  return out;
}

CriterionScore try_log_ze(const FitStats& s) noexcept {
  CriterionScore out{s.id, Criterion::ze, 0.0, ScoreStatus::ok, false};
  const int q = s.q, n = s.n;
  if (q == 0) return out;
  if (q >= n - 1) {
    out.status = ScoreStatus::unavailable_large_q;
    return out;
  }
  if (s.rss_scaled < kSaturatedTol) {
    out.status = ScoreStatus::saturated;
    return out;
  }
  const double h = 0.5 * (n - q) - 0.75;
  out.value = lbeta(0.5 * q + 0.25, h) - lbeta(0.25, h) - h * std::log(s.rss_scaled);
  return out;
}

double eb_log1pg(const FitStats& s) noexcept {
  // The plug-in log marginal ratio is, in u = log(1+g),
  //   A - (q/2) u + S (1 - e^-u),  S = (n-q-1) R^2 / (2 (1-R^2)),
  // unimodal on [0, inf); search u on [0, 40] and check both ends.
  const int q = s.q, n = s.n;
  const double df = n - q - 1;
  const double S = 0.5 * df * s.R2 / s.rss_scaled;
  auto f = [&](double u) { return -0.5 * q * u + S * (1.0 - std::exp(-u)); };

  constexpr double invphi = 0.6180339887498948482;
  double lo = 0.0, hi = kEbLogGMax;
  double c = hi - invphi * (hi - lo), d = lo + invphi * (hi - lo);
  double fc = f(c), fd = f(d);
  while (hi - lo > kEbTol) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - invphi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + invphi * (hi - lo);
      fd = f(d);
    }
  }
  double u = 0.5 * (lo + hi);
  double fu = f(u);
  if (0.0 >= fu) {  // f(0) = 0
    u = 0.0;
    fu = 0.0;
  }
  if (f(kEbLogGMax) > fu) u = kEbLogGMax;
  return u;
}

CriterionScore try_eb_score(const FitStats& s, double /*rss*/, int n) noexcept {
  CriterionScore out{s.id, Criterion::eb, 0.0, ScoreStatus::ok, false};
  const int q = s.q;
  if (q == 0) return out;
  if (q >= n - 1) {
    out.status = ScoreStatus::unavailable_large_q;
    return out;
  }
  if (q >= n - 2) {
    out.status = ScoreStatus::no_residual_df;
    return out;
  }
  if (s.rss_scaled < kSaturatedTol) {
    out.status = ScoreStatus::saturated;
    return out;
  }
  const double df = n - q - 1;
  const double S = 0.5 * df * s.R2 / s.rss_scaled;
  const double A = -0.5 * (n - 1) * std::log(s.rss_scaled * (n - 1) / df)
                   - 0.5 * df / s.rss_scaled + 0.5 * (n - 1);
  const double u = eb_log1pg(s);
  out.boundary_hit = (u <= kEbTol) || (u >= kEbLogGMax - kEbTol);
  out.value = A + (-0.5 * q * u + S * (1.0 - std::exp(-u)));
  return out;
}

void try_ic_scores(double rss_scaled, double vnorm2, int n, int q, ModelId id, CriterionScore& aic,
                   CriterionScore& aicc, CriterionScore& bic) noexcept {
  aic = CriterionScore{id, Criterion::aic, 0.0, ScoreStatus::ok, false};
  aicc = CriterionScore{id, Criterion::aicc, 0.0, ScoreStatus::ok, false};
  bic = CriterionScore{id, Criterion::bic, 0.0, ScoreStatus::ok, false};
  if (q >= n - 1) {
    aic.status = aicc.status = bic.status = ScoreStatus::unavailable_large_q;
    return;
  }
  if (rss_scaled < kSaturatedTol) {
    aic.status = aicc.status = bic.status = ScoreStatus::saturated;
    return;
  }
  const double rss = vnorm2 * rss_scaled;
  const double mll = -0.5 * n * (std::log(2.0 * std::numbers::pi * rss / n) + 1.0);
  aic.value = -2.0 * mll + 2.0 * (q + 2);
  bic.value = -2.0 * mll + q * std::log(static_cast<double>(n));
  if (n - q - 3 > 0)
    aicc.value = -2.0 * mll + 2.0 * (q + 2) * static_cast<double>(n) / (n - q - 3);
  else
    aicc.status = ScoreStatus::aicc_undefined;
}

}  // namespace detail

FitStats fit_statistics(const ModelSpectrum& spec, const Hyperparams& hp, int n) {
  if (spec.status != SpectrumStatus::ok)
    raise(errc::invalid_model, "fit_statistics requires an ok spectrum");
  const int q = spec.id.q();
  FitStats out;
  out.id = spec.id;
  out.n = n;
  out.q = q;
  out.r = spec.r;
  out.dbar = spec.dbar;
  out.dmin = spec.dmin;
  out.dmax = spec.d(0);
  out.lsnorm2 = spec.lsnorm2;
  double r2 = 0.0;
  for (int i = 0; i < spec.r; ++i) r2 += spec.pc_corr(i) * spec.pc_corr(i);
  if (q >= n - 1) {
    out.R2 = 1.0;  // v lies in the span: structural
    out.rss_scaled = 0.0;
  } else {
    out.R2 = std::min(r2, 1.0);
    out.rss_scaled = std::max(1.0 - out.R2, 0.0);
  }
  switch (hp.nu) {
    case NuScheme::paper: {
      double sum_log = 0.0;
      for (int i = 0; i < spec.r; ++i) sum_log += std::log(spec.d(i));
      out.sum_log_nu = 2.0 * (sum_log - spec.r * std::log(spec.dmin));
      const double r2mq2 = spec.dmin * spec.dmin * spec.lsnorm2;
      out.one_minus_Q2 = out.rss_scaled + r2mq2;
      out.Q2 = std::max(out.R2 - r2mq2, 0.0);
      break;
    }
    case NuScheme::unit:
      out.sum_log_nu = 0.0;
      out.one_minus_Q2 = 1.0;
      out.Q2 = 0.0;
      break;
    case NuScheme::explicit_vec: {
      if (static_cast<int>(hp.nu_explicit.size()) < spec.r)
        raise(errc::bad_hyper, "explicit nu vector shorter than the model rank");
      double sum_log = 0.0, back = 0.0;
      for (int i = 0; i < spec.r; ++i) {
        const double nu = hp.nu_explicit[static_cast<std::size_t>(i)];
        if (!(nu > 0.0)) raise(errc::bad_hyper, "explicit nu entries must be positive");
        sum_log += std::log(nu);
        back += spec.pc_corr(i) * spec.pc_corr(i) / nu;
      }
      out.sum_log_nu = sum_log;
      out.one_minus_Q2 = out.rss_scaled + back;
      out.Q2 = std::max(out.R2 - back, 0.0);
      break;
    }
  }
  return out;
}

CriterionScore log_gbf(const FitStats& stats) { return checked(detail::try_log_gbf(stats)); }

CriterionScore log_gbf(const ModelSpectrum& spec, int n) {
  if (spec.status != SpectrumStatus::ok)
    raise(errc::invalid_model, "log_gbf on a rank-deficient model");
  Hyperparams hp;  // gBF only uses nu-independent statistics
  return log_gbf(fit_statistics(spec, hp, n));
}

CriterionScore log_bf_general(const FitStats& stats, const Hyperparams& hp) {
  hp.validate();
  return checked(detail::try_log_bf_general(stats, hp));
}

CriterionScore log_ze(const FitStats& stats) { return checked(detail::try_log_ze(stats)); }

CriterionScore eb_score(const FitStats& stats, double rss, int n) {
  return checked(detail::try_eb_score(stats, rss, n));
}

IcScores ic_scores(double rss, int n, int q, ModelId id) {
  if (!(rss > 0.0)) raise(errc::bad_input, "ic_scores requires rss > 0");
  const double mll = -0.5 * n * (std::log(2.0 * std::numbers::pi * rss / n) + 1.0);
  IcScores out;
  out.aic = CriterionScore{id, Criterion::aic, -2.0 * mll + 2.0 * (q + 2), ScoreStatus::ok, false};
  out.bic = CriterionScore{id, Criterion::bic, -2.0 * mll + q * std::log(static_cast<double>(n)),
                           ScoreStatus::ok, false};
  out.aicc = CriterionScore{id, Criterion::aicc, 0.0, ScoreStatus::ok, false};
  if (n - q - 3 > 0)
    out.aicc.value = -2.0 * mll + 2.0 * (q + 2) * static_cast<double>(n) / (n - q - 3);
  else
    out.aicc.status = ScoreStatus::aicc_undefined;
  return out;
}

GPriorDiagnostics g_prior_diagnostics(const Hyperparams& hp, int n, int q) {
  hp.validate();
  if (!(q < n - 1)) raise(errc::bad_input, "g_prior_diagnostics requires q < n-1");
  const double b = hp.b(n, q);
  return GPriorDiagnostics{b / (hp.a + 2.0), b / (hp.a + 1.0)};
}

double log_marginal_oracle(const FitStats& stats, const Hyperparams& hp) {
  hp.validate();
  const int q = stats.q, n = stats.n;
  if (!(q < n - 1)) raise(errc::bad_input, "log_marginal_oracle requires q < n-1");
  if (q == 0) return 0.0;
  const double a = hp.a;
  const double b = hp.b(n, q);
  const double e_one_plus_g = -a - b - 2.0 + 0.5 * (n - 1 - q);
  const double e_lik = -0.5 * (n - 1);
  const double rss = stats.rss_scaled;
  const double omq2 = stats.one_minus_Q2;
  // g = t/(1-t): log g = log t - log(1-t), log(1+g) = -log(1-t),
  // dg = dt/(1-t)^2.
  auto phi = [&](double t) {
    const double log_t = std::log(t);
    const double log_1mt = std::log1p(-t);
    const double g = t / (1.0 - t);
    return b * log_t - b * log_1mt - e_one_plus_g * log_1mt +
           e_lik * std::log(g * rss + omq2) - 2.0 * log_1mt;
  };
  const double log_integral = log_integrate_01(phi, 1e-9);
  return -0.5 * stats.sum_log_nu + log_integral - detail::lbeta(a + 1.0, b + 1.0);
}

}  // namespace gbf
