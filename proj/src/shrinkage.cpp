#include "gbf/shrinkage.hpp"

#include <cmath>

#include "gbf/errors.hpp"
#include "gbf/quadrature.hpp"

namespace gbf {

namespace {

// nu_i for descending singular values d, under the active scheme.
double nu_at(const Eigen::ArrayXd& d, const Hyperparams& hp, int i, int r) {
  switch (hp.nu) {
    case NuScheme::paper: {
      const double ratio = d(i) / d(r - 1);
      return ratio * ratio;
    }
    case NuScheme::unit:
      return 1.0;
    case NuScheme::explicit_vec:
      if (static_cast<int>(hp.nu_explicit.size()) < r)
        raise(errc::bad_hyper, "explicit nu vector shorter than the model rank");
      return hp.nu_explicit[static_cast<std::size_t>(i)];
  }
  return 1.0;
}

}  // namespace

double shrink_factor(const FitStats& stats, const Hyperparams& hp) {
  hp.validate();
  const int q = stats.q, n = stats.n;
  if (q == 0) return 1.0;  // no coefficients; fitted values are the mean either way
  if (q >= n - 1) {
    const double eg = hp.eg.kind == EgRule::Kind::fixed
                          ? hp.eg.value
                          : (stats.dmin * stats.dmin) / (stats.dmax * stats.dmax);
    if (!(eg >= 0.0)) raise(errc::bad_hyper, "E[g] rule produced a negative value");
    return 1.0 / (1.0 + eg);
  }
  if (stats.rss_scaled < 1e-12)
    raise(errc::saturated_fit, "shrink factor undefined for a numerically saturated fit");
  const double h = 0.5 * (n - q - 3) - hp.a;
  const double ratio = (stats.one_minus_Q2 / stats.rss_scaled) * h / (0.5 * q + hp.a + 1.0);
  return 1.0 / (1.0 + ratio);
}

double shrink_factor_oracle(const FitStats& stats, const Hyperparams& hp) {
  hp.validate();
  const int q = stats.q, n = stats.n;
  if (!(q >= 1 && q < n - 1)) raise(errc::bad_input, "oracle requires 1 <= q < n-1");
  if (!(stats.rss_scaled > 0.0)) raise(errc::bad_input, "oracle requires a non-saturated fit");
  const double a = hp.a;
  const double b = hp.b(n, q);
  const double e2 = 0.5 * (n - 1 - q) - a - b - 2.0;
  const double rss = stats.rss_scaled;
  const double omq2 = stats.one_minus_Q2;
  const double s = 0.5 * (n + 1);
  auto phi_num = [&](double t) {
    const double log_t = std::log(t);
    const double log_1mt = std::log1p(-t);
    const double g = t / (1.0 - t);
    return b * (log_t - log_1mt) - e2 * log_1mt - s * std::log(g * rss + omq2) - 2.0 * log_1mt;
  };
  auto phi_den = [&](double t) { return phi_num(t) - std::log1p(-t); };
  const double log_num = log_integrate_01(phi_num, 1e-10);
  const double log_den = log_integrate_01(phi_den, 1e-10);
  return std::exp(log_num - log_den);
}

namespace {

ShrinkageFit fitted_impl(const ModelSpectrum& spec, const StandardizedDesign& design, double H,
                         const Hyperparams& hp) {
  if (spec.status != SpectrumStatus::ok)
    raise(errc::rank_deficient, "fitted_values needs a full-rank model");
  if (!(H >= 0.0 && H <= 1.0)) raise(errc::bad_input, "shrink factor must lie in [0, 1]");
  const int n = design.n;
  const int q = spec.id.q();
  ShrinkageFit out;
  out.id = spec.id;
  out.H = H;
  out.fitted = Eigen::VectorXd::Constant(n, design.ybar);
  if (q == 0) {
    out.weights.resize(0);
    return out;
  }

  const auto cols = spec.id.columns();
  Eigen::MatrixXd Xs(n, q);
  for (int a = 0; a < q; ++a) Xs.col(a) = design.X.col(cols[static_cast<std::size_t>(a)]);

  const int r = spec.r;
  out.weights.resize(r);
  for (int i = 0; i < r; ++i) out.weights(i) = 1.0 - H / nu_at(spec.d, hp, i, r);

  if (q < n - 1) {
    // beta = W diag(w_i / lambda_i) W' X'v on the submodel Gram spectrum.
    const Eigen::MatrixXd G = Xs.transpose() * Xs;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);  // ascending
    const Eigen::VectorXd c = Xs.transpose() * design.v;
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(q);
    for (int i = 0; i < r; ++i) {
      const int k = q - 1 - i;  // descending position i
      const Eigen::VectorXd w = es.eigenvectors().col(k);
      beta += (out.weights(i) / es.eigenvalues()(k)) * (w.dot(c)) * w;
    }
    out.fitted += Xs * beta;
  } else {
    // Work in the n-dimensional outer spectrum; u_0 spans the constant.
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    A.selfadjointView<Eigen::Lower>().rankUpdate(Xs);
    A.triangularView<Eigen::StrictlyUpper>() = A.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);  // ascending
    for (int i = 0; i < r; ++i) {
      const int k = n - 1 - i;
      const Eigen::VectorXd u = es.eigenvectors().col(k);
      out.fitted += (u.dot(design.v)) * out.weights(i) * u;
    }
  }
  return out;
}

}  // namespace

ShrinkageFit fitted_values(const ModelSpectrum& spec, const StandardizedDesign& design, double H,
                           const Hyperparams& hp) {
  return fitted_impl(spec, design, H, hp);
}

ShrinkageFit fitted_values(const ModelSpectrum& spec, const StandardizedDesign& design, double H) {
  Hyperparams hp;
  hp.nu = NuScheme::unit;
  return fitted_impl(spec, design, H, hp);
}

}  // namespace gbf
