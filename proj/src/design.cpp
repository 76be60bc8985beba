#include "gbf/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gbf/criteria.hpp"
#include "gbf/errors.hpp"

namespace gbf {

void RawDataset::validate() const {
  if (n() < 3) raise(errc::bad_input, "need at least 3 rows, got " + std::to_string(n()));
  if (p() < 1) raise(errc::bad_input, "need at least one predictor column");
  if (y.size() != X.rows()) raise(errc::bad_input, "response length does not match row count");
  if (!X.allFinite() || !y.allFinite()) raise(errc::non_finite, "non-finite entry in data");
  for (int j = 0; j < p(); ++j) {
    const double mean = X.col(j).mean();
    const double ss = (X.col(j).array() - mean).square().sum();
    if (ss == 0.0) {
      const std::string name = j < static_cast<int>(names.size()) ? names[j] : std::to_string(j);
      raise(errc::constant_column, "predictor column '" + name + "' is constant");
    }
  }
}

StandardizedDesign standardize(const RawDataset& raw) {
  raw.validate();
  const int n = raw.n(), p = raw.p();
  StandardizedDesign out;
  out.n = n;
  out.p = p;
  out.names = raw.names;
  out.ybar = raw.y.mean();
  out.v = raw.y.array() - out.ybar;
  out.vnorm2 = out.v.squaredNorm();
  if (out.vnorm2 == 0.0) raise(errc::degenerate_response, "response has zero variance");
  out.col_mean = raw.X.colwise().mean();
  out.X.resize(n, p);
  out.scale.resize(p);
  for (int j = 0; j < p; ++j) {
    const Eigen::VectorXd centered = raw.X.col(j).array() - out.col_mean(j);
    const double s = std::sqrt(centered.squaredNorm() / n);  // x'x/n = 1 convention
    out.scale(j) = s;
    out.X.col(j) = centered / s;
  }
  out.gram.noalias() = out.X.transpose() * out.X;
  out.crossmom.noalias() = out.X.transpose() * out.v;
  return out;
}

namespace {

// Deterministic ordering for reported spectra: descending eigenvalue; exact
// ties resolved by sign-canonicalized eigenvector lexicographic order.
void canonical_order(Eigen::VectorXd& lam, Eigen::MatrixXd& vecs) {
  const int m = static_cast<int>(lam.size());
  for (int i = 0; i < m; ++i) {
    int piv = 0;
    for (int k = 1; k < vecs.rows(); ++k)
      if (std::abs(vecs(k, i)) > std::abs(vecs(piv, i))) piv = k;
    if (vecs(piv, i) < 0.0) vecs.col(i) = -vecs.col(i);
  }
  std::vector<int> order(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (lam(a) != lam(b)) return lam(a) > lam(b);
    for (int k = 0; k < vecs.rows(); ++k)
      if (vecs(k, a) != vecs(k, b)) return vecs(k, a) > vecs(k, b);
    return a < b;
  });
  Eigen::VectorXd lam2(m);
  Eigen::MatrixXd vecs2(vecs.rows(), m);
  for (int i = 0; i < m; ++i) {
    lam2(i) = lam(order[static_cast<std::size_t>(i)]);
    vecs2.col(i) = vecs.col(order[static_cast<std::size_t>(i)]);
  }
  lam = std::move(lam2);
  vecs = std::move(vecs2);
}

void finish_spectrum(ModelSpectrum& out) {
  const int r = out.r;
  double sum_log = 0.0;
  double ls = 0.0;
  for (int i = 0; i < r; ++i) {
    sum_log += std::log(out.d(i));
    ls += out.pc_corr(i) * out.pc_corr(i) / (out.d(i) * out.d(i));
  }
  out.dbar = std::exp(sum_log / r);
  out.dmin = out.d(r - 1);
  out.lsnorm2 = ls;
}

}  // namespace

ModelSpectrum model_spectrum(const StandardizedDesign& design, ModelId model) {
  const int q = model.q();
  if (q < 1) raise(errc::invalid_model, "model_spectrum requires a non-null model");
  const int n = design.n;
  const double vnorm = std::sqrt(design.vnorm2);
  const double eps = std::numeric_limits<double>::epsilon();
  const std::vector<int> idx = model.columns();

  ModelSpectrum out;
  out.id = model;

  if (q < n - 1) {
    Eigen::MatrixXd G(q, q);
    Eigen::VectorXd c(q);
    for (int a = 0; a < q; ++a) {
      c(a) = design.crossmom(idx[static_cast<std::size_t>(a)]);
      for (int b = 0; b < q; ++b)
        G(a, b) = design.gram(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    Eigen::VectorXd lam = es.eigenvalues();
    Eigen::MatrixXd W = es.eigenvectors();
    canonical_order(lam, W);
    const double tol = q * eps * lam(0);
    if (!(lam(q - 1) > tol)) {
      out.status = SpectrumStatus::rank_deficient;
      return out;
    }
    out.r = q;
    out.d = lam.array().sqrt();
    out.pc_corr = (W.transpose() * c).array() / (out.d.array() * vnorm);
  } else {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int j : idx) A.selfadjointView<Eigen::Lower>().rankUpdate(design.X.col(j));
    A.triangularView<Eigen::StrictlyUpper>() = A.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    Eigen::VectorXd lam = es.eigenvalues();
    Eigen::MatrixXd U = es.eigenvectors();
    canonical_order(lam, U);
    const int r = n - 1;  // columns are centered, so rank caps at n-1
    const double tol = q * eps * lam(0);
    if (!(lam(r - 1) > tol)) {
      out.status = SpectrumStatus::rank_deficient;
      return out;
    }
    out.r = r;
    out.d = lam.head(r).array().sqrt();
    out.pc_corr = (U.leftCols(r).transpose() * design.v).array() / vnorm;
  }
  finish_spectrum(out);
  return out;
}

namespace detail {

bool submodel_stats(const StandardizedDesign& design, ModelId model, const Hyperparams& hp,
                    SweepWorkspace& ws, FitStats& out) {
  const int q = model.q();
  const int n = design.n;
  out = FitStats{};
  out.id = model;
  out.n = n;
  out.q = q;
  if (q == 0) return true;  // null model: R2 = Q2 = 0

  if (hp.nu == NuScheme::explicit_vec) {
    // Rare path; needs per-component correlations.
    const ModelSpectrum spec = model_spectrum(design, model);
    if (spec.status != SpectrumStatus::ok) return false;
    out = fit_statistics(spec, hp, n);
    return true;
  }

  const double eps = std::numeric_limits<double>::epsilon();
  ws.idx.clear();
  for (std::uint32_t m = model.mask; m != 0; m &= m - 1) ws.idx.push_back(std::countr_zero(m));

  double sum_log_lam = 0.0;
  double lam_min = 0.0, lam_max = 0.0;
  int r = 0;

  if (q < n - 1) {
    r = q;
    ws.G.resize(q, q);
    ws.c.resize(q);
    for (int a = 0; a < q; ++a) {
      const int ja = ws.idx[static_cast<std::size_t>(a)];
      ws.c(a) = design.crossmom(ja);
      for (int b = 0; b <= a; ++b) {
        const double g = design.gram(ja, ws.idx[static_cast<std::size_t>(b)]);
        ws.G(a, b) = g;
        ws.G(b, a) = g;
      }
    }
    ws.es.compute(ws.G, Eigen::EigenvaluesOnly);
    const auto& lam = ws.es.eigenvalues();
    lam_min = lam(0);
    lam_max = lam(q - 1);
    const double tol = q * eps * lam_max;
    if (!(lam_min > tol)) return false;
    for (int i = 0; i < q; ++i) sum_log_lam += std::log(lam(i));
    ws.llt.compute(ws.G);
    ws.z = ws.llt.solve(ws.c);
    const double r2 = ws.c.dot(ws.z) / design.vnorm2;
    out.R2 = std::min(r2, 1.0);
    out.lsnorm2 = ws.z.squaredNorm() / design.vnorm2;
    out.rss_scaled = std::max(1.0 - out.R2, 0.0);
  } else {
    r = n - 1;
    ws.outer_A = Eigen::MatrixXd::Zero(n, n);
    for (int j : ws.idx) ws.outer_A.selfadjointView<Eigen::Lower>().rankUpdate(design.X.col(j));
    ws.outer_A.triangularView<Eigen::StrictlyUpper>() = ws.outer_A.transpose();
    ws.es_outer.compute(ws.outer_A, Eigen::EigenvaluesOnly);
    const auto& lam = ws.es_outer.eigenvalues();  // ascending, lam(0) ~ 0 (1-direction)
    lam_min = lam(1);
    lam_max = lam(n - 1);
    const double tol = q * eps * lam_max;
    if (!(lam_min > tol)) return false;
    for (int i = 1; i < n; ++i) sum_log_lam += std::log(lam(i));
    // Minimum-norm LS: ||b^MP||^2 = v'A^+ v; shift the null direction (the
    // all-ones vector) so a Cholesky solve applies.
    ws.outer_A.array() += lam_max / n;
    ws.llt_outer.compute(ws.outer_A);
    ws.outer_v = ws.llt_outer.solve(design.v);
    out.R2 = 1.0;
    out.lsnorm2 = design.v.dot(ws.outer_v) / design.vnorm2;
    out.rss_scaled = 0.0;
  }

  out.r = r;
  out.dmin = std::sqrt(lam_min);
  out.dmax = std::sqrt(lam_max);
  out.dbar = std::exp(0.5 * sum_log_lam / r);
  if (hp.nu == NuScheme::paper) {
    out.sum_log_nu = sum_log_lam - r * std::log(lam_min);
    const double r2mq2 = lam_min * out.lsnorm2;  // R2 - Q2 = dmin^2 ||b||^2
    out.one_minus_Q2 = out.rss_scaled + r2mq2;
    out.Q2 = std::max(out.R2 - r2mq2, 0.0);
  } else {  // unit
    out.sum_log_nu = 0.0;
    out.one_minus_Q2 = 1.0;
    out.Q2 = 0.0;
  }
  return true;
}

}  // namespace detail

}  // namespace gbf
