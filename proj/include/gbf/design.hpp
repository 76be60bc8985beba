#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "gbf/types.hpp"

namespace gbf {

struct RawDataset {
  Eigen::MatrixXd X;  // n x p
  Eigen::VectorXd y;  // n
  std::vector<std::string> names;

  int n() const noexcept { return static_cast<int>(X.rows()); }
  int p() const noexcept { return static_cast<int>(X.cols()); }

  // Enforces: n >= 3, p >= 1, finite entries, no constant column.
  void validate() const;
};

// Columns centered and scaled to x'x/n = 1; response centered.
struct StandardizedDesign {
  Eigen::VectorXd v;        // y - ybar
  double vnorm2 = 0.0;      // v'v
  double ybar = 0.0;
  Eigen::MatrixXd X;        // standardized predictors
  Eigen::MatrixXd gram;     // X'X (diagonal = n)
  Eigen::VectorXd crossmom; // X'v
  Eigen::VectorXd col_mean; // original column means
  Eigen::VectorXd scale;    // original per-column sqrt(mean square after centering)
  std::vector<std::string> names;
  int n = 0;
  int p = 0;
};

StandardizedDesign standardize(const RawDataset& raw);

enum class SpectrumStatus { ok, rank_deficient };

// Spectral summary of one submodel: the only thing any criterion consumes.
struct ModelSpectrum {
  ModelId id;
  int r = 0;                 // min(q, n-1)
  Eigen::VectorXd d;         // singular values of X_gamma, descending
  Eigen::VectorXd pc_corr;   // u_i'v / ||v||
  double dbar = 1.0;         // geometric mean of d
  double dmin = 1.0;         // d_r
  double lsnorm2 = 0.0;      // squared LS (or minimum-norm LS) coefficient norm, response scaled to unit length
  SpectrumStatus status = SpectrumStatus::ok;
};

// Eigendecomposition of the q x q Gram submatrix (q < n-1) or the n x n outer
// product X_gamma X_gamma' (q >= n-1).  Requires q >= 1.
ModelSpectrum model_spectrum(const StandardizedDesign& design, ModelId model);

namespace detail {

// Scratch space reused across the enumeration sweep to avoid allocation.
struct SweepWorkspace {
  using MatQ = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 32, 32>;
  using VecQ = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 32, 1>;
  MatQ G;
  VecQ c, z;
  Eigen::VectorXd outer_v;
  Eigen::MatrixXd outer_A;
  Eigen::SelfAdjointEigenSolver<MatQ> es;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_outer;
  Eigen::LLT<MatQ> llt;
  Eigen::LLT<Eigen::MatrixXd> llt_outer;
  std::vector<int> idx;
};

// Fit statistics for one model without materializing eigenvectors
// (eigenvalues + LLT solves).  Supports the "paper" and "unit" nu schemes;
// explicit nu callers go through model_spectrum + fit_statistics.
// Returns false when the submodel Gram is numerically rank deficient.
bool submodel_stats(const StandardizedDesign& design, ModelId model, const Hyperparams& hp,
                    SweepWorkspace& ws, FitStats& out);

}  // namespace detail

}  // namespace gbf
