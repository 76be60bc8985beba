#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gbf/design.hpp"
#include "gbf/selection.hpp"
#include "gbf/types.hpp"

namespace gbf {

enum class ScenarioKind { correlated, simple };

struct Scenario {
  ScenarioKind kind = ScenarioKind::simple;
  int n = 30;
  int p = 16;
  ModelId true_set;        // 1-based columns x1..xp in files, bitmask here
  double coef = 2.0;       // shared coefficient on true predictors
  double intercept = 1.0;
  double noise_sd = 1.0;   // 0 gives the noiseless diagnostic variant
  int reps = 1;
  std::uint64_t seed = 1;

  void validate() const;
};

// Key=value scenario file (see README for the format).
Scenario parse_scenario(std::istream& in);
Scenario load_scenario(const std::string& path);

RawDataset gen_design(const Scenario& sc, int rep);
Eigen::VectorXd gen_response(const RawDataset& X, const Scenario& sc, int rep);

// ||fitted - (alpha 1 + X_T beta)||^2 / (n sigma2), X_T in raw units.
double prediction_error(const Eigen::VectorXd& fitted, double alpha,
                        const Eigen::MatrixXd& X_true, double coef, double sigma2);

struct PerCritRecord {
  ModelId best;
  double best_value = 0.0;
  std::uint64_t rank = 0;              // of the true model, 1 = best
  std::uint64_t rank_within_size = 0;  // among models with q == q_T
  double pred_err = 0.0;
  bool true_valid = false;
};

struct RepRecord {
  int rep = 0;
  std::vector<PerCritRecord> per_crit;  // aligned with the criteria list
  double oracle_err = 0.0;
  bool has_oracle = false;
  bool failed = false;
};

struct SummaryStats {
  double min = 0, lq = 0, median = 0, mean = 0, uq = 0, max = 0;
};

struct CritReport {
  Criterion criterion = Criterion::gbf;
  double freq_first = 0, freq_top3 = 0;
  double pred_mean = 0, pred_lq = 0, pred_uq = 0;
  std::vector<double> size_freq;  // index = best-model size, 0..p
  std::vector<double> incl_freq;  // per predictor, membership of the best model
  SummaryStats rel_rank;          // rank / 2^p
  double within_size_first = 0, within_size_first2 = 0, within_size_first3 = 0;
};

struct BenchReport {
  Scenario scenario;
  Hyperparams hp;
  std::vector<Criterion> criteria;
  std::vector<CritReport> per_criterion;
  bool has_oracle = false;
  double oracle_mean = 0, oracle_lq = 0, oracle_uq = 0;
  int failures = 0;
  std::vector<RepRecord> records;  // kept for tests; not serialized
};

// Runs the replicated experiment; deterministic for a fixed scenario
// regardless of cfg.threads.
BenchReport run_replications(const Scenario& sc, const std::vector<Criterion>& criteria,
                             const SelectionConfig& cfg);

struct TrendRow {
  int n = 0;
  int reps = 0;
  double freq_first = 0.0;
  double se = 0.0;  // binomial standard error
};

std::vector<TrendRow> consistency_sweep(const Scenario& base, const std::vector<int>& n_grid,
                                        const SelectionConfig& cfg);

}  // namespace gbf
