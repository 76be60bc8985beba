#include "gbf/simbench.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <thread>

#include "gbf/errors.hpp"
#include "gbf/rng.hpp"
#include "gbf/shrinkage.hpp"

namespace gbf {

namespace {

constexpr double kCorrPairs[5] = {0.9, -0.7, 0.5, -0.3, 0.1};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

long parse_long(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    raise(errc::bad_input, "scenario: bad integer for '" + key + "': " + v);
  }
}

double parse_double(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    raise(errc::bad_input, "scenario: bad number for '" + key + "': " + v);
  }
}

// "1,2,5-8,14" (1-based) -> bitmask
std::uint32_t parse_index_set(const std::string& v) {
  std::uint32_t mask = 0;
  std::stringstream ss(v);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    long lo, hi;
    const auto dash = tok.find('-');
    if (dash == std::string::npos) {
      lo = hi = parse_long(tok, "true");
    } else {
      lo = parse_long(trim(tok.substr(0, dash)), "true");
      hi = parse_long(trim(tok.substr(dash + 1)), "true");
    }
    if (lo < 1 || hi > kMaxPredictors || lo > hi)
      raise(errc::bad_input, "scenario: predictor indices must lie in 1.." +
                                 std::to_string(kMaxPredictors));
    for (long k = lo; k <= hi; ++k) mask |= 1u << (k - 1);
  }
  return mask;
}

// Type-7 quantile on sorted data (linear interpolation of order statistics).
double quantile_sorted(const std::vector<double>& x, double prob) {
  if (x.empty()) return 0.0;
  if (x.size() == 1) return x.front();
  const double h = (static_cast<double>(x.size()) - 1.0) * prob;
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= x.size()) return x.back();
  return x[lo] + (h - lo) * (x[lo + 1] - x[lo]);
}

SummaryStats summarize(std::vector<double> x) {
  SummaryStats s;
  if (x.empty()) return s;
  std::sort(x.begin(), x.end());
  s.min = x.front();
  s.max = x.back();
  s.lq = quantile_sorted(x, 0.25);
  s.median = quantile_sorted(x, 0.5);
  s.uq = quantile_sorted(x, 0.75);
  double sum = 0.0;
  for (double v : x) sum += v;
  s.mean = sum / static_cast<double>(x.size());
  return s;
}

}  // namespace

void Scenario::validate() const {
  if (n < 3) raise(errc::bad_input, "scenario: n must be at least 3");
  if (p < 1 || p > kMaxPredictors)
    raise(errc::bad_input, "scenario: p must lie in 1.." + std::to_string(kMaxPredictors));
  if (kind == ScenarioKind::correlated && p != 16)
    raise(errc::bad_input, "scenario: the correlated design is defined for p = 16");
  if (true_set.mask >= (std::uint32_t{1} << p))
    raise(errc::bad_input, "scenario: true-model indices exceed p");
  if (true_set.mask == 0) raise(errc::bad_input, "scenario: the true set must be non-empty");
  if (!std::isfinite(coef) || !std::isfinite(intercept))
    raise(errc::bad_input, "scenario: coefficients must be finite");
  if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd))
    raise(errc::bad_input, "scenario: noise_sd must be >= 0");
  if (reps < 1) raise(errc::bad_input, "scenario: reps must be >= 1");
}

Scenario parse_scenario(std::istream& in) {
  Scenario sc;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      raise(errc::bad_input, "scenario line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (key == "scenario" || key == "kind") {
      if (val == "correlated")
        sc.kind = ScenarioKind::correlated;
      else if (val == "simple")
        sc.kind = ScenarioKind::simple;
      else
        raise(errc::bad_input, "scenario: unknown kind '" + val + "'");
    } else if (key == "n") {
      sc.n = static_cast<int>(parse_long(val, key));
    } else if (key == "p") {
      sc.p = static_cast<int>(parse_long(val, key));
    } else if (key == "true" || key == "true_set") {
      sc.true_set = ModelId{parse_index_set(val)};
    } else if (key == "coef") {
      sc.coef = parse_double(val, key);
    } else if (key == "intercept") {
      sc.intercept = parse_double(val, key);
    } else if (key == "noise_sd") {
      sc.noise_sd = parse_double(val, key);
    } else if (key == "reps") {
      sc.reps = static_cast<int>(parse_long(val, key));
    } else if (key == "seed") {
      sc.seed = static_cast<std::uint64_t>(parse_long(val, key));
    } else if (key == "n_grid" || key == "criteria" || key == "label") {
      // owned by the driver, not the scenario itself
    } else {
      raise(errc::bad_input, "scenario: unknown key '" + key + "'");
    }
  }
  sc.validate();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(errc::bad_input, "cannot open scenario file: " + path);
  return parse_scenario(in);
}

RawDataset gen_design(const Scenario& sc, int rep) {
  RawDataset ds;
  ds.X.resize(sc.n, sc.p);
  RngStream rng(sc.seed, kStreamDesign, static_cast<std::uint32_t>(rep));
  if (sc.kind == ScenarioKind::correlated) {
    for (int i = 0; i < sc.n; ++i) {
      for (int k = 0; k < 5; ++k) {
        const double za = rng.normal();
        const double zb = rng.normal();
        const double rho = kCorrPairs[k];
        ds.X(i, 2 * k) = za;
        ds.X(i, 2 * k + 1) = rho * za + std::sqrt(1.0 - rho * rho) * zb;
      }
      for (int j = 10; j < 13; ++j) ds.X(i, j) = rng.normal();
      for (int j = 13; j < 16; ++j) ds.X(i, j) = rng.uniform_pm1();
    }
  } else {
    for (int i = 0; i < sc.n; ++i)
      for (int j = 0; j < sc.p; ++j) ds.X(i, j) = rng.normal();
  }
  ds.y = Eigen::VectorXd::Zero(sc.n);
  ds.names.resize(static_cast<std::size_t>(sc.p));
  for (int j = 0; j < sc.p; ++j) ds.names[static_cast<std::size_t>(j)] = "x" + std::to_string(j + 1);
  return ds;
}

Eigen::VectorXd gen_response(const RawDataset& X, const Scenario& sc, int rep) {
  if (X.n() != sc.n || X.p() != sc.p) raise(errc::bad_input, "design does not match the scenario");
  Eigen::VectorXd y(sc.n);
  RngStream rng(sc.seed, kStreamResponse, static_cast<std::uint32_t>(rep));
  const auto cols = sc.true_set.columns();
  for (int i = 0; i < sc.n; ++i) {
    double mu = sc.intercept;
    for (int j : cols) mu += sc.coef * X.X(i, j);
    // the noise draw always happens so the stream stays aligned at noise_sd = 0
    y(i) = mu + sc.noise_sd * rng.normal();
  }
  return y;
}

double prediction_error(const Eigen::VectorXd& fitted, double alpha, const Eigen::MatrixXd& X_true,
                        double coef, double sigma2) {
  if (!(sigma2 > 0.0)) raise(errc::bad_input, "prediction_error needs sigma2 > 0");
  if (fitted.size() != X_true.rows()) raise(errc::bad_input, "fitted/design size mismatch");
  const Eigen::VectorXd mu =
      Eigen::VectorXd::Constant(X_true.rows(), alpha) + coef * X_true.rowwise().sum();
  return (fitted - mu).squaredNorm() / (static_cast<double>(fitted.size()) * sigma2);
}

namespace {

// Per-criterion tallies for one replication's exhaustive sweep.
struct BenchAcc {
  const std::vector<Criterion>* criteria;
  const detail::ModelEval* truth;
  int q_true;

  struct Cell {
    bool has_best = false;
    ModelId best;
    double best_value = 0.0;
    std::uint64_t better = 0;       // strictly better than the true model
    std::uint64_t better_size = 0;  // ... among models with q == q_true
  };
  std::vector<Cell> cells;

  BenchAcc(const std::vector<Criterion>* cr, const detail::ModelEval* tr, int qt)
      : criteria(cr), truth(tr), q_true(qt), cells(cr->size()) {}

  void consume(const detail::ModelEval& ev) {
    if (!ev.spectrum_ok) return;
    for (std::size_t k = 0; k < criteria->size(); ++k) {
      const Criterion crit = (*criteria)[k];
      const int ci = static_cast<int>(crit);
      if (ev.status[ci] != ScoreStatus::ok) continue;
      Cell& cell = cells[k];
      if (!cell.has_best ||
          score_better(crit, ev.value[ci], ev.id, cell.best_value, cell.best)) {
        cell.has_best = true;
        cell.best = ev.id;
        cell.best_value = ev.value[ci];
      }
      if (truth->spectrum_ok && truth->status[ci] == ScoreStatus::ok &&
          score_better(crit, ev.value[ci], ev.id, truth->value[ci], truth->id)) {
        ++cell.better;
        if (ev.id.q() == q_true) ++cell.better_size;
      }
    }
  }

  void merge(BenchAcc&& o) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      Cell& a = cells[k];
      Cell& b = o.cells[k];
      a.better += b.better;
      a.better_size += b.better_size;
      if (b.has_best &&
          (!a.has_best ||
           score_better((*criteria)[k], b.best_value, b.best, a.best_value, a.best))) {
        a.has_best = true;
        a.best = b.best;
        a.best_value = b.best_value;
      }
    }
  }
};

Hyperparams shrink_params(Criterion crit, const Hyperparams& cfg_hp) {
  Hyperparams hp;
  hp.eg = cfg_hp.eg;
  switch (crit) {
    case Criterion::gbf:
      hp.nu = NuScheme::paper;
      break;
    case Criterion::ze:
      hp.nu = NuScheme::unit;
      break;
    case Criterion::general:
      hp = cfg_hp;
      break;
    default:
      break;
  }
  return hp;
}

// Fitted values for the winning model under the criterion's own rule.
Eigen::VectorXd best_fitted(Criterion crit, ModelId best, const StandardizedDesign& design,
                            const Hyperparams& cfg_hp) {
  const ModelSpectrum spec = model_spectrum(design, best);
  switch (crit) {
    case Criterion::gbf:
    case Criterion::ze:
    case Criterion::general: {
      const Hyperparams hp = shrink_params(crit, cfg_hp);
      const FitStats stats = fit_statistics(spec, hp, design.n);
      const double H = shrink_factor(stats, hp);
      return fitted_values(spec, design, H, hp).fitted;
    }
    case Criterion::eb: {
      Hyperparams hp;
      hp.nu = NuScheme::unit;
      const FitStats stats = fit_statistics(spec, hp, design.n);
      const double H = best.q() == 0 ? 1.0 : std::exp(-detail::eb_log1pg(stats));
      return fitted_values(spec, design, H).fitted;
    }
    default:  // information criteria: least squares
      return fitted_values(spec, design, 0.0).fitted;
  }
}

}  // namespace

BenchReport run_replications(const Scenario& sc, const std::vector<Criterion>& criteria,
                             const SelectionConfig& cfg) {
  sc.validate();
  cfg.hp.validate();
  if (criteria.empty()) raise(errc::bad_input, "no criteria requested");
  for (std::size_t i = 0; i < criteria.size(); ++i)
    for (std::size_t j = i + 1; j < criteria.size(); ++j)
      if (criteria[i] == criteria[j]) raise(errc::bad_input, "duplicate criterion in the list");

  const int q_true = sc.true_set.q();
  const double sigma2_eff = sc.noise_sd > 0.0 ? sc.noise_sd * sc.noise_sd : 1.0;
  const bool oracle_possible = q_true < sc.n - 1;
  const std::uint32_t cmask = [&] {
    std::uint32_t m = 0;
    for (Criterion c : criteria) m |= 1u << static_cast<int>(c);
    return m;
  }();

  BenchReport rep_out;
  rep_out.scenario = sc;
  rep_out.hp = cfg.hp;
  rep_out.criteria = criteria;
  rep_out.records.assign(static_cast<std::size_t>(sc.reps), RepRecord{});

  auto run_one = [&](int rep) {
    RepRecord& rec = rep_out.records[static_cast<std::size_t>(rep)];
    rec.rep = rep;
    rec.per_crit.assign(criteria.size(), PerCritRecord{});
    try {
      RawDataset ds = gen_design(sc, rep);
      ds.y = gen_response(ds, sc, rep);
      const StandardizedDesign design = standardize(ds);

      detail::SweepWorkspace ws;
      detail::ModelEval truth;
      detail::eval_model(design, sc.true_set, cfg.hp, cmask, ws, truth);

      BenchAcc acc = detail::sweep_models<BenchAcc>(
          design, cfg.hp, cmask, cfg.max_q, 1,
          [&] { return BenchAcc(&criteria, &truth, q_true); });

      const auto cols = sc.true_set.columns();
      Eigen::MatrixXd X_true(sc.n, q_true);
      for (int a = 0; a < q_true; ++a) X_true.col(a) = ds.X.col(cols[static_cast<std::size_t>(a)]);

      for (std::size_t k = 0; k < criteria.size(); ++k) {
        const Criterion crit = criteria[k];
        const int ci = static_cast<int>(crit);
        PerCritRecord& pc = rec.per_crit[k];
        const BenchAcc::Cell& cell = acc.cells[k];
        if (!cell.has_best) continue;  // criterion scored nothing; leave defaults
        pc.best = cell.best;
        pc.best_value = cell.best_value;
        pc.true_valid = truth.spectrum_ok && truth.status[ci] == ScoreStatus::ok;
        if (pc.true_valid) {
          pc.rank = cell.better + 1;
          pc.rank_within_size = cell.better_size + 1;
        }
        pc.pred_err = prediction_error(best_fitted(crit, cell.best, design, cfg.hp), sc.intercept,
                                       X_true, sc.coef, sigma2_eff);
      }

      if (oracle_possible) {
        const ModelSpectrum spec_t = model_spectrum(design, sc.true_set);
        if (spec_t.status == SpectrumStatus::ok) {
          rec.oracle_err = prediction_error(fitted_values(spec_t, design, 0.0).fitted,
                                            sc.intercept, X_true, sc.coef, sigma2_eff);
          rec.has_oracle = true;
        }
      }
    } catch (const std::exception&) {
      rec.failed = true;
    }
  };

  const int workers = std::min(detail::resolve_threads(cfg.threads), sc.reps);
  if (workers <= 1) {
    for (int r = 0; r < sc.reps; ++r) run_one(r);
  } else {
    std::atomic<int> next{0};
    auto loop = [&] {
      for (;;) {
        const int r = next.fetch_add(1, std::memory_order_relaxed);
        if (r >= sc.reps) break;
        run_one(r);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(loop);
    for (auto& th : pool) th.join();
  }

  // Aggregate in replication order (thread-count invariant).
  const double denom_models = std::pow(2.0, sc.p);
  rep_out.per_criterion.assign(criteria.size(), CritReport{});
  std::vector<double> oracle_errs;
  int good = 0;
  for (const auto& rec : rep_out.records) {
    if (rec.failed) {
      ++rep_out.failures;
      continue;
    }
    ++good;
    if (rec.has_oracle) oracle_errs.push_back(rec.oracle_err);
  }

  for (std::size_t k = 0; k < criteria.size(); ++k) {
    CritReport& cr = rep_out.per_criterion[k];
    cr.criterion = criteria[k];
    cr.size_freq.assign(static_cast<std::size_t>(sc.p) + 1, 0.0);
    cr.incl_freq.assign(static_cast<std::size_t>(sc.p), 0.0);
    std::vector<double> errs, rel_ranks;
    std::uint64_t first = 0, top3 = 0, ws1 = 0, ws2 = 0, ws3 = 0;
    for (const auto& rec : rep_out.records) {
      if (rec.failed) continue;
      const PerCritRecord& pc = rec.per_crit[k];
      errs.push_back(pc.pred_err);
      cr.size_freq[static_cast<std::size_t>(pc.best.q())] += 1.0;
      for (int j = 0; j < sc.p; ++j)
        if (pc.best.contains(j)) cr.incl_freq[static_cast<std::size_t>(j)] += 1.0;
      if (pc.best == sc.true_set) ++first;
      if (pc.true_valid) {
        rel_ranks.push_back(static_cast<double>(pc.rank) / denom_models);
        if (pc.rank <= 3) ++top3;
        if (pc.rank_within_size <= 1) ++ws1;
        if (pc.rank_within_size <= 2) ++ws2;
        if (pc.rank_within_size <= 3) ++ws3;
      }
    }
    if (good > 0) {
      const double g = static_cast<double>(good);
      cr.freq_first = static_cast<double>(first) / g;
      cr.freq_top3 = static_cast<double>(top3) / g;
      cr.within_size_first = static_cast<double>(ws1) / g;
      cr.within_size_first2 = static_cast<double>(ws2) / g;
      cr.within_size_first3 = static_cast<double>(ws3) / g;
      for (auto& v : cr.size_freq) v /= g;
      for (auto& v : cr.incl_freq) v /= g;
      std::sort(errs.begin(), errs.end());
      double sum = 0.0;
      for (double e : errs) sum += e;
      cr.pred_mean = errs.empty() ? 0.0 : sum / g;
      cr.pred_lq = quantile_sorted(errs, 0.25);
      cr.pred_uq = quantile_sorted(errs, 0.75);
      cr.rel_rank = summarize(std::move(rel_ranks));
    }
  }

  if (!oracle_errs.empty()) {
    rep_out.has_oracle = true;
    std::sort(oracle_errs.begin(), oracle_errs.end());
    double sum = 0.0;
    for (double e : oracle_errs) sum += e;
    rep_out.oracle_mean = sum / static_cast<double>(oracle_errs.size());
    rep_out.oracle_lq = quantile_sorted(oracle_errs, 0.25);
    rep_out.oracle_uq = quantile_sorted(oracle_errs, 0.75);
  }
  return rep_out;
}

std::vector<TrendRow> consistency_sweep(const Scenario& base, const std::vector<int>& n_grid,
                                        const SelectionConfig& cfg) {
  if (n_grid.empty()) raise(errc::bad_input, "empty n grid");
  std::vector<TrendRow> rows;
  rows.reserve(n_grid.size());
  for (int n : n_grid) {
    Scenario sc = base;
    sc.n = n;
    const BenchReport rep = run_replications(sc, {cfg.criterion}, cfg);
    TrendRow row;
    row.n = n;
    row.reps = sc.reps - rep.failures;
    row.freq_first = rep.per_criterion.front().freq_first;
    row.se = row.reps > 0
                 ? std::sqrt(row.freq_first * (1.0 - row.freq_first) / row.reps)
                 : 0.0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace gbf
