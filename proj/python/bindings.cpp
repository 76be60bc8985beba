#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gbf/criteria.hpp"
#include "gbf/errors.hpp"
#include "gbf/selection.hpp"
#include "gbf/shrinkage.hpp"
#include "gbf/simbench.hpp"

namespace py = pybind11;
using namespace gbf;

namespace {

RawDataset make_dataset(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        std::vector<std::string> names) {
  RawDataset ds;
  ds.X = X;
  ds.y = y;
  if (names.empty()) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) names.push_back("x" + std::to_string(j + 1));
  } else if (static_cast<Eigen::Index>(names.size()) != X.cols()) {
    raise(errc::bad_input, "names length must match the number of columns");
  }
  ds.names = std::move(names);
  return ds;
}

Hyperparams make_hyper(double a, const std::string& nu, const std::vector<double>& nu_explicit,
                       const std::string& eg_rule, double eg_value) {
  Hyperparams hp;
  hp.a = a;
  if (nu == "paper")
    hp.nu = NuScheme::paper;
  else if (nu == "unit")
    hp.nu = NuScheme::unit;
  else if (nu == "explicit")
    hp.nu = NuScheme::explicit_vec;
  else
    raise(errc::bad_hyper, "nu must be 'paper', 'unit' or 'explicit'");
  hp.nu_explicit = nu_explicit;
  if (eg_rule == "condition")
    hp.eg.kind = EgRule::Kind::condition;
  else if (eg_rule == "fixed")
    hp.eg.kind = EgRule::Kind::fixed;
  else
    raise(errc::bad_hyper, "eg_rule must be 'condition' or 'fixed'");
  hp.eg.value = eg_value;
  hp.validate();
  return hp;
}

std::uint32_t mask_from_columns(const std::vector<int>& cols, int p) {
  std::uint32_t mask = 0;
  for (int j : cols) {
    if (j < 0 || j >= p) raise(errc::bad_input, "model column index out of range");
    mask |= std::uint32_t{1} << j;
  }
  return mask;
}

}  // namespace

PYBIND11_MODULE(_gbf, m) {
  m.doc() = "generalized g-prior model selection (C++ core)";
  py::register_exception<Error>(m, "GbfError");

  m.def(
      "select",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::string& criterion,
         double a, const std::string& nu, int top_k, std::optional<int> max_q, int threads,
         std::vector<std::string> names) {
        const RawDataset ds = make_dataset(X, y, std::move(names));
        const StandardizedDesign design = standardize(ds);
        SelectionConfig cfg;
        if (criterion == "gbf")
          cfg.criterion = Criterion::gbf;
        else if (criterion == "ze")
          cfg.criterion = Criterion::ze;
        else if (criterion == "eb")
          cfg.criterion = Criterion::eb;
        else if (criterion == "aic")
          cfg.criterion = Criterion::aic;
        else if (criterion == "aicc")
          cfg.criterion = Criterion::aicc;
        else if (criterion == "bic")
          cfg.criterion = Criterion::bic;
        else if (criterion == "general")
          cfg.criterion = Criterion::general;
        else
          raise(errc::bad_input, "unknown criterion: " + criterion);
        cfg.hp = make_hyper(a, nu, {}, "condition", 1.0);
        cfg.top_k = top_k;
        cfg.max_q = max_q;
        cfg.threads = threads;
        const SelectionResult res = rank_models(design, cfg);

        py::list models;
        for (const auto& e : res.entries) {
          py::dict d;
          py::list cols;
          for (int j : e.id.columns()) cols.append(j);
          d["columns"] = cols;
          d["bitmask"] = e.id.mask;
          d["q"] = e.q;
          d["score"] = e.value;
          if (res.has_posterior) d["posterior"] = e.posterior;
          d["r2"] = e.R2;
          d["cond"] = e.cond;
          models.append(d);
        }
        py::dict out;
        out["criterion"] = criterion;
        out["models"] = models;
        out["scored"] = res.scored;
        out["excluded_rank_deficient"] = res.excluded_rank_deficient;
        out["excluded_unavailable"] = res.excluded_unavailable;
        if (res.has_posterior) {
          out["log_normalizer"] = res.log_normalizer;
          out["inclusion"] = res.inclusion;
        }
        return out;
      },
      py::arg("X"), py::arg("y"), py::arg("criterion") = "gbf", py::arg("a") = -0.75,
      py::arg("nu") = "paper", py::arg("top_k") = 10, py::arg("max_q") = std::nullopt,
      py::arg("threads") = 0, py::arg("names") = std::vector<std::string>{},
      "Exhaustively rank all submodels of the given design.");

  m.def(
      "scores",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<int>& model,
         double a, const std::string& nu) {
        const RawDataset ds = make_dataset(X, y, {});
        const StandardizedDesign design = standardize(ds);
        const ModelId id{mask_from_columns(model, design.p)};
        const Hyperparams hp = make_hyper(a, nu, {}, "condition", 1.0);
        const ModelSpectrum spec = model_spectrum(design, id);
        if (spec.status != SpectrumStatus::ok)
          raise(errc::rank_deficient, "model is rank deficient");
        const FitStats stats = fit_statistics(spec, hp, design.n);
        py::dict out;
        out["q"] = stats.q;
        out["r2"] = stats.R2;
        out["q2"] = stats.Q2;
        auto put = [&](const char* key, const CriterionScore& s) {
          if (s.valid())
            out[key] = s.value;
          else
            out[key] = py::none();
        };
        put("gbf", detail::try_log_gbf(stats));
        put("ze", detail::try_log_ze(stats));
        put("general", detail::try_log_bf_general(stats, hp));
        put("eb", detail::try_eb_score(stats, design.vnorm2 * stats.rss_scaled, design.n));
        CriterionScore aic, aicc, bic;
        detail::try_ic_scores(stats.rss_scaled, design.vnorm2, design.n, stats.q, id, aic, aicc,
                              bic);
        put("aic", aic);
        put("aicc", aicc);
        put("bic", bic);
        return out;
      },
      py::arg("X"), py::arg("y"), py::arg("model"), py::arg("a") = -0.75, py::arg("nu") = "paper",
      "All criterion scores for one submodel (None where undefined).");

  m.def(
      "estimate",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<int>& model,
         double a, const std::string& nu, const std::string& eg_rule, double eg_value) {
        const RawDataset ds = make_dataset(X, y, {});
        const StandardizedDesign design = standardize(ds);
        const ModelId id{mask_from_columns(model, design.p)};
        const Hyperparams hp = make_hyper(a, nu, {}, eg_rule, eg_value);
        const ModelSpectrum spec = model_spectrum(design, id);
        if (spec.status != SpectrumStatus::ok)
          raise(errc::rank_deficient, "model is rank deficient");
        const FitStats stats = fit_statistics(spec, hp, design.n);
        const double H = shrink_factor(stats, hp);
        const ShrinkageFit fit = fitted_values(spec, design, H, hp);
        py::dict out;
        out["H"] = fit.H;
        out["fitted"] = fit.fitted;
        out["weights"] = fit.weights;
        return out;
      },
      py::arg("X"), py::arg("y"), py::arg("model"), py::arg("a") = -0.75, py::arg("nu") = "paper",
      py::arg("eg_rule") = "condition", py::arg("eg_value") = 1.0,
      "Posterior-shrinkage fitted values for one submodel.");

  m.def(
      "simulate",
      [](const std::string& kind, int n, int p, const std::vector<int>& true_cols, double coef,
         double intercept, double noise_sd, int reps, std::uint64_t seed,
         const std::vector<std::string>& criteria, int threads) {
        Scenario sc;
        sc.kind = kind == "correlated" ? ScenarioKind::correlated : ScenarioKind::simple;
        if (kind != "correlated" && kind != "simple")
          raise(errc::bad_input, "kind must be 'correlated' or 'simple'");
        sc.n = n;
        sc.p = p;
        sc.true_set = ModelId{mask_from_columns(true_cols, p)};
        sc.coef = coef;
        sc.intercept = intercept;
        sc.noise_sd = noise_sd;
        sc.reps = reps;
        sc.seed = seed;
        std::vector<Criterion> crits;
        for (const auto& c : criteria) {
          if (c == "gbf") crits.push_back(Criterion::gbf);
          else if (c == "ze") crits.push_back(Criterion::ze);
          else if (c == "eb") crits.push_back(Criterion::eb);
          else if (c == "aic") crits.push_back(Criterion::aic);
          else if (c == "aicc") crits.push_back(Criterion::aicc);
          else if (c == "bic") crits.push_back(Criterion::bic);
          else raise(errc::bad_input, "unknown criterion: " + c);
        }
        SelectionConfig cfg;
        cfg.threads = threads;
        const BenchReport rep = run_replications(sc, crits, cfg);
        py::dict out;
        out["failures"] = rep.failures;
        if (rep.has_oracle) out["oracle_pred_mean"] = rep.oracle_mean;
        py::dict per;
        for (const auto& cr : rep.per_criterion) {
          py::dict d;
          d["freq_first"] = cr.freq_first;
          d["freq_top3"] = cr.freq_top3;
          d["pred_mean"] = cr.pred_mean;
          d["size_freq"] = cr.size_freq;
          d["rel_rank_mean"] = cr.rel_rank.mean;
          per[criterion_name(cr.criterion)] = d;
        }
        out["criteria"] = per;
        return out;
      },
      py::arg("kind"), py::arg("n"), py::arg("p"), py::arg("true_cols"), py::arg("coef") = 2.0,
      py::arg("intercept") = 1.0, py::arg("noise_sd") = 1.0, py::arg("reps") = 10,
      py::arg("seed") = 1, py::arg("criteria") = std::vector<std::string>{"gbf"},
      py::arg("threads") = 0, "Replicated recovery benchmark on synthetic designs.");

  m.attr("__version__") = "1.0.0";
}
