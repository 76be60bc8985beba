#include "gbf/report.hpp"

#include <cstdio>
#include <json.hpp>
#include <sstream>

namespace gbf {

namespace {

using json = nlohmann::json;

std::string fmt(double x, const char* spec = "%.12g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

std::string join_names(const std::vector<std::string>& names, ModelId id) {
  if (id.is_null()) return "(null)";
  std::string out;
  for (int j : id.columns()) {
    if (!out.empty()) out += "+";
    out += j < static_cast<int>(names.size()) ? names[static_cast<std::size_t>(j)]
                                              : "x" + std::to_string(j + 1);
  }
  return out;
}

json hyper_json(const Hyperparams& hp) {
  json h;
  h["a"] = hp.a;
  switch (hp.nu) {
    case NuScheme::paper: h["nu"] = "paper"; break;
    case NuScheme::unit: h["nu"] = "unit"; break;
    case NuScheme::explicit_vec:
      h["nu"] = "explicit";
      h["nu_values"] = hp.nu_explicit;
      break;
  }
  h["eg_rule"] = hp.eg.kind == EgRule::Kind::condition ? "condition" : "fixed";
  if (hp.eg.kind == EgRule::Kind::fixed) h["eg_value"] = hp.eg.value;
  return h;
}

json head(const char* kind) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["version"] = kVersion;
  j["kind"] = kind;
  return j;
}

json scenario_json(const Scenario& sc) {
  json s;
  s["kind"] = sc.kind == ScenarioKind::correlated ? "correlated" : "simple";
  s["n"] = sc.n;
  s["p"] = sc.p;
  json t = json::array();
  for (int j : sc.true_set.columns()) t.push_back(j + 1);
  s["true_set"] = t;
  s["coef"] = sc.coef;
  s["intercept"] = sc.intercept;
  s["noise_sd"] = sc.noise_sd;
  s["reps"] = sc.reps;
  s["seed"] = sc.seed;
  return s;
}

json summary_json(const SummaryStats& s) {
  json j;
  j["min"] = s.min;
  j["lq"] = s.lq;
  j["median"] = s.median;
  j["mean"] = s.mean;
  j["uq"] = s.uq;
  j["max"] = s.max;
  return j;
}

}  // namespace

std::string selection_json(const SelectionResult& res) {
  json j = head("selection");
  j["criterion"] = criterion_name(res.criterion);
  j["hyper"] = hyper_json(res.hp);
  j["n"] = res.n;
  j["p"] = res.p;
  if (res.max_q)
    j["max_q"] = *res.max_q;
  else
    j["max_q"] = nullptr;
  j["top_k"] = res.top_k;
  j["models_scored"] = res.scored;
  j["excluded_rank_deficient"] = res.excluded_rank_deficient;
  j["excluded_unavailable"] = res.excluded_unavailable;
  if (!res.exclusion_sample.empty()) {
    json ex = json::array();
    for (const auto& e : res.exclusion_sample) {
      json one;
      one["model"] = join_names(res.names, e.id);
      one["bitmask"] = e.id.mask;
      one["reason"] = score_status_name(e.reason);
      ex.push_back(one);
    }
    j["exclusion_sample"] = ex;
  }
  if (res.has_posterior) {
    j["log_normalizer"] = res.log_normalizer;
    json inc;
    for (std::size_t k = 0; k < res.inclusion.size(); ++k)
      inc[k < res.names.size() ? res.names[k] : "x" + std::to_string(k + 1)] = res.inclusion[k];
    j["inclusion"] = inc;
  }
  json models = json::array();
  for (std::size_t i = 0; i < res.entries.size(); ++i) {
    const auto& e = res.entries[i];
    json m;
    m["rank"] = i + 1;
    m["model"] = join_names(res.names, e.id);
    m["bitmask"] = e.id.mask;
    m["q"] = e.q;
    m["score"] = e.value;
    if (res.has_posterior) m["posterior"] = e.posterior;
    m["r2"] = e.R2;
    m["cond"] = e.cond;
    models.push_back(m);
  }
  j["models"] = models;
  return j.dump(2) + "\n";
}

std::string selection_csv(const SelectionResult& res) {
  std::ostringstream out;
  out << "rank,model,bitmask,q,score" << (res.has_posterior ? ",posterior" : "") << ",r2,cond\n";
  for (std::size_t i = 0; i < res.entries.size(); ++i) {
    const auto& e = res.entries[i];
    out << (i + 1) << ',' << join_names(res.names, e.id) << ',' << e.id.mask << ',' << e.q << ','
        << fmt(e.value);
    if (res.has_posterior) out << ',' << fmt(e.posterior);
    out << ',' << fmt(e.R2) << ',' << fmt(e.cond) << '\n';
  }
  return out.str();
}

std::string selection_table(const SelectionResult& res) {
  std::ostringstream out;
  out << "criterion: " << criterion_name(res.criterion) << "   n=" << res.n << " p=" << res.p
      << "   models scored: " << res.scored;
  if (res.excluded_rank_deficient > 0) out << "   rank-deficient: " << res.excluded_rank_deficient;
  if (res.excluded_unavailable > 0) out << "   unavailable: " << res.excluded_unavailable;
  out << "\n\n";
  char line[256];
  std::snprintf(line, sizeof line, "%4s  %-28s %3s  %14s  %10s  %8s  %9s\n", "rank", "model", "q",
                "score", "posterior", "r2", "cond");
  out << line;
  for (std::size_t i = 0; i < res.entries.size(); ++i) {
    const auto& e = res.entries[i];
    std::snprintf(line, sizeof line, "%4zu  %-28s %3d  %14.6f  %10s  %8.4f  %9.3g\n", i + 1,
                  join_names(res.names, e.id).c_str(), e.q, e.value,
                  res.has_posterior ? fmt(e.posterior, "%.4f").c_str() : "-", e.R2, e.cond);
    out << line;
  }
  if (res.has_posterior && !res.inclusion.empty()) {
    out << "\ninclusion probabilities:\n";
    for (std::size_t k = 0; k < res.inclusion.size(); ++k) {
      std::snprintf(line, sizeof line, "  %-12s %.4f\n",
                    (k < res.names.size() ? res.names[k] : "x" + std::to_string(k + 1)).c_str(),
                    res.inclusion[k]);
      out << line;
    }
  }
  return out.str();
}

std::string estimate_json(const ShrinkageFit& fit, const StandardizedDesign& design,
                          const Hyperparams& hp) {
  json j = head("estimate");
  j["hyper"] = hyper_json(hp);
  j["model"] = join_names(design.names, fit.id);
  j["bitmask"] = fit.id.mask;
  j["q"] = fit.id.q();
  j["n"] = design.n;
  j["shrink_factor"] = fit.H;
  j["component_weights"] = std::vector<double>(fit.weights.data(),
                                               fit.weights.data() + fit.weights.size());
  j["fitted"] = std::vector<double>(fit.fitted.data(), fit.fitted.data() + fit.fitted.size());
  return j.dump(2) + "\n";
}

std::string estimate_csv(const ShrinkageFit& fit) {
  std::ostringstream out;
  out << "obs,fitted\n";
  for (Eigen::Index i = 0; i < fit.fitted.size(); ++i)
    out << (i + 1) << ',' << fmt(fit.fitted(i)) << '\n';
  return out.str();
}

std::string estimate_table(const ShrinkageFit& fit, const StandardizedDesign& design) {
  std::ostringstream out;
  out << "model: " << join_names(design.names, fit.id) << "   q=" << fit.id.q()
      << "   shrink factor H=" << fmt(fit.H, "%.6f") << "\n";
  if (fit.weights.size() > 0) {
    out << "component weights:";
    for (Eigen::Index i = 0; i < fit.weights.size(); ++i) out << ' ' << fmt(fit.weights(i), "%.6f");
    out << "\n";
  }
  out << "fitted values:\n";
  char line[64];
  for (Eigen::Index i = 0; i < fit.fitted.size(); ++i) {
    std::snprintf(line, sizeof line, "  %4lld  %14.8f\n", static_cast<long long>(i + 1),
                  fit.fitted(i));
    out << line;
  }
  return out.str();
}

std::string bench_json(const BenchReport& rep) {
  json j = head("benchmark");
  j["scenario"] = scenario_json(rep.scenario);
  j["hyper"] = hyper_json(rep.hp);
  j["failures"] = rep.failures;
  if (rep.has_oracle) {
    json o;
    o["pred_mean"] = rep.oracle_mean;
    o["pred_lq"] = rep.oracle_lq;
    o["pred_uq"] = rep.oracle_uq;
    j["oracle"] = o;
  }
  json crits;
  for (const auto& cr : rep.per_criterion) {
    json c;
    c["freq_first"] = cr.freq_first;
    c["freq_top3"] = cr.freq_top3;
    c["pred_mean"] = cr.pred_mean;
    c["pred_lq"] = cr.pred_lq;
    c["pred_uq"] = cr.pred_uq;
    c["size_freq"] = cr.size_freq;
    c["incl_freq"] = cr.incl_freq;
    c["rel_rank"] = summary_json(cr.rel_rank);
    c["within_size_first"] = cr.within_size_first;
    c["within_size_first2"] = cr.within_size_first2;
    c["within_size_first3"] = cr.within_size_first3;
    crits[criterion_name(cr.criterion)] = c;
  }
  j["criteria"] = crits;
  return j.dump(2) + "\n";
}

std::string bench_table(const BenchReport& rep) {
  std::ostringstream out;
  const auto& sc = rep.scenario;
  out << "scenario: " << (sc.kind == ScenarioKind::correlated ? "correlated" : "simple")
      << "   n=" << sc.n << " p=" << sc.p << " q_true=" << sc.true_set.q()
      << " noise_sd=" << fmt(sc.noise_sd, "%g") << " reps=" << sc.reps << " seed=" << sc.seed
      << "\n";
  if (rep.failures > 0) out << "failed replications: " << rep.failures << "\n";
  out << "\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-9s %10s %10s %10s %10s %10s %12s\n", "criterion", "first",
                "top3", "pred_mean", "pred_lq", "pred_uq", "relrank_mean");
  out << line;
  for (const auto& cr : rep.per_criterion) {
    std::snprintf(line, sizeof line, "%-9s %10.3f %10.3f %10.3f %10.3f %10.3f %12.4f\n",
                  criterion_name(cr.criterion), cr.freq_first, cr.freq_top3, cr.pred_mean,
                  cr.pred_lq, cr.pred_uq, cr.rel_rank.mean);
    out << line;
  }
  if (rep.has_oracle) {
    std::snprintf(line, sizeof line, "%-9s %10s %10s %10.3f %10.3f %10.3f %12s\n", "oracle", "-",
                  "-", rep.oracle_mean, rep.oracle_lq, rep.oracle_uq, "-");
    out << line;
  }
  return out.str();
}

std::string trend_json(const std::vector<TrendRow>& rows, const Scenario& base,
                       const Hyperparams& hp) {
  json j = head("consistency");
  j["scenario"] = scenario_json(base);
  j["hyper"] = hyper_json(hp);
  json arr = json::array();
  for (const auto& r : rows) {
    json row;
    row["n"] = r.n;
    row["reps"] = r.reps;
    row["freq_first"] = r.freq_first;
    row["se"] = r.se;
    arr.push_back(row);
  }
  j["trend"] = arr;
  return j.dump(2) + "\n";
}

std::string trend_table(const std::vector<TrendRow>& rows) {
  std::ostringstream out;
  char line[128];
  std::snprintf(line, sizeof line, "%6s %8s %12s %10s\n", "n", "reps", "freq_first", "se");
  out << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%6d %8d %12.4f %10.4f\n", r.n, r.reps, r.freq_first, r.se);
    out << line;
  }
  return out.str();
}

}  // namespace gbf
