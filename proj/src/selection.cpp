#include "gbf/selection.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "gbf/errors.hpp"

namespace gbf {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

void ModelPrior::validate(int p) const {
  if (kind == Kind::uniform) return;
  const std::size_t expect = std::size_t{1} << p;
  if (weights.size() != expect)
    raise(errc::bad_input, "explicit prior needs one weight per bitmask (2^p entries)");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      raise(errc::bad_input, "prior weights must be finite and non-negative");
    sum += w;
  }
  if (!(sum > 0.0)) raise(errc::bad_input, "prior weights must not all be zero");
}

double ModelPrior::log_weight(ModelId id) const noexcept {
  if (kind == Kind::uniform) return 0.0;
  if (id.mask >= weights.size()) return kNegInf;
  const double w = weights[id.mask];
  return w > 0.0 ? std::log(w) : kNegInf;
}

std::vector<ModelId> enumerate_models(int p, std::optional<int> max_q) {
  if (p < 1) raise(errc::bad_input, "need at least one predictor");
  if (p > kMaxPredictors)
    raise(errc::too_many_predictors,
          "exhaustive enumeration capped at " + std::to_string(kMaxPredictors) + " predictors");
  if (max_q && *max_q < 0) raise(errc::bad_input, "max_q must be non-negative");
  const std::uint32_t total = std::uint32_t{1} << p;
  const int qcap = max_q ? *max_q : p;
  std::vector<ModelId> out;
  out.reserve(max_q ? total : total);  // upper bound; exact count not worth a pass
  for (std::uint32_t mask = 0; mask < total; ++mask) {
    const ModelId id{mask};
    if (id.q() <= qcap) out.push_back(id);
  }
  return out;
}

namespace detail {

double log_add(double a, double b) noexcept {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b), lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

void eval_model(const StandardizedDesign& design, ModelId id, const Hyperparams& hp,
                std::uint32_t criteria_mask, SweepWorkspace& ws, ModelEval& ev) noexcept {
  ev.id = id;
  ev.boundary_hit = false;
  for (int i = 0; i < kNumCriteria; ++i) {
    ev.value[i] = 0.0;
    ev.status[i] = ScoreStatus::ok;
  }
  ev.spectrum_ok = submodel_stats(design, id, hp, ws, ev.stats);
  if (!ev.spectrum_ok) return;
  const FitStats& s = ev.stats;

  const auto want = [&](Criterion c) { return (criteria_mask >> static_cast<int>(c)) & 1u; };
  const auto put = [&](const CriterionScore& cs) {
    const int i = static_cast<int>(cs.tag);
    ev.value[i] = cs.value;
    ev.status[i] = cs.status;
    if (cs.boundary_hit) ev.boundary_hit = true;
  };

  if (want(Criterion::gbf)) put(try_log_gbf(s));
  if (want(Criterion::ze)) put(try_log_ze(s));
  if (want(Criterion::general)) put(try_log_bf_general(s, hp));
  if (want(Criterion::eb)) put(try_eb_score(s, design.vnorm2 * s.rss_scaled, s.n));
  if (want(Criterion::aic) || want(Criterion::aicc) || want(Criterion::bic)) {
    CriterionScore aic, aicc, bic;
    try_ic_scores(s.rss_scaled, design.vnorm2, s.n, s.q, id, aic, aicc, bic);
    if (want(Criterion::aic)) put(aic);
    if (want(Criterion::aicc)) put(aicc);
    if (want(Criterion::bic)) put(bic);
  }
}

namespace {

struct RankAcc {
  Criterion crit;
  const ModelPrior* prior;
  int top_k;
  int p;
  bool bayes;

  std::vector<SelectionEntry> top;  // sorted best-first, size <= top_k
  double log_norm = kNegInf;
  std::vector<double> incl_log;
  std::uint64_t scored = 0;
  std::uint64_t excl_rank = 0;
  std::uint64_t excl_unavail = 0;
  std::vector<ExclusionNote> sample;
  static constexpr std::size_t kSampleCap = 16;

  RankAcc(Criterion c, const ModelPrior* pr, int k, int np)
      : crit(c), prior(pr), top_k(k), p(np), bayes(is_bayes_factor(c)) {
    incl_log.assign(static_cast<std::size_t>(p), kNegInf);
    top.reserve(static_cast<std::size_t>(top_k) + 1);
  }

  bool better(const SelectionEntry& x, const SelectionEntry& y) const noexcept {
    return score_better(crit, x.value, x.id, y.value, y.id);
  }

  void consume(const ModelEval& ev) {
    const int ci = static_cast<int>(crit);
    if (!ev.spectrum_ok) {
      ++excl_rank;
      if (sample.size() < kSampleCap)
        sample.push_back(ExclusionNote{ev.id, ScoreStatus::rank_deficient});
      return;
    }
    if (ev.status[ci] != ScoreStatus::ok) {
      ++excl_unavail;
      if (sample.size() < kSampleCap) sample.push_back(ExclusionNote{ev.id, ev.status[ci]});
      return;
    }
    ++scored;
    const double val = ev.value[ci];
    if (bayes) {
      const double lw = prior->log_weight(ev.id);
      if (lw != kNegInf) {
        const double l = lw + val;
        log_norm = log_add(log_norm, l);
        for (int j = 0; j < p; ++j)
          if (ev.id.contains(j))
            incl_log[static_cast<std::size_t>(j)] =
                log_add(incl_log[static_cast<std::size_t>(j)], l);
      }
    }
    SelectionEntry e;
    e.id = ev.id;
    e.value = val;
    e.R2 = ev.stats.R2;
    e.q = ev.stats.q;
    e.cond = ev.stats.dbar / ev.stats.dmin;
    if (top.size() == static_cast<std::size_t>(top_k) && !better(e, top.back())) return;
    auto it = std::upper_bound(top.begin(), top.end(), e,
                               [this](const SelectionEntry& a, const SelectionEntry& b) {
                                 return better(a, b);
                               });
    top.insert(it, e);
    if (top.size() > static_cast<std::size_t>(top_k)) top.pop_back();
  }

  void merge(RankAcc&& o) {
    scored += o.scored;
    excl_rank += o.excl_rank;
    excl_unavail += o.excl_unavail;
    for (const auto& s : o.sample) {
      if (sample.size() >= kSampleCap) break;
      sample.push_back(s);
    }
    if (bayes) {
      log_norm = log_add(log_norm, o.log_norm);
      for (int j = 0; j < p; ++j)
        incl_log[static_cast<std::size_t>(j)] =
            log_add(incl_log[static_cast<std::size_t>(j)], o.incl_log[static_cast<std::size_t>(j)]);
    }
    std::vector<SelectionEntry> merged;
    merged.reserve(top.size() + o.top.size());
    std::merge(top.begin(), top.end(), o.top.begin(), o.top.end(), std::back_inserter(merged),
               [this](const SelectionEntry& a, const SelectionEntry& b) { return better(a, b); });
    if (merged.size() > static_cast<std::size_t>(top_k)) merged.resize(static_cast<std::size_t>(top_k));
    top = std::move(merged);
  }
};

}  // namespace

}  // namespace detail

std::vector<double> posterior_probs(const std::vector<CriterionScore>& scores,
                                    const ModelPrior& prior) {
  if (scores.empty()) raise(errc::abort_empty, "no scores to normalize");
  const Criterion tag = scores.front().tag;
  if (!is_bayes_factor(tag))
    raise(errc::bad_input, "posterior probabilities require a Bayes-factor criterion");
  for (const auto& s : scores) {
    if (s.tag != tag) raise(errc::mixed_criteria, "scores mix different criteria");
    if (!s.valid())
      raise(errc::bad_input, std::string("cannot normalize over an invalid score: ") +
                                 score_status_name(s.status));
  }
  std::vector<double> logs(scores.size(), kNegInf);
  double norm = kNegInf;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double lw = prior.log_weight(scores[i].id);
    if (lw == kNegInf) continue;
    logs[i] = lw + scores[i].value;
    norm = detail::log_add(norm, logs[i]);
  }
  if (norm == kNegInf) raise(errc::bad_input, "prior assigns zero weight to every model");
  std::vector<double> out(scores.size(), 0.0);
  for (std::size_t i = 0; i < scores.size(); ++i)
    out[i] = logs[i] == kNegInf ? 0.0 : std::exp(logs[i] - norm);
  return out;
}

SelectionResult rank_models(const StandardizedDesign& design, const SelectionConfig& cfg) {
  if (design.p > kMaxPredictors)
    raise(errc::too_many_predictors,
          "exhaustive enumeration capped at " + std::to_string(kMaxPredictors) + " predictors");
  if (cfg.top_k < 1) raise(errc::bad_input, "top_k must be positive");
  if (cfg.max_q && *cfg.max_q < 0) raise(errc::bad_input, "max_q must be non-negative");
  cfg.hp.validate();
  cfg.prior.validate(design.p);

  const auto t0 = std::chrono::steady_clock::now();
  const std::uint32_t cmask = 1u << static_cast<int>(cfg.criterion);
  auto acc = detail::sweep_models<detail::RankAcc>(
      design, cfg.hp, cmask, cfg.max_q, cfg.threads,
      [&] { return detail::RankAcc(cfg.criterion, &cfg.prior, cfg.top_k, design.p); });
  const auto t1 = std::chrono::steady_clock::now();

  if (acc.scored == 0) raise(errc::abort_empty, "every candidate model was excluded");

  SelectionResult res;
  res.criterion = cfg.criterion;
  res.hp = cfg.hp;
  res.n = design.n;
  res.p = design.p;
  res.max_q = cfg.max_q;
  res.top_k = cfg.top_k;
  res.scored = acc.scored;
  res.excluded_rank_deficient = acc.excl_rank;
  res.excluded_unavailable = acc.excl_unavail;
  res.exclusion_sample = std::move(acc.sample);
  res.names = design.names;
  res.has_posterior = acc.bayes;
  res.entries = std::move(acc.top);
  if (acc.bayes) {
    res.log_normalizer = acc.log_norm;
    for (auto& e : res.entries)
      e.posterior = std::exp(cfg.prior.log_weight(e.id) + e.value - acc.log_norm);
    res.inclusion.resize(static_cast<std::size_t>(design.p));
    for (int j = 0; j < design.p; ++j) {
      const double l = acc.incl_log[static_cast<std::size_t>(j)];
      res.inclusion[static_cast<std::size_t>(j)] =
          l == kNegInf ? 0.0 : std::exp(l - acc.log_norm);
    }
  }
  res.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
  return res;
}

}  // namespace gbf
