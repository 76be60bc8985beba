#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "gbf/errors.hpp"

namespace gbf {

inline constexpr int kMaxPredictors = 24;

// Subset of predictors encoded as a bitmask over columns 0..p-1.
struct ModelId {
  std::uint32_t mask = 0;

  constexpr ModelId() = default;
  constexpr explicit ModelId(std::uint32_t m) : mask(m) {}

  int q() const noexcept { return std::popcount(mask); }
  bool contains(int j) const noexcept { return (mask >> j) & 1u; }
  bool is_null() const noexcept { return mask == 0; }

  std::vector<int> columns() const {
    std::vector<int> idx;
    idx.reserve(static_cast<std::size_t>(q()));
    for (std::uint32_t m = mask; m != 0; m &= m - 1) idx.push_back(std::countr_zero(m));
    return idx;
  }

  friend bool operator==(ModelId a, ModelId b) noexcept { return a.mask == b.mask; }
  friend bool operator!=(ModelId a, ModelId b) noexcept { return a.mask != b.mask; }
};

enum class Criterion { gbf = 0, ze, eb, aic, aicc, bic, general };
inline constexpr int kNumCriteria = 7;

inline bool is_bayes_factor(Criterion c) noexcept {
  return c == Criterion::gbf || c == Criterion::ze || c == Criterion::eb || c == Criterion::general;
}

// Higher is better for Bayes factors, lower for information criteria.
inline bool higher_is_better(Criterion c) noexcept { return is_bayes_factor(c); }

inline const char* criterion_name(Criterion c) noexcept {
  switch (c) {
    case Criterion::gbf: return "gbf";
    case Criterion::ze: return "ze";
    case Criterion::eb: return "eb";
    case Criterion::aic: return "aic";
    case Criterion::aicc: return "aicc";
    case Criterion::bic: return "bic";
    case Criterion::general: return "general";
  }
  return "?";
}

enum class NuScheme { paper, unit, explicit_vec };

struct EgRule {
  enum class Kind { condition, fixed };
  Kind kind = Kind::condition;  // condition: E[g] = dmin^2/dmax^2
  double value = 1.0;           // used when kind == fixed
};

struct Hyperparams {
  double a = -0.75;                 // must lie in (-1, -1/2)
  NuScheme nu = NuScheme::paper;    // nu_i = d_i^2/d_r^2
  std::vector<double> nu_explicit;  // descending, all >= 1 (explicit_vec only)
  EgRule eg;

  void validate(bool a_overridden = true) const {
    if (a_overridden && !(a > -1.0 && a < -0.5))
      raise(errc::bad_hyper, "hyperparameter a must lie in (-1, -1/2), got " + std::to_string(a));
    if (nu == NuScheme::explicit_vec) {
      if (nu_explicit.empty()) raise(errc::bad_hyper, "explicit nu scheme requires a nu vector");
      double prev = nu_explicit.front();
      for (double x : nu_explicit) {
        if (!(x >= 1.0)) raise(errc::bad_hyper, "explicit nu entries must be >= 1");
        if (x > prev) raise(errc::bad_hyper, "explicit nu entries must be non-increasing");
        prev = x;
      }
    }
  }

  // b is pinned to the value that yields the closed-form marginal.
  double b(int n, int q) const noexcept { return 0.5 * (n - q - 5) - a; }
};

// Everything the criteria need, derived from a model's spectrum under a nu scheme.
struct FitStats {
  double R2 = 0.0;
  double Q2 = 0.0;
  int q = 0;
  int r = 0;
  int n = 0;
  double dbar = 1.0;
  double dmin = 1.0;
  double dmax = 1.0;  // needed by the condition-number E[g] rule
  double lsnorm2 = 0.0;
  double rss_scaled = 1.0;     // 1 - R2 on the standardized response
  double sum_log_nu = 0.0;     // under the active nu scheme
  double one_minus_Q2 = 1.0;   // kept separately: Q2 -> 1 when q >= n-1
  ModelId id;
};

enum class ScoreStatus : std::uint8_t {
  ok = 0,
  rank_deficient,
  saturated,           // q < n-1 but 1-R2 < 1e-12
  unavailable_large_q, // criterion undefined for q >= n-1
  no_residual_df,      // EB with q >= n-2
  aicc_undefined,      // n-q-3 <= 0
};

inline const char* score_status_name(ScoreStatus s) noexcept {
  switch (s) {
    case ScoreStatus::ok: return "ok";
    case ScoreStatus::rank_deficient: return "rank_deficient";
    case ScoreStatus::saturated: return "saturated";
    case ScoreStatus::unavailable_large_q: return "unavailable_large_q";
    case ScoreStatus::no_residual_df: return "no_residual_df";
    case ScoreStatus::aicc_undefined: return "aicc_undefined";
  }
  return "?";
}

struct CriterionScore {
  ModelId id;
  Criterion tag = Criterion::gbf;
  double value = 0.0;
  ScoreStatus status = ScoreStatus::ok;
  bool boundary_hit = false;  // EB: maximizer landed on the search boundary

  bool valid() const noexcept { return status == ScoreStatus::ok; }
};

// Deterministic comparator: better score first, then smaller q, then smaller bitmask.
inline bool score_better(Criterion tag, double va, ModelId a, double vb, ModelId b) noexcept {
  if (va != vb) return higher_is_better(tag) ? va > vb : va < vb;
  const int qa = a.q(), qb = b.q();
  if (qa != qb) return qa < qb;
  return a.mask < b.mask;
}

}  // namespace gbf
