#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include "gbf/criteria.hpp"
#include "gbf/design.hpp"
#include "gbf/types.hpp"

namespace gbf {

struct ModelPrior {
  enum class Kind { uniform, explicit_weights };
  Kind kind = Kind::uniform;
  std::vector<double> weights;  // indexed by bitmask when explicit

  void validate(int p) const;
  // log pi_gamma up to a common constant; -inf for zero-weight models.
  double log_weight(ModelId id) const noexcept;
};

struct SelectionConfig {
  Criterion criterion = Criterion::gbf;
  Hyperparams hp;
  ModelPrior prior;
  std::optional<int> max_q;
  int top_k = 10;
  int threads = 0;  // 0: hardware concurrency
};

struct SelectionEntry {
  ModelId id;
  double value = 0.0;
  double posterior = 0.0;  // 0 when the criterion has no posterior
  double R2 = 0.0;
  int q = 0;
  double cond = 1.0;  // dbar/dmin
};

struct ExclusionNote {
  ModelId id;
  ScoreStatus reason = ScoreStatus::ok;
};

struct SelectionResult {
  Criterion criterion = Criterion::gbf;
  Hyperparams hp;
  int n = 0;
  int p = 0;
  std::optional<int> max_q;
  int top_k = 0;
  std::vector<SelectionEntry> entries;             // best first
  std::uint64_t scored = 0;                        // valid models (incl. null)
  std::uint64_t excluded_rank_deficient = 0;
  std::uint64_t excluded_unavailable = 0;          // saturated / large-q / no-df
  std::vector<ExclusionNote> exclusion_sample;     // first few, for audit
  bool has_posterior = false;                      // Bayes-factor criteria only
  double log_normalizer = 0.0;                     // log sum of prior-weighted BFs
  std::vector<double> inclusion;                   // per-predictor posterior inclusion
  std::vector<std::string> names;
  double wall_seconds = 0.0;  // never serialized (reports must be run-invariant)
};

// All bitmasks with popcount <= max_q, ascending; p <= 24 enforced.
std::vector<ModelId> enumerate_models(int p, std::optional<int> max_q = std::nullopt);

SelectionResult rank_models(const StandardizedDesign& design, const SelectionConfig& cfg);

// Normalized posterior over the given scores (shared Bayes-factor tag).
std::vector<double> posterior_probs(const std::vector<CriterionScore>& scores,
                                    const ModelPrior& prior);

namespace detail {

inline constexpr std::uint64_t kSweepBlock = 4096;

// One evaluated model inside a sweep.
struct ModelEval {
  ModelId id;
  bool spectrum_ok = true;
  FitStats stats;
  double value[kNumCriteria];
  ScoreStatus status[kNumCriteria];
  bool boundary_hit = false;
};

void eval_model(const StandardizedDesign& design, ModelId id, const Hyperparams& hp,
                std::uint32_t criteria_mask, SweepWorkspace& ws, ModelEval& ev) noexcept;

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Deterministic block-parallel sweep: models are split into fixed blocks of
// kSweepBlock consecutive bitmasks; each block is consumed sequentially into
// its own Acc; blocks are merged in index order, so the result is
// byte-identical for every thread count.
//
// Acc requirements: movable, void consume(const ModelEval&),
// void merge(Acc&& next); make_acc() produces a fresh accumulator.
template <class Acc, class Factory>
Acc sweep_models(const StandardizedDesign& design, const Hyperparams& hp,
                 std::uint32_t criteria_mask, std::optional<int> max_q, int threads,
                 const Factory& make_acc) {
  const std::uint64_t total = std::uint64_t{1} << design.p;
  const std::uint64_t nblocks = (total + kSweepBlock - 1) / kSweepBlock;
  std::vector<std::optional<Acc>> blocks(static_cast<std::size_t>(nblocks));
  const int nthreads = static_cast<int>(
      std::min<std::uint64_t>(static_cast<std::uint64_t>(resolve_threads(threads)), nblocks));
  const int qcap = max_q ? *max_q : kMaxPredictors;

  std::atomic<std::uint64_t> next{0};
  auto work = [&]() {
    SweepWorkspace ws;
    ModelEval ev;
    for (;;) {
      const std::uint64_t b = next.fetch_add(1, std::memory_order_relaxed);
      if (b >= nblocks) break;
      Acc acc = make_acc();
      const std::uint64_t lo = b * kSweepBlock;
      const std::uint64_t hi = std::min(total, lo + kSweepBlock);
      for (std::uint64_t mask = lo; mask < hi; ++mask) {
        const ModelId id{static_cast<std::uint32_t>(mask)};
        if (id.q() > qcap) continue;
        eval_model(design, id, hp, criteria_mask, ws, ev);
        acc.consume(ev);
      }
      blocks[static_cast<std::size_t>(b)].emplace(std::move(acc));
    }
  };

  if (nthreads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  Acc out = std::move(*blocks.front());
  for (std::size_t b = 1; b < blocks.size(); ++b) out.merge(std::move(*blocks[b]));
  return out;
}

// Stable log(exp(a) + exp(b)).
double log_add(double a, double b) noexcept;

}  // namespace detail

}  // namespace gbf
