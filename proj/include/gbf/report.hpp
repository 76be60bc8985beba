#pragma once

#include <cstdint>
#include <string>

#include "gbf/selection.hpp"
#include "gbf/shrinkage.hpp"
#include "gbf/simbench.hpp"

namespace gbf {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kVersion = "1.0.0";

// All reports are self-describing (criterion, hyperparameters, seed, version)
// and contain no wall-clock fields, so byte-identical output across runs and
// thread counts is a hard guarantee.
std::string selection_json(const SelectionResult& res);
std::string selection_csv(const SelectionResult& res);
std::string selection_table(const SelectionResult& res);

std::string estimate_json(const ShrinkageFit& fit, const StandardizedDesign& design,
                          const Hyperparams& hp);
std::string estimate_csv(const ShrinkageFit& fit);
std::string estimate_table(const ShrinkageFit& fit, const StandardizedDesign& design);

std::string bench_json(const BenchReport& rep);
std::string bench_table(const BenchReport& rep);

std::string trend_json(const std::vector<TrendRow>& rows, const Scenario& base,
                       const Hyperparams& hp);
std::string trend_table(const std::vector<TrendRow>& rows);

}  // namespace gbf
