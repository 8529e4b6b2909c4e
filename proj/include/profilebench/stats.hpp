#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace profilebench {

enum class Statistic { kMean, kMedian };

double evaluate_statistic(std::vector<double> values, Statistic stat);

// Percentile bootstrap confidence interval; deterministic under the seed.
std::pair<double, double> bootstrap_ci(const std::vector<double>& values,
                                       Statistic stat, int n_boot, double level,
                                       std::uint64_t seed);

// Two-sided paired signed-rank test. Zero differences are dropped; at least
// 5 nonzero pairs are required. Exact null distribution for n <= 25,
// tie-corrected normal approximation with continuity correction above.
double wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace profilebench
