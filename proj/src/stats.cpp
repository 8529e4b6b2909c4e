#include "profilebench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "profilebench/rng.hpp"

namespace profilebench {

double evaluate_statistic(std::vector<double> values, Statistic stat) {
  if (values.empty()) throw std::invalid_argument("evaluate_statistic: empty input");
  if (stat == Statistic::kMean) {
    return std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  }
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::pair<double, double> bootstrap_ci(const std::vector<double>& values,
                                       Statistic stat, int n_boot, double level,
                                       std::uint64_t seed) {
  if (values.size() < 2) throw std::invalid_argument("bootstrap_ci: need at least 2 values");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("bootstrap_ci: bad level");
  if (n_boot < 2) throw std::invalid_argument("bootstrap_ci: need at least 2 resamples");

  const std::size_t n = values.size();
  std::vector<double> stats(static_cast<std::size_t>(n_boot));
  std::vector<double> resampled(n);
  Rng rng(seed);
  for (int b = 0; b < n_boot; ++b) {
    for (std::size_t i = 0; i < n; ++i) {
      resampled[i] = values[static_cast<std::size_t>(rng.uniform_int(n))];
    }
    stats[static_cast<std::size_t>(b)] = evaluate_statistic(resampled, stat);
  }
  std::sort(stats.begin(), stats.end());

  auto quantile = [&](double q) {
    const double pos = q * (n_boot - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, static_cast<std::size_t>(n_boot - 1));
    const double frac = pos - static_cast<double>(lo);
    return stats[lo] * (1.0 - frac) + stats[hi] * frac;
  };
  const double alpha = 1.0 - level;
  return {quantile(alpha / 2.0), quantile(1.0 - alpha / 2.0)};
}

double wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("wilcoxon: length mismatch");

  std::vector<double> diffs;
  diffs.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d != 0.0) diffs.push_back(d);
  }
  if (diffs.empty()) {
    throw std::invalid_argument("wilcoxon: all differences are zero, test undefined");
  }
  const int n = static_cast<int>(diffs.size());
  if (n < 5) {
    throw std::invalid_argument("wilcoxon: need at least 5 nonzero differences");
  }

  // Average ranks of |d|; doubled ranks are integers even with ties.
  std::vector<int> order(diffs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    return std::abs(diffs[static_cast<std::size_t>(i)]) <
           std::abs(diffs[static_cast<std::size_t>(j)]);
  });
  std::vector<int> rank2(diffs.size());  // 2 * rank
  std::vector<int> tie_sizes;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() &&
           std::abs(diffs[static_cast<std::size_t>(order[j])]) ==
               std::abs(diffs[static_cast<std::size_t>(order[i])])) {
      ++j;
    }
    const int r2 = static_cast<int>(i + 1 + j) ;  // 2 * average of ranks i+1..j
    for (std::size_t k = i; k < j; ++k) rank2[static_cast<std::size_t>(order[k])] = r2;
    tie_sizes.push_back(static_cast<int>(j - i));
    i = j;
  }

  long long w2_plus = 0;  // 2 * W+
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    if (diffs[i] > 0.0) w2_plus += rank2[i];
  }

  if (n <= 25) {
    // Exact null: each pair contributes its doubled rank with probability
    // 1/2; count sign patterns by doubled-rank sum.
    const long long max2 = std::accumulate(rank2.begin(), rank2.end(), 0ll);
    std::vector<double> count(static_cast<std::size_t>(max2) + 1, 0.0);
    count[0] = 1.0;
    long long reach = 0;
    for (int r2 : rank2) {
      reach += r2;
      for (long long s = reach; s >= r2; --s) {
        count[static_cast<std::size_t>(s)] += count[static_cast<std::size_t>(s - r2)];
      }
    }
    const double total = std::ldexp(1.0, n);  // 2^n patterns
    double p_le = 0.0, p_ge = 0.0;
    for (long long s = 0; s <= max2; ++s) {
      if (s <= w2_plus) p_le += count[static_cast<std::size_t>(s)];
      if (s >= w2_plus) p_ge += count[static_cast<std::size_t>(s)];
    }
    return std::min(1.0, 2.0 * std::min(p_le, p_ge) / total);
  }

  const double nn = n;
  const double mean = nn * (nn + 1.0) / 4.0;
  double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0;
  for (int t : tie_sizes) {
    var -= (static_cast<double>(t) * t * t - t) / 48.0;
  }
  if (var <= 0.0) {
    throw std::invalid_argument("wilcoxon: zero variance (all magnitudes tied)");
  }
  const double w_plus = 0.5 * static_cast<double>(w2_plus);
  double z = w_plus - mean;
  // Continuity correction pulls the statistic half a step toward the mean.
  if (z > 0.5) {
    z -= 0.5;
  } else if (z < -0.5) {
    z += 0.5;
  } else {
    z = 0.0;
  }
  z /= std::sqrt(var);
  const double p = std::erfc(std::abs(z) / std::sqrt(2.0));  // 2 * (1 - Phi(|z|))
  return std::min(1.0, p);
}

}  // namespace profilebench
