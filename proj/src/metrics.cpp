#include "tutor/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tutor {
namespace metrics {

double brier(const std::vector<ScoredOutcome>& pairs) {
  if (pairs.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& p : pairs) {
    double y = p.outcome ? 1.0 : 0.0;
    sum += (p.score - y) * (p.score - y);
  }
  return sum / static_cast<double>(pairs.size());
}

double ece(const std::vector<ScoredOutcome>& pairs, int bins) {
  if (pairs.empty() || bins < 1) return 0.0;
  std::vector<double> conf(bins, 0.0), acc(bins, 0.0);
  std::vector<int> count(bins, 0);
  for (const auto& p : pairs) {
    int b = std::min(bins - 1, static_cast<int>(p.score * bins));
    b = std::max(0, b);
    conf[b] += p.score;
    acc[b] += p.outcome ? 1.0 : 0.0;
    count[b]++;
  }
  double total = static_cast<double>(pairs.size());
  double e = 0.0;
  for (int b = 0; b < bins; ++b) {
    if (count[b] == 0) continue;
    double n = static_cast<double>(count[b]);
    e += (n / total) * std::abs(acc[b] / n - conf[b] / n);
  }
  return e;
}

double auroc(const std::vector<ScoredOutcome>& pairs) {
  std::size_t pos = 0, neg = 0;
  for (const auto& p : pairs) (p.outcome ? pos : neg)++;
  if (pos == 0 || neg == 0) return 0.5;

  // Mann-Whitney with average ranks for ties
  std::vector<const ScoredOutcome*> sorted;
  sorted.reserve(pairs.size());
  for (const auto& p : pairs) sorted.push_back(&p);
  std::sort(sorted.begin(), sorted.end(),
            [](const ScoredOutcome* a, const ScoredOutcome* b) {
              return a->score < b->score;
            });

  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j]->score == sorted[i]->score) ++j;
    double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (sorted[k]->outcome) rank_sum_pos += avg_rank;
    }
    i = j;
  }
  double u = rank_sum_pos - static_cast<double>(pos) * (pos + 1) / 2.0;
  return u / (static_cast<double>(pos) * static_cast<double>(neg));
}

double normalized_entropy(const std::vector<int>& counts, int k) {
  if (k <= 1 || counts.empty()) return 0.0;
  double total = 0.0;
  for (int c : counts) total += c;
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (int c : counts) {
    if (c <= 0) continue;
    double p = c / total;
    h -= p * std::log(p);
  }
  return h / std::log(static_cast<double>(k));
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("quantile of empty sample");
  std::sort(values.begin(), values.end());
  if (values.size() == 1) return values[0];
  double pos = p * static_cast<double>(values.size() - 1);
  std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  std::size_t hi = std::min(lo + 1, values.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

double iqr(const std::vector<double>& values) {
  return quantile(values, 0.75) - quantile(values, 0.25);
}

}  // namespace metrics
}  // namespace tutor
