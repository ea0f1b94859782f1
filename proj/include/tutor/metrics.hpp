#pragma once

// Calibration and ranking metrics over (score, outcome) pairs.

#include <optional>
#include <vector>

namespace tutor {
namespace metrics {

struct ScoredOutcome {
  double score = 0.0;  // predicted probability in [0,1]
  bool outcome = false;
};

double brier(const std::vector<ScoredOutcome>& pairs);

// Equal-width bins over [0,1].
double ece(const std::vector<ScoredOutcome>& pairs, int bins = 10);

// Rank-based AUROC with tie handling; 0.5 for constant scores or a
// single-class sample.
double auroc(const std::vector<ScoredOutcome>& pairs);

// Shannon entropy of counts, normalized to [0,1] by log(k); 0 when k <= 1.
double normalized_entropy(const std::vector<int>& counts, int k);

// Type-7 linear-interpolation quantile over a sorted copy.
double quantile(std::vector<double> values, double p);
double median(std::vector<double> values);
double iqr(const std::vector<double>& values);

}  // namespace metrics
}  // namespace tutor
