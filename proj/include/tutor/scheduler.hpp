#pragma once

// Enhanced SM-2 spaced repetition: quality derivation, ease-factor
// updates, interval sequencing, recall prediction, context adjustments.

#include <set>
#include <vector>

#include "tutor/config.hpp"
#include "tutor/types.hpp"

namespace tutor {

struct LearnerState;

struct ReviewItem {
  ItemId item_id;
  std::set<TopicId> topics;
  Date due_date;
  int interval_days = 1;       // >= 1
  double ease_factor = 2.5;    // >= 1.3
  int n_reviews = 0;

  Date last_review_date() const { return due_date.plus(-interval_days); }
};

struct Quality {
  int q = 0;  // in {0..5}
};

namespace sm2 {

constexpr double kMinEaseFactor = 1.3;
constexpr double kInitialEaseFactor = 2.5;

Quality derive_quality(const Observation& obs, double expected_time);

double update_ease(double ef, Quality q);

// n_reviews counts reviews completed before this one.
int next_interval(int n_reviews, int prev_interval, double ef_new);

// Forgetting-curve time constant: tau = c * EF * interval.
double recall_tau(double ef, int interval_days, const SchedulerConfig& config);

double predict_recall(double delta_t_days, double ef, int interval_days,
                      const SchedulerConfig& config);

// Hint/speed multipliers plus recall-driven preponement. Result >= 1.
int adjust_interval(int base_days, const Observation& obs,
                    double expected_time, double ef,
                    const SchedulerConfig& config);

// Items due today or earlier, ordered by (due date, predicted recall),
// truncated to daily_cap; truncated items carry over untouched.
std::vector<ReviewItem> build_review_queue(const LearnerState& state,
                                           Date today,
                                           const SchedulerConfig& config);

}  // namespace sm2

}  // namespace tutor
