#include "tutor/scheduler.hpp"

#include <algorithm>
#include <cmath>

#include "tutor/learner_state.hpp"

namespace tutor {

void SchedulerConfig::check() const {
  if (!(shorten_factor > 0.0 && shorten_factor < 1.0 &&
        lengthen_factor > 1.0)) {
    throw TutorError("need 0 < shorten_factor < 1 < lengthen_factor");
  }
  if (fast_fraction <= 0.0 || fast_fraction >= 1.0) {
    throw TutorError("fast_fraction must be in (0,1)");
  }
  if (recall_min <= 0.0 || recall_min >= 1.0) {
    throw TutorError("recall_min must be in (0,1)");
  }
  if (tau_scale_c <= 0.0) throw TutorError("tau_scale_c must be positive");
  if (daily_cap < 1) throw TutorError("daily_cap must be positive");
  if (hint_threshold < 0) throw TutorError("hint_threshold must be >= 0");
}

namespace sm2 {

Quality derive_quality(const Observation& obs, double expected_time) {
  if (expected_time <= 0.0) throw TutorError("expected_time must be positive");
  if (obs.abandoned) return {0};
  if (obs.passed) {
    if (obs.hint_count > 0) return {3};
    if (obs.solve_time <= 0.75 * expected_time) return {5};
    return {4};
  }
  return obs.tests_passed >= 1 ? Quality{2} : Quality{1};
}

double update_ease(double ef, Quality q) {
  double qq = static_cast<double>(q.q);
  return std::max(kMinEaseFactor, ef - 0.8 + 0.28 * qq - 0.02 * qq * qq);
}

int next_interval(int n_reviews, int prev_interval, double ef_new) {
  if (n_reviews == 0) return 1;
  if (n_reviews == 1) return 6;
  int days = static_cast<int>(std::llround(prev_interval * ef_new));
  return std::max(1, days);
}

double recall_tau(double ef, int interval_days, const SchedulerConfig& config) {
  return config.tau_scale_c * ef * static_cast<double>(interval_days);
}

double predict_recall(double delta_t_days, double ef, int interval_days,
                      const SchedulerConfig& config) {
  if (delta_t_days < 0.0) throw TutorError("negative elapsed time");
  return std::exp(-delta_t_days / recall_tau(ef, interval_days, config));
}

int adjust_interval(int base_days, const Observation& obs,
                    double expected_time, double ef,
                    const SchedulerConfig& config) {
  if (base_days < 1) throw TutorError("base interval must be >= 1");
  int days = base_days;
  if (obs.hint_count > config.hint_threshold) {
    days = static_cast<int>(std::ceil(days * config.shorten_factor));
  } else if (obs.passed && obs.hint_count == 0 &&
             obs.solve_time < config.fast_fraction * expected_time) {
    days = static_cast<int>(std::llround(days * config.lengthen_factor));
  }
  days = std::max(1, days);

  // prepone when the recall forecast at the due date dips below target
  double tau = recall_tau(ef, days, config);
  if (std::exp(-days / tau) < config.recall_min) {
    days = static_cast<int>(std::floor(-tau * std::log(config.recall_min)));
  }
  return std::max(1, days);
}

std::vector<ReviewItem> build_review_queue(const LearnerState& state,
                                           Date today,
                                           const SchedulerConfig& config) {
  struct Scored {
    ReviewItem item;
    double recall;
  };
  std::vector<Scored> due;
  for (const auto& r : state.reviews) {
    if (r.due_date <= today) {
      double dt = static_cast<double>(today.days - r.last_review_date().days);
      due.push_back({r, predict_recall(dt, r.ease_factor, r.interval_days,
                                       config)});
    }
  }
  std::stable_sort(due.begin(), due.end(), [](const Scored& a, const Scored& b) {
    if (a.item.due_date != b.item.due_date) {
      return a.item.due_date < b.item.due_date;
    }
    if (a.recall != b.recall) return a.recall < b.recall;
    return a.item.item_id < b.item.item_id;
  });
  if (due.size() > static_cast<std::size_t>(config.daily_cap)) {
    due.resize(config.daily_cap);  // carried items keep their due dates
  }
  std::vector<ReviewItem> out;
  out.reserve(due.size());
  for (auto& s : due) out.push_back(std::move(s.item));
  return out;
}

}  // namespace sm2

}  // namespace tutor
