#pragma once

// Content Curator policy: zone classification, prerequisite/repetition
// filtering, 40/50/10 composition, coverage and fairness accounting.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tutor/config.hpp"
#include "tutor/learner_state.hpp"
#include "tutor/types.hpp"

namespace tutor {
namespace curriculum {

enum class Zone { Challenge, Growth, Mastered };

const char* to_string(Zone z);

Zone classify_zone(double m, const CurriculumConfig& config);

enum class SlotKind { Review, Growth, Challenge };

const char* to_string(SlotKind k);

struct Slot {
  ItemId item_id;
  SlotKind kind = SlotKind::Growth;
};

struct DailySet {
  std::vector<Slot> slots;
  int shortfall = 0;  // slots the filtered bank could not fill
};

struct SelectionRecord {
  Date date;
  ItemId item_id;
  std::vector<TopicId> topics;
};

// Items not selected within the trailing k-day window whose prerequisite
// topics all meet prereq_mastery_min; ordered by id.
std::vector<const ProblemItem*> eligible_items(
    const ProblemBank& bank, const LearnerState& state,
    const std::vector<SelectionRecord>& history, Date today,
    const CurriculumConfig& config);

// Largest-remainder apportionment of the 40/50/10 targets over set size N.
struct SlotTargets {
  int review = 0;
  int growth = 0;
  int challenge = 0;
};
SlotTargets apportion_slots(int n, const CurriculumConfig& config);

DailySet select_daily_set(const LearnerState& state, const ProblemBank& bank,
                          const std::vector<ReviewItem>& due_reviews,
                          const std::vector<SelectionRecord>& history,
                          Date today, const CurriculumConfig& config,
                          std::uint64_t seed);

struct CoverageReport {
  int horizon_days = 0;
  double coverage = 0.0;          // [0,1]
  double diversity = 0.0;         // normalized entropy, [0,1]
  double fairness_iqr_ratio = 0.0;
  bool fairness_defined = true;   // false when median gain <= 0
};

CoverageReport coverage_report(const std::vector<SelectionRecord>& log,
                               const std::set<TopicId>& bank_topics,
                               const std::vector<double>& gains, int horizon);

}  // namespace curriculum
}  // namespace tutor
