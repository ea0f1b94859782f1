#pragma once

// Versioned learner state: mastery map, review queue, engagement,
// preferences, bounded memory. All operations here are pure; mutation
// happens only through the orchestrator's commit path.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tutor/config.hpp"
#include "tutor/scheduler.hpp"
#include "tutor/types.hpp"

namespace tutor {

struct TopicMastery {
  TopicId topic_id;
  double m = 0.0;             // in [0,1]
  double alpha_count = 1.0;   // Beta evidence for success, >= 1
  double beta_count = 1.0;    // Beta evidence for failure, >= 1
  Timestamp last_update = 0;
};

struct ActivityDay {
  Date date;
  int attempts = 0;
  int passes = 0;
};

struct EngagementState {
  int streak_days = 0;
  Timestamp last_seen = 0;
  int failure_streak = 0;
  std::vector<ActivityDay> activity_window;  // trailing 30 days, oldest first

  const ActivityDay* day(Date d) const;
};

struct Preferences {
  double self_reported_skill = 0.0;  // [0,1]
  double expertise_rank = 0.0;       // [0,1]
  int daily_time_budget = 60;        // minutes
  std::string modality = "text";
  std::set<std::string> opt_outs;    // intervention kinds
};

struct Misconception {
  std::string tag;
  int evidence_count = 1;
  Timestamp last_seen = 0;
  int rank = 1;  // 1 = strongest evidence
};

struct MemorySections {
  std::vector<std::string> trends;
  std::vector<Misconception> misconceptions;
  std::vector<std::string> insights;
  int cap_per_section = 20;
};

struct LearnerState {
  std::string learner_id;
  std::map<TopicId, TopicMastery> mastery;
  std::vector<ReviewItem> reviews;
  EngagementState engagement;
  Preferences preferences;
  MemorySections memory;
  std::uint64_t version = 0;
  Timestamp updated_at = 0;

  const ReviewItem* find_review(const ItemId& id) const;
  double mean_mastery() const;  // 0 when the map is empty
};

// Result of one mastery update on one topic.
struct MasteryDelta {
  TopicId topic;
  double before = 0.0;
  double after = 0.0;
  double alpha_inc = 0.0;
  double beta_inc = 0.0;
  std::string rationale;
};

namespace mastery {

// Observation annotated with its topic tags, for initialization history.
struct TaggedObservation {
  Observation obs;
  std::vector<TopicId> topics;
};

// Recency-weighted initialization over per-topic history.
// Topics absent from the history get m=0 and Beta(1,1).
std::map<TopicId, TopicMastery> init_mastery(
    const std::vector<TaggedObservation>& history,
    const std::set<TopicId>& topics, const MasteryConfig& config,
    std::uint64_t seed);

// Expected solve time mu_i: item value when positive, else the median of
// the learner's recent solve times on the topic, else 300 s.
double expected_solve_time(const ProblemItem& item,
                           std::span<const double> recent_solve_times);

// Per-topic update pipeline: raw case split, penalties (pass only),
// momentum blend, Beta count increments. Pure; returns deltas only.
std::vector<MasteryDelta> apply_observation(const LearnerState& state,
                                            const Observation& obs,
                                            const ProblemItem& item,
                                            const MasteryConfig& config);

double compute_proficiency(const LearnerState& state,
                           const ProficiencyWeights& weights,
                           double recent_success, double streak_norm);

struct BetaMoments {
  double mean = 0.0;
  double variance = 0.0;
};

BetaMoments uncertainty(const TopicMastery& topic);

}  // namespace mastery

}  // namespace tutor
