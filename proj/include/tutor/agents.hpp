#pragma once

// Six deterministic reference policies plus the pluggable backend
// interface. Every operation is a pure function of its inputs.

#include <memory>
#include <optional>
#include <vector>

#include "tutor/config.hpp"
#include "tutor/curriculum.hpp"
#include "tutor/proposal.hpp"
#include "tutor/types.hpp"

namespace tutor {

struct BehavioralTrend {
  double velocity = 0.0;  // attempts/day, trailing 7 days
  bool fatigue_flag = false;
  double success_trend = 0.0;  // signed slope of daily success rate
};

struct Hint {
  int level = 1;
  HintTier tier = HintTier::Beginner;
  std::string text;
};

struct AssessmentResult {
  bool pass = false;
  std::vector<std::string> failing_tests;
  std::map<std::string, std::vector<std::string>> suggestions;
  int detail_level = 1;
};

struct Intervention {
  std::string kind;
  std::string message;
  Timestamp issued_at = 0;
};

namespace agents {

// Longest common substring length between hint text and solution.
std::size_t longest_common_substring(const std::string& a,
                                     const std::string& b);
constexpr std::size_t kDisclosureLimit = 12;

HintTier tier_for_proficiency(double p_hat);
int detail_level_for_tier(HintTier tier);

BehavioralTrend analyze_trend(const EngagementState& engagement, Date today);

Proposal profiler_analyze(const Observation& obs, const ProblemItem& item,
                          const LearnerState& state,
                          const MasteryConfig& config, Date today);

AssessmentResult assess_submission(const Observation& obs,
                                   const ProblemItem& item, double p_hat);

Hint generate_hint(const ProblemItem& item, int hint_history, double p_hat);

std::vector<Intervention> engagement_check(
    const LearnerState& state, Date today, const ProblemBank& bank,
    const std::vector<Intervention>& issued_today, const AgentsConfig& config);

Proposal synthesize_progress(const LearnerState& state, const Observation& obs,
                             const ProblemItem& item,
                             const SchedulerConfig& config, Date today);

// Schedule tightening for items whose recall forecast at the due date
// has dropped below target; used on observation-less on_review_due
// triggers. Returns the rescheduled review entries.
std::vector<ReviewItem> prepone_low_recall(const LearnerState& state,
                                           Date today,
                                           const SchedulerConfig& config);

// recent_success / streak_norm signals feeding the proficiency composite
double recent_success_rate(const EngagementState& engagement, Date today,
                           int window_days = 7);
double streak_norm(const EngagementState& engagement);
double proficiency_now(const LearnerState& state,
                       const ProficiencyWeights& weights, Date today);

}  // namespace agents

// ---- pluggable backend ----

struct AgentContext {
  const LearnerState& state;
  const ProblemBank& bank;
  const AppConfig& config;
  const std::vector<curriculum::SelectionRecord>& selection_history;
  const std::vector<Intervention>& interventions_today;
};

struct AgentOutput {
  std::optional<Proposal> proposal;
  std::vector<Action> actions;
};

class AgentBackend {
 public:
  virtual ~AgentBackend() = default;
  virtual AgentOutput evaluate(AgentId agent, const Trigger& trigger,
                               const AgentContext& ctx) = 0;
};

std::unique_ptr<AgentBackend> make_deterministic_backend();
// Serves recorded proposals from a JSON fixture, keyed by
// (trigger kind, sequence); falls back to empty outputs.
std::unique_ptr<AgentBackend> make_replay_backend(const std::string& fixture_path);

std::unique_ptr<AgentBackend> make_backend(const AgentsConfig& config);

}  // namespace tutor
