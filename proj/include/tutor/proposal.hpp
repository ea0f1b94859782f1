#pragma once

// Trigger, action, and proposal grammar shared by agents and orchestrator.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tutor/curriculum.hpp"
#include "tutor/learner_state.hpp"
#include "tutor/types.hpp"

namespace tutor {

enum class TriggerKind {
  OnSubmission,
  OnHintRequest,
  OnSessionCheck,
  OnDailyGeneration,
  OnReviewDue,
};

const char* to_string(TriggerKind k);
TriggerKind trigger_kind_from_string(const std::string& s);

struct Trigger {
  TriggerKind kind = TriggerKind::OnSessionCheck;
  Timestamp timestamp = 0;
  Date date;  // session day the trigger belongs to
  std::optional<Observation> observation;  // submission / review attempt
  std::optional<ItemId> item_id;           // hint request target
  int hint_history = 0;                    // prior hints on that item
  std::uint64_t seed = 0;                  // tie-break seed (daily generation)
};

enum class AgentId {
  SkillAssessment,
  Profiler,
  Feedback,
  Curator,
  ProgressSynthesizer,
  Engagement,
};

const char* to_string(AgentId a);

// ---- state-delta grammar (closed; four kinds) ----

enum class EngagementField { StreakDays, FailureStreak, LastSeen, ActivityMark };

const char* to_string(EngagementField f);

struct EngagementSetOp {
  EngagementField field = EngagementField::StreakDays;
  std::int64_t value = 0;  // LastSeen: timestamp; ActivityMark: attempts inc
  Date date;               // ActivityMark only
  int passes_inc = 0;      // ActivityMark only
};

enum class MemorySection { Trends, Misconceptions, Insights };

const char* to_string(MemorySection s);

struct MemoryAppendOp {
  MemorySection section = MemorySection::Trends;
  std::string text;  // trends / insights entry
  std::string tag;   // misconception tag (evidence increments by 1)
  bool allow_evict = true;
};

struct StateDelta {
  std::variant<MasteryDelta, ReviewItem, EngagementSetOp, MemoryAppendOp> op;
};

struct Proposal {
  AgentId agent = AgentId::Profiler;
  std::vector<StateDelta> deltas;
  std::string rationale;
};

// ---- actions (audited outputs that do not mutate state) ----

struct HintAction {
  ItemId item_id;
  int level = 1;
  HintTier tier = HintTier::Beginner;
  std::string text;
};

struct RecommendAction {
  curriculum::DailySet set;
};

struct InterventionAction {
  std::string kind;  // streak_nudge | reengagement | simpler_variant
  std::string message;
  Timestamp issued_at = 0;
};

struct FeedbackAction {
  bool verdict_pass = false;
  std::vector<std::string> failing_tests;
  std::map<std::string, std::vector<std::string>> suggestions;
  int detail_level = 1;
};

struct ScheduleAction {
  ItemId item_id;
  Date new_due;
  std::string reason;
};

struct Action {
  std::variant<HintAction, RecommendAction, InterventionAction, FeedbackAction,
               ScheduleAction>
      payload;
};

struct RejectedProposal {
  Proposal proposal;
  std::string reason;
};

struct AuditRecord {
  std::uint64_t version_before = 0;
  std::uint64_t version_after = 0;
  Trigger trigger;
  std::vector<Proposal> accepted;
  std::vector<RejectedProposal> rejected;
  std::vector<Action> actions;
  std::string state_digest_after;  // 64 hex chars
  double wall_time_ms = 0.0;
  bool failed = false;  // commit rolled back
};

}  // namespace tutor
