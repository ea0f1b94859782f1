#include "tutor/agents.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"
#include "tutor/scheduler.hpp"
#include "tutor/serialize.hpp"

namespace tutor {
namespace agents {

std::size_t longest_common_substring(const std::string& a,
                                     const std::string& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  std::size_t best = 0;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      if (a[i - 1] == b[j - 1]) {
        cur[j] = prev[j - 1] + 1;
        best = std::max(best, cur[j]);
      } else {
        cur[j] = 0;
      }
    }
    std::swap(prev, cur);
  }
  return best;
}

HintTier tier_for_proficiency(double p_hat) {
  if (p_hat < 0.3) return HintTier::Beginner;
  if (p_hat <= 0.7) return HintTier::Intermediate;
  return HintTier::Advanced;
}

int detail_level_for_tier(HintTier tier) {
  switch (tier) {
    case HintTier::Beginner: return 1;
    case HintTier::Intermediate: return 2;
    case HintTier::Advanced: return 3;
  }
  return 1;
}

double recent_success_rate(const EngagementState& engagement, Date today,
                           int window_days) {
  int attempts = 0, passes = 0;
  for (const auto& day : engagement.activity_window) {
    if (today.days - day.date.days < window_days) {
      attempts += day.attempts;
      passes += day.passes;
    }
  }
  return attempts > 0 ? static_cast<double>(passes) / attempts : 0.0;
}

double streak_norm(const EngagementState& engagement) {
  return std::min(engagement.streak_days / 30.0, 1.0);
}

double proficiency_now(const LearnerState& state,
                       const ProficiencyWeights& weights, Date today) {
  return mastery::compute_proficiency(
      state, weights, recent_success_rate(state.engagement, today),
      streak_norm(state.engagement));
}

BehavioralTrend analyze_trend(const EngagementState& engagement, Date today) {
  BehavioralTrend trend;
  int attempts_7d = 0;
  int today_attempts = 0, today_passes = 0;
  double sum_x = 0, sum_y = 0, sum_xx = 0, sum_xy = 0;
  int n = 0;
  for (const auto& day : engagement.activity_window) {
    int age = today.days - day.date.days;
    if (age < 0 || age >= 7) continue;
    attempts_7d += day.attempts;
    if (age == 0) {
      today_attempts = day.attempts;
      today_passes = day.passes;
    }
    if (day.attempts > 0) {
      double x = static_cast<double>(-age);
      double y = static_cast<double>(day.passes) / day.attempts;
      sum_x += x;
      sum_y += y;
      sum_xx += x * x;
      sum_xy += x * y;
      ++n;
    }
  }
  trend.velocity = attempts_7d / 7.0;
  if (n >= 2) {
    double denom = n * sum_xx - sum_x * sum_x;
    if (denom > 0) trend.success_trend = (n * sum_xy - sum_x * sum_y) / denom;
  }
  // trailing mean excludes today
  double trailing = (attempts_7d - today_attempts) / 6.0;
  double today_rate =
      today_attempts > 0 ? static_cast<double>(today_passes) / today_attempts : 1.0;
  trend.fatigue_flag =
      trailing > 0 && today_attempts > 2.0 * trailing && today_rate < 0.4;
  return trend;
}

Proposal profiler_analyze(const Observation& obs, const ProblemItem& item,
                          const LearnerState& state,
                          const MasteryConfig& config, Date today) {
  Proposal p;
  p.agent = AgentId::Profiler;

  auto deltas = mastery::apply_observation(state, obs, item, config);
  for (auto& d : deltas) p.deltas.push_back({std::move(d)});

  // misconception evidence from error tags; unknown tags count as "other"
  for (const auto& tag : obs.error_tags) {
    MemoryAppendOp op;
    op.section = MemorySection::Misconceptions;
    op.tag = known_error_tag(tag) ? tag : "other";
    p.deltas.push_back({op});
  }

  // engagement bookkeeping
  EngagementSetOp mark;
  mark.field = EngagementField::ActivityMark;
  mark.date = today;
  mark.value = 1;
  mark.passes_inc = obs.passed ? 1 : 0;
  p.deltas.push_back({mark});

  EngagementSetOp seen;
  seen.field = EngagementField::LastSeen;
  seen.value = obs.timestamp;
  p.deltas.push_back({seen});

  EngagementSetOp fails;
  fails.field = EngagementField::FailureStreak;
  fails.value = obs.passed ? 0 : state.engagement.failure_streak + 1;
  p.deltas.push_back({fails});

  bool active_today = state.engagement.day(today) != nullptr;
  if (!active_today) {
    bool active_yesterday = state.engagement.day(today.plus(-1)) != nullptr;
    EngagementSetOp streak;
    streak.field = EngagementField::StreakDays;
    streak.value = active_yesterday ? state.engagement.streak_days + 1 : 1;
    p.deltas.push_back({streak});
  }

  BehavioralTrend trend = analyze_trend(state.engagement, today);
  if (trend.fatigue_flag) {
    MemoryAppendOp note;
    note.section = MemorySection::Trends;
    note.text = today.to_string() + " fatigue: attempt spike with low success";
    p.deltas.push_back({note});
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "velocity=%.2f trend=%+.3f fatigue=%d",
                trend.velocity, trend.success_trend,
                trend.fatigue_flag ? 1 : 0);
  p.rationale = buf;
  return p;
}

AssessmentResult assess_submission(const Observation& obs,
                                   const ProblemItem& item, double p_hat) {
  if (obs.tests_total == 0) throw TutorError("malformed item: zero tests");
  obs.check();

  AssessmentResult res;
  res.pass = obs.passed;
  res.detail_level = detail_level_for_tier(tier_for_proficiency(p_hat));
  if (!obs.passed) {
    // errors alone; no improvement suggestions on failure
    for (int i = obs.tests_passed; i < obs.tests_total; ++i) {
      res.failing_tests.push_back(item.id + "/t" + std::to_string(i + 1));
    }
    return res;
  }
  for (const auto& [category, entries] : item.suggestions) {
    std::vector<std::string> keep;
    for (const auto& s : entries) {
      if (static_cast<int>(keep.size()) >= res.detail_level) break;
      keep.push_back(s);
    }
    if (!keep.empty()) res.suggestions[category] = std::move(keep);
  }
  return res;
}

Hint generate_hint(const ProblemItem& item, int hint_history, double p_hat) {
  if (item.hint_templates.empty()) {
    throw TutorError("hint unavailable: item " + item.id + " has no templates");
  }
  Hint hint;
  hint.level = std::min(5, 1 + hint_history);
  hint.tier = tier_for_proficiency(p_hat);

  for (int level = hint.level; level >= 1; --level) {
    if (auto text = item.hint_template(level, hint.tier)) {
      hint.level = level;
      hint.text = *text;
      break;
    }
  }
  if (hint.text.empty()) {
    throw TutorError("hint unavailable: no template at or below level " +
                     std::to_string(hint.level));
  }
  if (longest_common_substring(hint.text, item.reference_solution) >=
      kDisclosureLimit) {
    throw TutorError("hint rejected: overlaps reference solution");
  }
  return hint;
}

std::vector<Intervention> engagement_check(
    const LearnerState& state, Date today, const ProblemBank& bank,
    const std::vector<Intervention>& issued_today, const AgentsConfig& config) {
  auto suppressed = [&](const std::string& kind) {
    if (state.preferences.opt_outs.count(kind)) return true;
    for (const auto& i : issued_today) {
      if (i.kind == kind) return true;
    }
    return false;
  };

  std::vector<Intervention> out;
  const auto& eng = state.engagement;

  if (eng.streak_days >= 3 && eng.day(today) == nullptr &&
      !suppressed("streak_nudge")) {
    out.push_back({"streak_nudge",
                   "Nice streak so far. A short session today keeps it going.",
                   today.to_timestamp()});
  }

  Date last_seen_day = Date::from_timestamp(eng.last_seen);
  if (eng.last_seen > 0 &&
      today.days - last_seen_day.days >= config.inactivity_days &&
      !suppressed("reengagement")) {
    out.push_back({"reengagement",
                   "It has been a few days. Ready to pick up where you left off?",
                   today.to_timestamp()});
  }

  if (eng.failure_streak >= config.failure_streak_threshold &&
      !suppressed("simpler_variant")) {
    // weakest topic with an Easy item available
    const ProblemItem* pick = nullptr;
    double weakest = 2.0;
    for (const auto& item : bank.items) {
      if (item.difficulty != Difficulty::Easy) continue;
      auto it = state.mastery.find(item.primary_topic());
      double m = it == state.mastery.end() ? 0.0 : it->second.m;
      if (m < weakest) {
        weakest = m;
        pick = &item;
      }
    }
    std::string msg = "A few tough ones in a row. Would you like to warm up";
    if (pick) msg += " with '" + pick->id + "'";
    msg += " before trying again?";
    out.push_back({"simpler_variant", msg, today.to_timestamp()});
  }
  return out;
}

Proposal synthesize_progress(const LearnerState& state, const Observation& obs,
                             const ProblemItem& item,
                             const SchedulerConfig& config, Date today) {
  obs.check();
  double expected = mastery::expected_solve_time(item, {});
  Quality q = sm2::derive_quality(obs, expected);

  ReviewItem entry;
  if (const ReviewItem* existing = state.find_review(item.id)) {
    entry = *existing;
  } else {
    entry.item_id = item.id;
    entry.topics.insert(item.topics.begin(), item.topics.end());
    entry.ease_factor = sm2::kInitialEaseFactor;
    entry.n_reviews = 0;
    entry.interval_days = 1;
  }

  double ef_new = sm2::update_ease(entry.ease_factor, q);
  int base = sm2::next_interval(entry.n_reviews, entry.interval_days, ef_new);
  int interval = sm2::adjust_interval(base, obs, expected, ef_new, config);

  entry.ease_factor = ef_new;
  entry.interval_days = interval;
  entry.due_date = today.plus(interval);
  entry.n_reviews += 1;

  Proposal p;
  p.agent = AgentId::ProgressSynthesizer;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "q=%d ef=%.3f interval=%d", q.q, ef_new,
                interval);
  p.rationale = buf;
  p.deltas.push_back({entry});
  return p;
}

std::vector<ReviewItem> prepone_low_recall(const LearnerState& state,
                                           Date today,
                                           const SchedulerConfig& config) {
  std::vector<ReviewItem> out;
  for (const auto& r : state.reviews) {
    if (r.due_date <= today) continue;
    double at_due = sm2::predict_recall(r.interval_days, r.ease_factor,
                                        r.interval_days, config);
    if (at_due >= config.recall_min) continue;
    double tau = sm2::recall_tau(r.ease_factor, r.interval_days, config);
    int target =
        std::max(1, static_cast<int>(std::floor(-tau * std::log(config.recall_min))));
    Date new_due = r.last_review_date().plus(target);
    if (new_due < today) new_due = today;
    if (new_due < r.due_date) {
      ReviewItem moved = r;
      moved.due_date = new_due;
      moved.interval_days = new_due.days - r.last_review_date().days;
      out.push_back(std::move(moved));
    }
  }
  return out;
}

}  // namespace agents

// ---- backends ----

namespace {

class DeterministicBackend : public AgentBackend {
 public:
  AgentOutput evaluate(AgentId agent, const Trigger& trigger,
                       const AgentContext& ctx) override {
    AgentOutput out;
    const AppConfig& cfg = ctx.config;
    switch (agent) {
      case AgentId::SkillAssessment: {
        if (!trigger.observation) break;
        const ProblemItem* item = ctx.bank.find(trigger.observation->item_id);
        if (!item) throw TutorError("unknown item: " + trigger.observation->item_id);
        double p_hat =
            agents::proficiency_now(ctx.state, cfg.proficiency, trigger.date);
        auto res = agents::assess_submission(*trigger.observation, *item, p_hat);
        FeedbackAction fb;
        fb.verdict_pass = res.pass;
        fb.failing_tests = std::move(res.failing_tests);
        fb.suggestions = std::move(res.suggestions);
        fb.detail_level = res.detail_level;
        out.actions.push_back({std::move(fb)});
        break;
      }
      case AgentId::Profiler: {
        if (!trigger.observation) break;
        const ProblemItem* item = ctx.bank.find(trigger.observation->item_id);
        if (!item) throw TutorError("unknown item: " + trigger.observation->item_id);
        out.proposal = agents::profiler_analyze(*trigger.observation, *item,
                                                ctx.state, cfg.mastery,
                                                trigger.date);
        break;
      }
      case AgentId::Feedback: {
        if (trigger.kind != TriggerKind::OnHintRequest) break;
        if (!trigger.item_id) throw TutorError("hint request without item id");
        const ProblemItem* item = ctx.bank.find(*trigger.item_id);
        if (!item) throw TutorError("unknown item: " + *trigger.item_id);
        double p_hat =
            agents::proficiency_now(ctx.state, cfg.proficiency, trigger.date);
        Hint hint = agents::generate_hint(*item, trigger.hint_history, p_hat);
        out.actions.push_back(
            {HintAction{item->id, hint.level, hint.tier, hint.text}});
        break;
      }
      case AgentId::Curator: {
        if (trigger.kind != TriggerKind::OnDailyGeneration) break;
        auto due = sm2::build_review_queue(ctx.state, trigger.date,
                                           cfg.scheduler);
        auto set = curriculum::select_daily_set(
            ctx.state, ctx.bank, due, ctx.selection_history, trigger.date,
            cfg.curriculum, trigger.seed);
        out.actions.push_back({RecommendAction{std::move(set)}});
        break;
      }
      case AgentId::ProgressSynthesizer: {
        if (trigger.observation) {
          const ProblemItem* item = ctx.bank.find(trigger.observation->item_id);
          if (!item) {
            throw TutorError("unknown item: " + trigger.observation->item_id);
          }
          out.proposal = agents::synthesize_progress(
              ctx.state, *trigger.observation, *item, cfg.scheduler,
              trigger.date);
        } else {
          auto moved = agents::prepone_low_recall(ctx.state, trigger.date,
                                                  cfg.scheduler);
          if (!moved.empty()) {
            Proposal p;
            p.agent = AgentId::ProgressSynthesizer;
            p.rationale = "recall-driven preponement";
            for (auto& r : moved) p.deltas.push_back({std::move(r)});
            out.proposal = std::move(p);
          }
        }
        break;
      }
      case AgentId::Engagement: {
        auto interventions = agents::engagement_check(
            ctx.state, trigger.date, ctx.bank, ctx.interventions_today,
            cfg.agents);
        for (auto& i : interventions) {
          out.actions.push_back(
              {InterventionAction{i.kind, i.message, i.issued_at}});
        }
        break;
      }
    }
    return out;
  }
};

// Serves pre-recorded proposals; stands in for generative backends in
// integration tests.
class ReplayBackend : public AgentBackend {
 public:
  explicit ReplayBackend(const std::string& fixture_path) {
    std::ifstream in(fixture_path);
    if (!in) throw TutorError("cannot open replay fixture: " + fixture_path);
    nlohmann::json j;
    in >> j;
    for (const auto& rec : j.at("proposals")) {
      std::string key = rec.at("trigger").get<std::string>() + "/" +
                        rec.at("agent").get<std::string>();
      queues_[key].push_back(proposal_from_json(rec.at("proposal")));
    }
  }

  AgentOutput evaluate(AgentId agent, const Trigger& trigger,
                       const AgentContext&) override {
    AgentOutput out;
    std::string key = std::string(to_string(trigger.kind)) + "/" +
                      to_string(agent);
    auto it = queues_.find(key);
    if (it != queues_.end() && cursor_[key] < it->second.size()) {
      out.proposal = it->second[cursor_[key]++];
    }
    return out;
  }

 private:
  std::map<std::string, std::vector<Proposal>> queues_;
  std::map<std::string, std::size_t> cursor_;
};

}  // namespace

std::unique_ptr<AgentBackend> make_deterministic_backend() {
  return std::make_unique<DeterministicBackend>();
}

std::unique_ptr<AgentBackend> make_replay_backend(const std::string& fixture_path) {
  return std::make_unique<ReplayBackend>(fixture_path);
}

std::unique_ptr<AgentBackend> make_backend(const AgentsConfig& config) {
  if (config.backend == "deterministic") return make_deterministic_backend();
  if (config.backend == "replay") return make_replay_backend(config.replay_fixture);
  throw TutorError("unknown agents.backend: " + config.backend);
}

}  // namespace tutor
