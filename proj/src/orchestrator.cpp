#include "tutor/orchestrator.hpp"

#include <algorithm>
#include <chrono>

#include "tutor/serialize.hpp"

namespace tutor {

Orchestrator::Orchestrator(LearnerState initial, ProblemBank bank,
                           AppConfig config,
                           std::unique_ptr<AgentBackend> backend)
    : state_(std::move(initial)),
      bank_(std::move(bank)),
      config_(std::move(config)),
      backend_(std::move(backend)) {
  config_.check();
  bank_.check();
  for (const auto& r : state_.reviews) {
    for (const auto& t : r.topics) {
      if (!bank_.has_topic(t)) {
        throw TutorError("review item topic not in bank: " + t);
      }
    }
  }
}

std::vector<AgentId> Orchestrator::route_trigger(TriggerKind kind) {
  switch (kind) {
    case TriggerKind::OnSubmission:
      return {AgentId::SkillAssessment, AgentId::Profiler, AgentId::Feedback};
    case TriggerKind::OnHintRequest:
      return {AgentId::Feedback};
    case TriggerKind::OnSessionCheck:
      return {AgentId::Curator, AgentId::Engagement};
    case TriggerKind::OnDailyGeneration:
      return {AgentId::Curator};
    case TriggerKind::OnReviewDue:
      return {AgentId::ProgressSynthesizer, AgentId::Curator};
  }
  return {};
}

ValidationResult Orchestrator::validate(const Proposal& p,
                                        const LearnerState& state,
                                        const ProblemBank& bank,
                                        std::span<const AgentId> pipeline,
                                        const AgentsConfig& agents_config) {
  if (std::find(pipeline.begin(), pipeline.end(), p.agent) == pipeline.end()) {
    return {false, std::string("agent not in routed pipeline: ") +
                       to_string(p.agent)};
  }
  for (const auto& delta : p.deltas) {
    if (const auto* md = std::get_if<MasteryDelta>(&delta.op)) {
      if (state.mastery.find(md->topic) == state.mastery.end()) {
        return {false, "unknown-target: topic " + md->topic};
      }
      if (md->after < 0.0 || md->after > 1.0 || md->before < 0.0 ||
          md->before > 1.0) {
        return {false, "bounds: mastery outside [0,1] on " + md->topic};
      }
      if (md->alpha_inc < 0.0 || md->beta_inc < 0.0) {
        return {false, "bounds: negative Beta increments"};
      }
    } else if (const auto* ri = std::get_if<ReviewItem>(&delta.op)) {
      if (bank.find(ri->item_id) == nullptr) {
        return {false, "unknown-target: item " + ri->item_id};
      }
      for (const auto& t : ri->topics) {
        if (!bank.has_topic(t)) return {false, "unknown-target: topic " + t};
      }
      if (ri->ease_factor < sm2::kMinEaseFactor || ri->interval_days < 1 ||
          ri->n_reviews < 0) {
        return {false, "bounds: malformed review item " + ri->item_id};
      }
    } else if (const auto* es = std::get_if<EngagementSetOp>(&delta.op)) {
      if (es->field != EngagementField::LastSeen && es->value < 0) {
        return {false, "bounds: negative engagement counter"};
      }
    } else if (const auto* ma = std::get_if<MemoryAppendOp>(&delta.op)) {
      bool is_misc = ma->section == MemorySection::Misconceptions;
      if (is_misc && ma->tag.empty()) {
        return {false, "schema: misconception append without tag"};
      }
      if (!is_misc && ma->text.empty()) {
        return {false, "schema: empty memory append"};
      }
      if (!ma->allow_evict) {
        std::size_t used =
            ma->section == MemorySection::Trends ? state.memory.trends.size()
            : is_misc ? state.memory.misconceptions.size()
                      : state.memory.insights.size();
        std::size_t cap = static_cast<std::size_t>(
            std::max(state.memory.cap_per_section,
                     agents_config.memory_cap_per_section));
        if (used >= cap) {
          return {false, "caps: memory section full and eviction disallowed"};
        }
      }
    }
  }
  return {true, ""};
}

void Orchestrator::apply_delta(LearnerState& s, const StateDelta& d,
                               Timestamp ts) const {
  if (const auto* md = std::get_if<MasteryDelta>(&d.op)) {
    auto it = s.mastery.find(md->topic);
    if (it == s.mastery.end()) throw TutorError("apply: unknown topic");
    it->second.m = md->after;
    it->second.alpha_count += md->alpha_inc;
    it->second.beta_count += md->beta_inc;
    it->second.last_update = ts;
  } else if (const auto* ri = std::get_if<ReviewItem>(&d.op)) {
    for (auto& r : s.reviews) {
      if (r.item_id == ri->item_id) {
        r = *ri;
        return;
      }
    }
    s.reviews.push_back(*ri);
  } else if (const auto* es = std::get_if<EngagementSetOp>(&d.op)) {
    auto& eng = s.engagement;
    switch (es->field) {
      case EngagementField::StreakDays:
        eng.streak_days = static_cast<int>(es->value);
        break;
      case EngagementField::FailureStreak:
        eng.failure_streak = static_cast<int>(es->value);
        break;
      case EngagementField::LastSeen:
        eng.last_seen = es->value;
        break;
      case EngagementField::ActivityMark: {
        ActivityDay* day = nullptr;
        for (auto& a : eng.activity_window) {
          if (a.date == es->date) day = &a;
        }
        if (!day) {
          eng.activity_window.push_back({es->date, 0, 0});
          day = &eng.activity_window.back();
        }
        day->attempts += static_cast<int>(es->value);
        day->passes += es->passes_inc;
        std::sort(eng.activity_window.begin(), eng.activity_window.end(),
                  [](const ActivityDay& a, const ActivityDay& b) {
                    return a.date < b.date;
                  });
        while (eng.activity_window.size() > 30) {
          eng.activity_window.erase(eng.activity_window.begin());
        }
        break;
      }
    }
  } else if (const auto* ma = std::get_if<MemoryAppendOp>(&d.op)) {
    auto& mem = s.memory;
    std::size_t cap = static_cast<std::size_t>(mem.cap_per_section);
    if (ma->section == MemorySection::Misconceptions) {
      Misconception* found = nullptr;
      for (auto& mc : mem.misconceptions) {
        if (mc.tag == ma->tag) found = &mc;
      }
      if (found) {
        found->evidence_count += 1;
        found->last_seen = ts;
      } else {
        if (mem.misconceptions.size() >= cap) {
          // evict the oldest entry
          auto oldest = std::min_element(
              mem.misconceptions.begin(), mem.misconceptions.end(),
              [](const Misconception& a, const Misconception& b) {
                return a.last_seen < b.last_seen;
              });
          mem.misconceptions.erase(oldest);
        }
        mem.misconceptions.push_back({ma->tag, 1, ts, 0});
      }
      // ranks: evidence desc, ties by recency
      std::stable_sort(mem.misconceptions.begin(), mem.misconceptions.end(),
                       [](const Misconception& a, const Misconception& b) {
                         if (a.evidence_count != b.evidence_count) {
                           return a.evidence_count > b.evidence_count;
                         }
                         return a.last_seen > b.last_seen;
                       });
      for (std::size_t i = 0; i < mem.misconceptions.size(); ++i) {
        mem.misconceptions[i].rank = static_cast<int>(i + 1);
      }
    } else {
      auto& list = ma->section == MemorySection::Trends ? mem.trends
                                                        : mem.insights;
      list.push_back(ma->text);
      while (list.size() > cap) list.erase(list.begin());
    }
  }
}

AuditRecord Orchestrator::commit(const Trigger& trigger,
                                 std::vector<Proposal> accepted,
                                 std::vector<RejectedProposal> rejected,
                                 std::vector<Action> actions) {
  AuditRecord record;
  record.version_before = state_.version;
  record.trigger = trigger;
  record.rejected = std::move(rejected);
  record.actions = std::move(actions);

  LearnerState next = state_;
  try {
    std::size_t index = 0;
    for (const auto& p : accepted) {
      for (const auto& d : p.deltas) {
        if (fault_injector_) fault_injector_(index);
        apply_delta(next, d, trigger.timestamp);
        ++index;
      }
    }
    next.version = state_.version + 1;
    next.updated_at = trigger.timestamp;
    record.accepted = std::move(accepted);
    record.version_after = next.version;
    record.state_digest_after = state_digest(next);
    state_ = std::move(next);  // all-or-nothing: publish only on success
  } catch (const std::exception& e) {
    record.failed = true;
    record.version_after = state_.version;
    record.state_digest_after = state_digest(state_);
    RejectedProposal rp;
    rp.reason = std::string("commit rolled back: ") + e.what();
    record.rejected.push_back(std::move(rp));
  }
  return record;
}

void Orchestrator::note_outputs(const Trigger& trigger,
                                const AuditRecord& record) {
  // derived bookkeeping rebuilt identically during replay
  if (interventions_date_ != trigger.date) {
    interventions_.clear();
    interventions_date_ = trigger.date;
  }
  for (const auto& a : record.actions) {
    if (const auto* rec = std::get_if<RecommendAction>(&a.payload)) {
      for (const auto& slot : rec->set.slots) {
        const ProblemItem* item = bank_.find(slot.item_id);
        selection_history_.push_back(
            {trigger.date, slot.item_id,
             item ? item->topics : std::vector<TopicId>{}});
      }
    } else if (const auto* iv = std::get_if<InterventionAction>(&a.payload)) {
      interventions_.push_back({iv->kind, iv->message, iv->issued_at});
    }
  }
}

AuditRecord Orchestrator::handle(const Trigger& trigger) {
  auto t0 = std::chrono::steady_clock::now();

  std::vector<AgentId> pipeline = route_trigger(trigger.kind);
  std::vector<Proposal> accepted;
  std::vector<RejectedProposal> rejected;
  std::vector<Action> actions;

  if (interventions_date_ != trigger.date) {
    interventions_.clear();
    interventions_date_ = trigger.date;
  }
  AgentContext ctx{state_, bank_, config_, selection_history_, interventions_};

  for (AgentId agent : pipeline) {
    AgentOutput output;
    try {
      output = backend_->evaluate(agent, trigger, ctx);
    } catch (const std::exception& e) {
      // a failed agent is skipped, recorded, and the pipeline continues
      RejectedProposal rp;
      rp.proposal.agent = agent;
      rp.reason = std::string("agent error: ") + e.what();
      rejected.push_back(std::move(rp));
      continue;
    }
    if (output.proposal) {
      ValidationResult v = validate(*output.proposal, state_, bank_, pipeline,
                                    config_.agents);
      if (v.accepted) {
        accepted.push_back(std::move(*output.proposal));
      } else {
        rejected.push_back({std::move(*output.proposal), v.reason});
      }
    }
    for (auto& a : output.actions) actions.push_back(std::move(a));
  }

  AuditRecord record =
      commit(trigger, std::move(accepted), std::move(rejected),
             std::move(actions));
  if (!record.failed) note_outputs(trigger, record);

  auto t1 = std::chrono::steady_clock::now();
  record.wall_time_ms =
      std::chrono::duration<double, std::milli>(t1 - t0).count();
  return record;
}

ReplayResult Orchestrator::replay(LearnerState initial, const ProblemBank& bank,
                                  const AppConfig& config,
                                  std::span<const Trigger> triggers,
                                  std::span<const std::string> expected_digests) {
  if (triggers.size() != expected_digests.size()) {
    throw TutorError("replay: trigger/digest count mismatch");
  }
  Orchestrator orch(std::move(initial), bank, config,
                    make_backend(config.agents));
  for (std::size_t i = 0; i < triggers.size(); ++i) {
    AuditRecord record = orch.handle(triggers[i]);
    if (record.state_digest_after != expected_digests[i]) {
      return {orch.state_,
              ReplayDivergence{record.version_after, expected_digests[i],
                               record.state_digest_after}};
    }
  }
  return {orch.state_, std::nullopt};
}

}  // namespace tutor
