#pragma once

// StateGraph Orchestrator: trigger routing, proposal validation, atomic
// versioned commits under a single-writer policy, audit trail, replay.
// This is the only module that mutates LearnerState.

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tutor/agents.hpp"
#include "tutor/config.hpp"
#include "tutor/curriculum.hpp"
#include "tutor/proposal.hpp"
#include "tutor/types.hpp"

namespace tutor {

struct ValidationResult {
  bool accepted = true;
  std::string reason;
};

struct ReplayDivergence {
  std::uint64_t version = 0;
  std::string expected_digest;
  std::string actual_digest;
};

struct ReplayResult {
  LearnerState state;
  std::optional<ReplayDivergence> divergence;
  bool ok() const { return !divergence.has_value(); }
};

class Orchestrator {
 public:
  Orchestrator(LearnerState initial, ProblemBank bank, AppConfig config,
               std::unique_ptr<AgentBackend> backend);

  const LearnerState& state() const { return state_; }
  const ProblemBank& bank() const { return bank_; }
  const AppConfig& config() const { return config_; }
  const std::vector<curriculum::SelectionRecord>& selection_history() const {
    return selection_history_;
  }

  static std::vector<AgentId> route_trigger(TriggerKind kind);

  static ValidationResult validate(const Proposal& p, const LearnerState& state,
                                   const ProblemBank& bank,
                                   std::span<const AgentId> pipeline,
                                   const AgentsConfig& agents_config);

  // Routes, evaluates the pipeline, validates, commits atomically.
  // Every trigger yields exactly one AuditRecord (version always +1 on
  // success; failed commits roll back and are flagged in the record).
  AuditRecord handle(const Trigger& trigger);

  // Re-executes a trigger log against `initial`, checking each digest.
  static ReplayResult replay(LearnerState initial, const ProblemBank& bank,
                             const AppConfig& config,
                             std::span<const Trigger> triggers,
                             std::span<const std::string> expected_digests);

  // Test hook: invoked before applying the nth delta of a commit.
  void set_fault_injector(std::function<void(std::size_t delta_index)> f) {
    fault_injector_ = std::move(f);
  }

 private:
  friend struct CommitAccess;

  void apply_delta(LearnerState& s, const StateDelta& d, Timestamp ts) const;
  AuditRecord commit(const Trigger& trigger, std::vector<Proposal> accepted,
                     std::vector<RejectedProposal> rejected,
                     std::vector<Action> actions);
  void note_outputs(const Trigger& trigger, const AuditRecord& record);

  LearnerState state_;
  ProblemBank bank_;
  AppConfig config_;
  std::unique_ptr<AgentBackend> backend_;
  std::vector<curriculum::SelectionRecord> selection_history_;
  std::vector<Intervention> interventions_;  // today's, pruned per date
  Date interventions_date_;
  std::function<void(std::size_t)> fault_injector_;
};

}  // namespace tutor
