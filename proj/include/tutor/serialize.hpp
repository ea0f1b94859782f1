#pragma once

// JSON (de)serialization for state, triggers, deltas, and audit records.

#include "json.hpp"
#include "tutor/agents.hpp"
#include "tutor/learner_state.hpp"
#include "tutor/proposal.hpp"
#include "tutor/scheduler.hpp"
#include "tutor/types.hpp"

namespace tutor {

nlohmann::json to_json(const ReviewItem&);
ReviewItem review_item_from_json(const nlohmann::json&);

nlohmann::json to_json(const LearnerState&);
LearnerState state_from_json(const nlohmann::json&);

nlohmann::json to_json(const Observation&);
Observation observation_from_json(const nlohmann::json&);

nlohmann::json to_json(const Trigger&);
Trigger trigger_from_json(const nlohmann::json&);

nlohmann::json to_json(const StateDelta&);
StateDelta delta_from_json(const nlohmann::json&);

nlohmann::json to_json(const Proposal&);
Proposal proposal_from_json(const nlohmann::json&);

nlohmann::json to_json(const Action&);

nlohmann::json to_json(const AuditRecord&);

std::string state_digest(const LearnerState&);

}  // namespace tutor
