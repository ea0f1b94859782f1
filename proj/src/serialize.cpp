#include "tutor/serialize.hpp"

#include "tutor/canonical_json.hpp"

namespace tutor {

using nlohmann::json;

json to_json(const ReviewItem& r) {
  json j;
  j["item_id"] = r.item_id;
  j["topics"] = r.topics;
  j["due_date"] = r.due_date.to_string();
  j["interval_days"] = r.interval_days;
  j["ease_factor"] = r.ease_factor;
  j["n_reviews"] = r.n_reviews;
  return j;
}

ReviewItem review_item_from_json(const json& j) {
  ReviewItem r;
  r.item_id = j.at("item_id").get<std::string>();
  for (const auto& t : j.at("topics")) r.topics.insert(t.get<std::string>());
  r.due_date = Date::parse(j.at("due_date"));
  r.interval_days = j.at("interval_days").get<int>();
  r.ease_factor = j.at("ease_factor").get<double>();
  r.n_reviews = j.at("n_reviews").get<int>();
  return r;
}

json to_json(const LearnerState& s) {
  json j;
  j["learner_id"] = s.learner_id;
  json mastery = json::object();
  for (const auto& [topic, tm] : s.mastery) {
    json t;
    t["m"] = tm.m;
    t["alpha_count"] = tm.alpha_count;
    t["beta_count"] = tm.beta_count;
    t["last_update"] = tm.last_update;
    mastery[topic] = std::move(t);
  }
  j["mastery"] = std::move(mastery);
  json reviews = json::array();
  for (const auto& r : s.reviews) reviews.push_back(to_json(r));
  j["reviews"] = std::move(reviews);

  json eng;
  eng["streak_days"] = s.engagement.streak_days;
  eng["last_seen"] = s.engagement.last_seen;
  eng["failure_streak"] = s.engagement.failure_streak;
  json window = json::array();
  for (const auto& d : s.engagement.activity_window) {
    window.push_back({{"date", d.date.to_string()},
                      {"attempts", d.attempts},
                      {"passes", d.passes}});
  }
  eng["activity_window"] = std::move(window);
  j["engagement"] = std::move(eng);

  json prefs;
  prefs["self_reported_skill"] = s.preferences.self_reported_skill;
  prefs["expertise_rank"] = s.preferences.expertise_rank;
  prefs["daily_time_budget"] = s.preferences.daily_time_budget;
  prefs["modality"] = s.preferences.modality;
  prefs["opt_outs"] = s.preferences.opt_outs;
  j["preferences"] = std::move(prefs);

  json mem;
  mem["trends"] = s.memory.trends;
  json misc = json::array();
  for (const auto& mc : s.memory.misconceptions) {
    misc.push_back({{"tag", mc.tag},
                    {"evidence_count", mc.evidence_count},
                    {"last_seen", mc.last_seen},
                    {"rank", mc.rank}});
  }
  mem["misconceptions"] = std::move(misc);
  mem["insights"] = s.memory.insights;
  mem["cap_per_section"] = s.memory.cap_per_section;
  j["memory"] = std::move(mem);

  j["version"] = s.version;
  j["updated_at"] = s.updated_at;
  return j;
}

LearnerState state_from_json(const json& j) {
  LearnerState s;
  s.learner_id = j.at("learner_id").get<std::string>();
  for (const auto& [topic, t] : j.at("mastery").items()) {
    TopicMastery tm;
    tm.topic_id = topic;
    tm.m = t.at("m").get<double>();
    tm.alpha_count = t.at("alpha_count").get<double>();
    tm.beta_count = t.at("beta_count").get<double>();
    tm.last_update = t.at("last_update").get<Timestamp>();
    s.mastery.emplace(topic, std::move(tm));
  }
  for (const auto& r : j.at("reviews")) s.reviews.push_back(review_item_from_json(r));

  const auto& eng = j.at("engagement");
  s.engagement.streak_days = eng.at("streak_days").get<int>();
  s.engagement.last_seen = eng.at("last_seen").get<Timestamp>();
  s.engagement.failure_streak = eng.at("failure_streak").get<int>();
  for (const auto& d : eng.at("activity_window")) {
    s.engagement.activity_window.push_back({Date::parse(d.at("date")),
                                            d.at("attempts").get<int>(),
                                            d.at("passes").get<int>()});
  }

  const auto& prefs = j.at("preferences");
  s.preferences.self_reported_skill = prefs.at("self_reported_skill").get<double>();
  s.preferences.expertise_rank = prefs.at("expertise_rank").get<double>();
  s.preferences.daily_time_budget = prefs.at("daily_time_budget").get<int>();
  s.preferences.modality = prefs.at("modality").get<std::string>();
  for (const auto& o : prefs.at("opt_outs")) {
    s.preferences.opt_outs.insert(o.get<std::string>());
  }

  const auto& mem = j.at("memory");
  s.memory.trends = mem.at("trends").get<std::vector<std::string>>();
  for (const auto& mc : mem.at("misconceptions")) {
    s.memory.misconceptions.push_back({mc.at("tag").get<std::string>(),
                                       mc.at("evidence_count").get<int>(),
                                       mc.at("last_seen").get<Timestamp>(),
                                       mc.at("rank").get<int>()});
  }
  s.memory.insights = mem.at("insights").get<std::vector<std::string>>();
  s.memory.cap_per_section = mem.at("cap_per_section").get<int>();

  s.version = j.at("version").get<std::uint64_t>();
  s.updated_at = j.at("updated_at").get<Timestamp>();
  return s;
}

json to_json(const Observation& o) {
  json j;
  j["item_id"] = o.item_id;
  j["passed"] = o.passed;
  j["timestamp"] = o.timestamp;
  j["hint_count"] = o.hint_count;
  j["error_tags"] = o.error_tags;
  j["solve_time"] = o.solve_time;
  j["tests_passed"] = o.tests_passed;
  j["tests_total"] = o.tests_total;
  j["abandoned"] = o.abandoned;
  return j;
}

Observation observation_from_json(const json& j) {
  Observation o;
  o.item_id = j.at("item_id").get<std::string>();
  o.passed = j.at("passed").get<bool>();
  o.timestamp = j.at("timestamp").get<Timestamp>();
  o.hint_count = j.at("hint_count").get<int>();
  o.error_tags = j.at("error_tags").get<std::vector<std::string>>();
  o.solve_time = j.at("solve_time").get<double>();
  o.tests_passed = j.at("tests_passed").get<int>();
  o.tests_total = j.at("tests_total").get<int>();
  o.abandoned = j.value("abandoned", false);
  return o;
}

const char* to_string(TriggerKind k) {
  switch (k) {
    case TriggerKind::OnSubmission: return "on_submission";
    case TriggerKind::OnHintRequest: return "on_hint_request";
    case TriggerKind::OnSessionCheck: return "on_session_check";
    case TriggerKind::OnDailyGeneration: return "on_daily_generation";
    case TriggerKind::OnReviewDue: return "on_review_due";
  }
  return "on_session_check";
}

TriggerKind trigger_kind_from_string(const std::string& s) {
  if (s == "on_submission") return TriggerKind::OnSubmission;
  if (s == "on_hint_request") return TriggerKind::OnHintRequest;
  if (s == "on_session_check") return TriggerKind::OnSessionCheck;
  if (s == "on_daily_generation") return TriggerKind::OnDailyGeneration;
  if (s == "on_review_due") return TriggerKind::OnReviewDue;
  throw TutorError("unknown trigger kind: " + s);
}

const char* to_string(AgentId a) {
  switch (a) {
    case AgentId::SkillAssessment: return "skill_assessment";
    case AgentId::Profiler: return "profiler";
    case AgentId::Feedback: return "feedback";
    case AgentId::Curator: return "curator";
    case AgentId::ProgressSynthesizer: return "progress_synthesizer";
    case AgentId::Engagement: return "engagement";
  }
  return "profiler";
}

const char* to_string(EngagementField f) {
  switch (f) {
    case EngagementField::StreakDays: return "streak_days";
    case EngagementField::FailureStreak: return "failure_streak";
    case EngagementField::LastSeen: return "last_seen";
    case EngagementField::ActivityMark: return "activity_mark";
  }
  return "streak_days";
}

const char* to_string(MemorySection s) {
  switch (s) {
    case MemorySection::Trends: return "trends";
    case MemorySection::Misconceptions: return "misconceptions";
    case MemorySection::Insights: return "insights";
  }
  return "trends";
}

namespace {

AgentId agent_from_string(const std::string& s) {
  for (AgentId a : {AgentId::SkillAssessment, AgentId::Profiler,
                    AgentId::Feedback, AgentId::Curator,
                    AgentId::ProgressSynthesizer, AgentId::Engagement}) {
    if (s == to_string(a)) return a;
  }
  throw TutorError("unknown agent id: " + s);
}

EngagementField engagement_field_from_string(const std::string& s) {
  for (EngagementField f :
       {EngagementField::StreakDays, EngagementField::FailureStreak,
        EngagementField::LastSeen, EngagementField::ActivityMark}) {
    if (s == to_string(f)) return f;
  }
  throw TutorError("unknown engagement field: " + s);
}

MemorySection memory_section_from_string(const std::string& s) {
  for (MemorySection m : {MemorySection::Trends, MemorySection::Misconceptions,
                          MemorySection::Insights}) {
    if (s == to_string(m)) return m;
  }
  throw TutorError("unknown memory section: " + s);
}

}  // namespace

json to_json(const Trigger& t) {
  json j;
  j["kind"] = to_string(t.kind);
  j["timestamp"] = t.timestamp;
  j["date"] = t.date.to_string();
  if (t.observation) j["observation"] = to_json(*t.observation);
  if (t.item_id) j["item_id"] = *t.item_id;
  j["hint_history"] = t.hint_history;
  j["seed"] = t.seed;
  return j;
}

Trigger trigger_from_json(const json& j) {
  Trigger t;
  t.kind = trigger_kind_from_string(j.at("kind"));
  t.timestamp = j.at("timestamp").get<Timestamp>();
  t.date = Date::parse(j.at("date"));
  if (j.contains("observation")) {
    t.observation = observation_from_json(j["observation"]);
  }
  if (j.contains("item_id")) t.item_id = j["item_id"].get<std::string>();
  t.hint_history = j.value("hint_history", 0);
  t.seed = j.value("seed", std::uint64_t{0});
  return t;
}

json to_json(const StateDelta& d) {
  json j;
  if (const auto* md = std::get_if<MasteryDelta>(&d.op)) {
    j["kind"] = "mastery_delta";
    j["topic"] = md->topic;
    j["before"] = md->before;
    j["after"] = md->after;
    j["alpha_inc"] = md->alpha_inc;
    j["beta_inc"] = md->beta_inc;
    j["rationale"] = md->rationale;
  } else if (const auto* ri = std::get_if<ReviewItem>(&d.op)) {
    j["kind"] = "review_upsert";
    j["item"] = to_json(*ri);
  } else if (const auto* es = std::get_if<EngagementSetOp>(&d.op)) {
    j["kind"] = "engagement_set";
    j["field"] = to_string(es->field);
    j["value"] = es->value;
    j["date"] = es->date.to_string();
    j["passes_inc"] = es->passes_inc;
  } else if (const auto* ma = std::get_if<MemoryAppendOp>(&d.op)) {
    j["kind"] = "memory_append";
    j["section"] = to_string(ma->section);
    j["text"] = ma->text;
    j["tag"] = ma->tag;
    j["allow_evict"] = ma->allow_evict;
  }
  return j;
}

StateDelta delta_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "mastery_delta") {
    MasteryDelta md;
    md.topic = j.at("topic").get<std::string>();
    md.before = j.at("before").get<double>();
    md.after = j.at("after").get<double>();
    md.alpha_inc = j.at("alpha_inc").get<double>();
    md.beta_inc = j.at("beta_inc").get<double>();
    md.rationale = j.value("rationale", "");
    return {md};
  }
  if (kind == "review_upsert") return {review_item_from_json(j.at("item"))};
  if (kind == "engagement_set") {
    EngagementSetOp es;
    es.field = engagement_field_from_string(j.at("field"));
    es.value = j.at("value").get<std::int64_t>();
    es.date = Date::parse(j.at("date"));
    es.passes_inc = j.value("passes_inc", 0);
    return {es};
  }
  if (kind == "memory_append") {
    MemoryAppendOp ma;
    ma.section = memory_section_from_string(j.at("section"));
    ma.text = j.value("text", "");
    ma.tag = j.value("tag", "");
    ma.allow_evict = j.value("allow_evict", true);
    return {ma};
  }
  throw TutorError("unknown delta kind: " + kind);
}

json to_json(const Proposal& p) {
  json j;
  j["agent"] = to_string(p.agent);
  json deltas = json::array();
  for (const auto& d : p.deltas) deltas.push_back(to_json(d));
  j["deltas"] = std::move(deltas);
  j["rationale"] = p.rationale;
  return j;
}

Proposal proposal_from_json(const json& j) {
  Proposal p;
  p.agent = agent_from_string(j.at("agent"));
  for (const auto& d : j.at("deltas")) p.deltas.push_back(delta_from_json(d));
  p.rationale = j.value("rationale", "");
  return p;
}

json to_json(const Action& a) {
  json j;
  if (const auto* h = std::get_if<HintAction>(&a.payload)) {
    j["kind"] = "hint";
    j["item_id"] = h->item_id;
    j["level"] = h->level;
    j["tier"] = to_string(h->tier);
    j["text"] = h->text;
  } else if (const auto* r = std::get_if<RecommendAction>(&a.payload)) {
    j["kind"] = "recommend";
    json slots = json::array();
    for (const auto& s : r->set.slots) {
      slots.push_back({{"item_id", s.item_id},
                       {"slot", curriculum::to_string(s.kind)}});
    }
    j["slots"] = std::move(slots);
    j["shortfall"] = r->set.shortfall;
  } else if (const auto* i = std::get_if<InterventionAction>(&a.payload)) {
    j["kind"] = "intervene";
    j["intervention"] = i->kind;
    j["message"] = i->message;
    j["issued_at"] = i->issued_at;
  } else if (const auto* f = std::get_if<FeedbackAction>(&a.payload)) {
    j["kind"] = "feedback";
    j["verdict"] = f->verdict_pass ? "pass" : "fail";
    j["failing_tests"] = f->failing_tests;
    j["suggestions"] = f->suggestions;
    j["detail_level"] = f->detail_level;
  } else if (const auto* s = std::get_if<ScheduleAction>(&a.payload)) {
    j["kind"] = "adjust_schedule";
    j["item_id"] = s->item_id;
    j["new_due"] = s->new_due.to_string();
    j["reason"] = s->reason;
  }
  return j;
}

json to_json(const AuditRecord& r) {
  json j;
  j["version_before"] = r.version_before;
  j["version_after"] = r.version_after;
  j["trigger"] = to_json(r.trigger);
  json accepted = json::array();
  for (const auto& p : r.accepted) accepted.push_back(to_json(p));
  j["accepted"] = std::move(accepted);
  json rejected = json::array();
  for (const auto& rp : r.rejected) {
    json e = to_json(rp.proposal);
    e["reason"] = rp.reason;
    rejected.push_back(std::move(e));
  }
  j["rejected"] = std::move(rejected);
  json actions = json::array();
  for (const auto& a : r.actions) actions.push_back(to_json(a));
  j["actions"] = std::move(actions);
  j["state_digest_after"] = r.state_digest_after;
  j["wall_time_ms"] = r.wall_time_ms;
  j["failed"] = r.failed;
  return j;
}

std::string state_digest(const LearnerState& s) {
  return canonical_digest(to_json(s));
}

}  // namespace tutor
