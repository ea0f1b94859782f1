#include "tutor/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "tutor/serialize.hpp"

namespace tutor {
namespace sim {

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  a ^= b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2);
  return a;
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// fixed simulation epoch keeps trajectories wall-clock independent
const Date kEpoch = Date::parse("2025-01-01");

}  // namespace

void Persona::check() const {
  if (learning_rate < 0.0 || learning_rate > 0.2) {
    throw TutorError("persona learning_rate must be in [0, 0.2]");
  }
  if (hint_responsiveness < 0.0 || hint_responsiveness > 1.0) {
    throw TutorError("persona hint_responsiveness must be in [0,1]");
  }
  if (forgetting_tau <= 0.0) {
    throw TutorError("persona forgetting_tau must be positive");
  }
  for (const auto& [topic, s] : skill) {
    if (s < 0.0 || s > 1.0) {
      throw TutorError("persona skill out of [0,1] on " + topic);
    }
  }
}

std::vector<Persona> load_personas(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TutorError("cannot open personas file: " + path);
  nlohmann::json j;
  in >> j;
  std::vector<Persona> out;
  for (const auto& rec : j) {
    Persona p;
    p.persona_id = rec.at("persona_id").get<std::string>();
    for (const auto& [topic, s] : rec.at("skill").items()) {
      p.skill[topic] = s.get<double>();
    }
    p.learning_rate = rec.value("learning_rate", 0.1);
    p.hint_responsiveness = rec.value("hint_responsiveness", 0.5);
    p.forgetting_tau = rec.value("forgetting_tau", 12.0);
    p.seed = rec.value("seed", std::uint64_t{0});
    p.check();
    out.push_back(std::move(p));
  }
  return out;
}

double reward(double delta_m, bool review_success, int h_cnt, double t_solve,
              const RewardConfig& config) {
  return config.w_m * delta_m + config.w_r * (review_success ? 1.0 : 0.0) -
         config.w_h * h_cnt - config.w_t * std::max(0.0, t_solve - config.mu_t);
}

double PersonaRun::retention(double gap_days) const {
  if (gap_days < 0.0) gap_days = 0.0;
  return std::exp(-gap_days / persona.forgetting_tau);
}

double PersonaRun::effective_skill(const TopicId& topic, Date day) const {
  auto it = persona.skill.find(topic);
  double s = it == persona.skill.end() ? 0.0 : it->second;
  auto lp = last_practice.find(topic);
  double gap = lp == last_practice.end()
                   ? static_cast<double>(day.days - kEpoch.days)
                   : static_cast<double>(day.days - lp->second.days);
  return s * (0.5 + 0.5 * retention(gap));
}

Observation persona_attempt(PersonaRun& run, const ProblemItem& item,
                            const std::optional<Hint>& hint, Date day,
                            std::mt19937_64& rng) {
  double eff = 0.0;
  for (const auto& t : item.topics) eff += run.effective_skill(t, day);
  eff /= static_cast<double>(item.topics.size());
  run.last_item_attempt[item.id] = day;

  double boost = 0.0;
  if (hint) {
    boost = (hint->level / 5.0) * 0.8 * run.persona.hint_responsiveness;
  }
  double p_pass = logistic(3.0 * (eff - difficulty_value(item.difficulty)) +
                           boost);

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  bool passed = unif(rng) < p_pass;
  double u = unif(rng);

  Observation obs;
  obs.item_id = item.id;
  obs.passed = passed;
  obs.timestamp = day.to_timestamp() + 8 * 3600;
  obs.hint_count = hint ? 1 : 0;  // caller overwrites with the running count
  obs.solve_time = item.expected_solve_time * (0.6 + 0.8 * u);
  obs.tests_total = std::max<int>(1, static_cast<int>(item.tests.size()));
  if (passed) {
    obs.tests_passed = obs.tests_total;
  } else {
    std::uniform_int_distribution<int> part(0, obs.tests_total - 1);
    obs.tests_passed = part(rng);
    const auto& vocab = error_tag_vocabulary();
    std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
    obs.error_tags.push_back(vocab[pick(rng)]);
  }

  for (const auto& t : item.topics) {
    run.last_practice[t] = day;
    if (passed) {
      double& s = run.persona.skill[t];
      s = clamp01(s + run.persona.learning_rate * (1.0 - s));
    }
  }
  return obs;
}

namespace {

struct Harness {
  const ProblemBank& bank;
  const AppConfig& config;
  TrajectoryLog& log;
  Orchestrator& orch;

  AuditRecord fire(Trigger t) {
    AuditRecord rec = orch.handle(t);
    log.triggers.push_back(std::move(t));
    log.digests.push_back(rec.state_digest_after);
    log.latencies_ms.push_back(rec.wall_time_ms);
    return rec;
  }
};

double accepted_mastery_delta(const AuditRecord& rec) {
  double sum = 0.0;
  for (const auto& p : rec.accepted) {
    for (const auto& d : p.deltas) {
      if (const auto* md = std::get_if<MasteryDelta>(&d.op)) {
        sum += md->after - md->before;
      }
    }
  }
  return sum;
}

}  // namespace

TrajectoryLog run_trajectory(const Persona& persona, int days,
                             const ProblemBank& bank, const AppConfig& config,
                             std::uint64_t seed) {
  if (days < 1) throw TutorError("days must be >= 1");
  persona.check();
  const std::uint64_t base_seed = mix(seed, persona.seed);

  // warmup history so initial mastery reflects persona skill
  std::vector<mastery::TaggedObservation> history;
  {
    std::mt19937_64 rng(mix(base_seed, 0x77617275ull));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    int per_topic = config.simulation.warmup_attempts_per_topic;
    int k = 0;
    for (const auto& topic : bank.topics) {
      double s = persona.skill.count(topic) ? persona.skill.at(topic) : 0.0;
      for (int i = 0; i < per_topic; ++i, ++k) {
        bool passed = unif(rng) < s;
        Observation o;
        o.item_id = "warmup-" + std::to_string(k);
        o.passed = passed;
        o.timestamp = kEpoch.plus(-2).to_timestamp() + k;
        o.tests_total = 1;
        o.tests_passed = passed ? 1 : 0;
        history.push_back({std::move(o), {topic}});
      }
    }
  }

  LearnerState initial;
  initial.learner_id = persona.persona_id;
  initial.mastery =
      mastery::init_mastery(history, bank.topics, config.mastery, base_seed);
  double mean_skill = 0.0;
  for (const auto& [_, s] : persona.skill) mean_skill += s;
  if (!persona.skill.empty()) mean_skill /= persona.skill.size();
  initial.preferences.self_reported_skill = mean_skill;
  initial.preferences.expertise_rank = mean_skill;
  initial.memory.cap_per_section = config.agents.memory_cap_per_section;

  TrajectoryLog log;
  log.persona_id = persona.persona_id;
  log.initial_state = initial;
  log.initial_skill = mean_skill;
  log.mean_mastery_before = initial.mean_mastery();

  Orchestrator orch(initial, bank, config, make_backend(config.agents));
  Harness h{bank, config, log, orch};
  PersonaRun run{persona, {}};
  for (const auto& topic : bank.topics) run.last_practice[topic] = kEpoch.plus(-1);

  std::mt19937_64 choice_rng(mix(base_seed, 0x63686f69ull));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::map<ItemId, int> hints_per_item;  // lifetime count, drives hint levels
  std::set<ItemId> solved_items;

  for (int d = 0; d < days; ++d) {
    const Date today = kEpoch.plus(d);
    const Timestamp ts = today.to_timestamp() + 8 * 3600;

    Trigger session{TriggerKind::OnSessionCheck, ts, today};
    h.fire(session);

    Trigger daily{TriggerKind::OnDailyGeneration, ts, today};
    daily.seed = mix(base_seed, static_cast<std::uint64_t>(d) + 101);
    AuditRecord daily_rec = h.fire(daily);

    const curriculum::DailySet* set = nullptr;
    for (const auto& a : daily_rec.actions) {
      if (const auto* rec = std::get_if<RecommendAction>(&a.payload)) {
        set = &rec->set;
      }
    }
    if (!set) continue;
    for (const auto& slot : set->slots) {
      const ProblemItem* item = bank.find(slot.item_id);
      if (!item) continue;
      log.selections.push_back({today, item->id, item->topics});

      const ReviewItem* review = orch.state().find_review(item->id);
      bool is_review_attempt =
          slot.kind == curriculum::SlotKind::Review && review &&
          review->due_date <= today;
      double predicted_recall = 0.0;
      double review_ef = 0.0;
      int review_interval = 0, review_gap = 0;
      if (is_review_attempt) {
        review_gap = today.days - review->last_review_date().days;
        review_ef = review->ease_factor;
        review_interval = review->interval_days;
        predicted_recall =
            sm2::predict_recall(static_cast<double>(review_gap), review_ef,
                                review_interval, config.scheduler);
      }

      int hint_count = 0;
      std::optional<Hint> hint;
      Observation first_obs, final_obs;
      for (int attempt = 0; attempt < config.simulation.max_attempts_per_item;
           ++attempt) {
        std::mt19937_64 rng(mix(mix(base_seed, fnv1a(item->id)),
                                static_cast<std::uint64_t>(d * 16 + attempt)));
        double m_before = orch.state().mastery.at(item->primary_topic()).m;
        Observation obs = persona_attempt(run, *item, hint, today, rng);
        obs.hint_count = hint_count;
        if (attempt == 0) first_obs = obs;
        final_obs = obs;

        Trigger sub{TriggerKind::OnSubmission, obs.timestamp, today};
        sub.observation = obs;
        AuditRecord sub_rec = h.fire(sub);
        double delta_m = accepted_mastery_delta(sub_rec);

        AttemptRecord ar;
        ar.day = today;
        ar.item_id = item->id;
        ar.primary_topic = item->primary_topic();
        ar.mastery_before = m_before;
        ar.passed = obs.passed;
        ar.hint_count = hint_count;
        ar.is_review = is_review_attempt && attempt == 0;
        ar.prior_solved = solved_items.count(item->id) > 0;
        ar.predicted_recall = predicted_recall;
        ar.review_ef = review_ef;
        ar.review_interval = review_interval;
        ar.review_gap_days = review_gap;
        if (obs.passed) solved_items.insert(item->id);
        ar.delta_m = delta_m;
        ar.reward = reward(delta_m, ar.is_review && obs.passed, hint_count,
                           obs.solve_time, config.reward);
        log.attempts.push_back(ar);

        if (obs.passed) break;
        if (attempt + 1 >= config.simulation.max_attempts_per_item) break;
        if (unif(choice_rng) < persona.hint_responsiveness) {
          Trigger hreq{TriggerKind::OnHintRequest, obs.timestamp, today};
          hreq.item_id = item->id;
          hreq.hint_history = hints_per_item[item->id];
          AuditRecord hrec = h.fire(hreq);
          for (const auto& a : hrec.actions) {
            if (const auto* ha = std::get_if<HintAction>(&a.payload)) {
              hint = Hint{ha->level, ha->tier, ha->text};
              ++hint_count;
              ++hints_per_item[item->id];
            }
          }
        }
      }

      // scheduling always reflects the unaided first attempt, so ease
      // factors track what the learner can recall without help; the
      // day's total hint usage still shortens the interval
      Observation sched_obs = first_obs;
      sched_obs.hint_count = hint_count;
      Trigger due{TriggerKind::OnReviewDue, sched_obs.timestamp, today};
      due.observation = sched_obs;
      h.fire(due);
    }
  }

  log.final_state = orch.state();
  log.mean_mastery_after = log.final_state.mean_mastery();
  return log;
}

TrajectoryMetrics compute_metrics(const std::vector<TrajectoryLog>& logs,
                                  const ProblemBank& bank,
                                  const AppConfig& config) {
  TrajectoryMetrics out;

  std::vector<double> gains;
  for (const auto& log : logs) {
    gains.push_back(log.mean_mastery_after - log.mean_mastery_before);
  }
  if (!gains.empty()) {
    double sum = 0.0;
    for (double g : gains) sum += g;
    out.mean_mastery_gain = sum / gains.size();
  }

  int attempts = 0, passes = 0, hinted = 0, hinted_passes = 0;
  std::vector<metrics::ScoredOutcome> calib, recall_pairs;
  std::vector<double> latencies;
  for (const auto& log : logs) {
    for (const auto& ar : log.attempts) {
      ++attempts;
      if (ar.passed) ++passes;
      if (ar.hint_count > 0) {
        ++hinted;
        if (ar.passed) ++hinted_passes;
      }
      if (ar.hint_count == 0) {
        calib.push_back({ar.mastery_before, ar.passed});
      }
      // recall is only meaningful for material the learner once knew
      if (ar.is_review && ar.prior_solved) {
        recall_pairs.push_back({ar.predicted_recall, ar.passed});
      }
    }
    latencies.insert(latencies.end(), log.latencies_ms.begin(),
                     log.latencies_ms.end());
  }
  if (attempts > 0) {
    out.success_rate_overall = static_cast<double>(passes) / attempts;
  }
  if (hinted > 0) {
    out.success_rate_with_hints = static_cast<double>(hinted_passes) / hinted;
  }
  if (!calib.empty()) {
    out.brier = metrics::brier(calib);
    out.ece = metrics::ece(calib);
  }
  if (!recall_pairs.empty()) out.recall_auroc = metrics::auroc(recall_pairs);
  if (!latencies.empty()) out.median_trigger_latency_ms = metrics::median(latencies);

  std::vector<curriculum::SelectionRecord> all_selections;
  int horizon = 1;
  for (const auto& log : logs) {
    all_selections.insert(all_selections.end(), log.selections.begin(),
                          log.selections.end());
    for (const auto& s : log.selections) {
      horizon = std::max(horizon, s.date.days - kEpoch.days + 1);
    }
  }
  out.coverage =
      curriculum::coverage_report(all_selections, bank.topics, gains, horizon);

  double total_reward = 0.0;
  for (const auto& log : logs) {
    for (const auto& ar : log.attempts) total_reward += ar.reward;
  }
  out.cumulative_reward = total_reward;
  out.recall_probe_auroc =
      recall_probe(10, 300, config.scheduler, config.simulation.seed).auroc;
  return out;
}

RecallProbeResult recall_probe(int cohort_size, int items_per_learner,
                               const SchedulerConfig& config,
                               std::uint64_t seed) {
  RecallProbeResult out;
  std::mt19937_64 rng(mix(seed, 0x7265636cull));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> late(0, 10);
  constexpr int kReviewsBeforeProbe = 3;
  constexpr double kFailShrink = 0.7;

  for (int learner = 0; learner < cohort_size; ++learner) {
    // memory parameters: initial retention time constant and the
    // multiplicative strengthening earned by each successful recall
    double tau0 = 0.8 + 1.2 * unif(rng);
    double gain = 2.0 + 0.4 * unif(rng);
    for (int it = 0; it < items_per_learner; ++it) {
      double ef = sm2::kInitialEaseFactor;
      int interval = 1, n = 0;
      double tau = tau0 * (0.6 + 1.0 * unif(rng));
      for (int k = 0; k <= kReviewsBeforeProbe; ++k) {
        double dt = interval + late(rng);
        bool recalled = unif(rng) < std::exp(-dt / tau);
        if (k == kReviewsBeforeProbe) {
          double score = sm2::predict_recall(dt, ef, interval, config);
          out.pairs.push_back({score, recalled});
          break;
        }
        Quality q;
        if (recalled) {
          q.q = unif(rng) < 0.25 ? 5 : 4;
        } else {
          q.q = unif(rng) < 0.5 ? 2 : 1;
        }
        ef = sm2::update_ease(ef, q);
        interval = sm2::next_interval(n, interval, ef);
        ++n;
        if (sm2::predict_recall(interval, ef, interval, config) <
            config.recall_min) {
          double t = sm2::recall_tau(ef, interval, config);
          interval = std::max(
              1, static_cast<int>(std::floor(-t * std::log(config.recall_min))));
        }
        tau = recalled ? tau * gain : std::max(tau0, tau * kFailShrink);
      }
    }
  }
  out.auroc = metrics::auroc(out.pairs);
  out.brier = metrics::brier(out.pairs);
  out.ece = metrics::ece(out.pairs);
  return out;
}

SimulationOutput run_simulation(const std::vector<Persona>& personas, int days,
                                const ProblemBank& bank,
                                const AppConfig& config, std::uint64_t seed) {
  SimulationOutput out;
  for (const auto& p : personas) {
    out.logs.push_back(run_trajectory(p, days, bank, config, seed));
  }
  out.metrics = compute_metrics(out.logs, bank, config);
  return out;
}

void write_reports(const SimulationOutput& out, const ProblemBank& bank,
                   const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const auto& m = out.metrics;

  nlohmann::json j;
  j["mean_mastery_gain_abs_points"] = m.mean_mastery_gain;
  j["success_rate_overall"] = m.success_rate_overall;
  if (m.success_rate_with_hints) {
    j["success_rate_with_hints"] = *m.success_rate_with_hints;
  }
  j["coverage"] = m.coverage.coverage;
  j["diversity"] = m.coverage.diversity;
  if (m.coverage.fairness_defined) {
    j["fairness_iqr_ratio"] = m.coverage.fairness_iqr_ratio;
  }
  if (m.brier) j["brier"] = *m.brier;
  if (m.ece) j["ece"] = *m.ece;
  if (m.recall_auroc) j["recall_auroc_observed"] = *m.recall_auroc;
  j["recall_probe_auroc"] = m.recall_probe_auroc;
  j["median_trigger_latency_ms"] = m.median_trigger_latency_ms;
  j["cumulative_reward"] = m.cumulative_reward;
  {
    std::ofstream f(fs::path(out_dir) / "metrics.json");
    f << j.dump(2) << "\n";
  }
  {
    std::ofstream f(fs::path(out_dir) / "metrics.csv");
    f << "metric,value\n";
    for (const auto& [k, v] : j.items()) f << k << "," << v.dump() << "\n";
  }
  {
    std::ofstream f(fs::path(out_dir) / "gains_by_initial_skill.csv");
    f << "persona_id,initial_skill,skill_band,mastery_gain\n";
    for (const auto& log : out.logs) {
      const char* band = log.initial_skill < 0.35   ? "beginner"
                         : log.initial_skill <= 0.65 ? "intermediate"
                                                     : "advanced";
      f << log.persona_id << "," << log.initial_skill << "," << band << ","
        << (log.mean_mastery_after - log.mean_mastery_before) << "\n";
    }
  }
  {
    std::ofstream f(fs::path(out_dir) / "hint_effectiveness.csv");
    f << "group,success_rate\n";
    f << "overall," << m.success_rate_overall << "\n";
    if (m.success_rate_with_hints) {
      f << "with_hints," << *m.success_rate_with_hints << "\n";
    }
  }
  {
    std::map<TopicId, int> counts;
    for (const auto& log : out.logs) {
      for (const auto& s : log.selections) {
        for (const auto& t : s.topics) counts[t]++;
      }
    }
    std::ofstream f(fs::path(out_dir) / "topic_distribution.csv");
    f << "topic,selections\n";
    for (const auto& [t, c] : counts) f << t << "," << c << "\n";
  }
  (void)bank;
}

}  // namespace sim
}  // namespace tutor
