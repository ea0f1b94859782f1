#pragma once

// Simulated-learner personas, trajectory runner, reward, and the metric
// suite used for validation runs.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tutor/agents.hpp"
#include "tutor/config.hpp"
#include "tutor/curriculum.hpp"
#include "tutor/metrics.hpp"
#include "tutor/orchestrator.hpp"
#include "tutor/types.hpp"

namespace tutor {
namespace sim {

struct Persona {
  std::string persona_id;
  std::map<TopicId, double> skill;  // [0,1]
  double learning_rate = 0.1;       // <= 0.2
  double hint_responsiveness = 0.5; // [0,1]
  double forgetting_tau = 12.0;     // days
  std::uint64_t seed = 0;

  void check() const;
};

std::vector<Persona> load_personas(const std::string& path);

struct RewardConfigRef;  // RewardConfig lives in config.hpp

double reward(double delta_m, bool review_success, int h_cnt, double t_solve,
              const RewardConfig& config);

// Mutable per-run persona state (skill drifts as the persona learns).
struct PersonaRun {
  Persona persona;
  std::map<TopicId, Date> last_practice;
  // re-attempts decay with the item-level gap, mirroring what a review
  // schedule actually measures
  std::map<ItemId, Date> last_item_attempt;

  double effective_skill(const TopicId& topic, Date day) const;
  double retention(double gap_days) const;
};

Observation persona_attempt(PersonaRun& run, const ProblemItem& item,
                            const std::optional<Hint>& hint, Date day,
                            std::mt19937_64& rng);

struct AttemptRecord {
  Date day;
  ItemId item_id;
  TopicId primary_topic;
  double mastery_before = 0.0;   // predictor for calibration
  bool passed = false;
  int hint_count = 0;
  bool is_review = false;
  bool prior_solved = false;     // persona had solved this item before
  double predicted_recall = 0.0; // review attempts only
  double review_ef = 0.0;        // schedule snapshot at the attempt
  int review_interval = 0;
  int review_gap_days = 0;
  double delta_m = 0.0;          // summed over topics
  double reward = 0.0;
};

struct TrajectoryMetrics {
  double mean_mastery_gain = 0.0;
  double success_rate_overall = 0.0;
  std::optional<double> success_rate_with_hints;
  curriculum::CoverageReport coverage;
  std::optional<double> brier;
  std::optional<double> ece;
  std::optional<double> recall_auroc;
  double recall_probe_auroc = 0.0;  // see recall_probe below
  double median_trigger_latency_ms = 0.0;
  double cumulative_reward = 0.0;
};

struct TrajectoryLog {
  std::string persona_id;
  std::vector<Trigger> triggers;
  std::vector<std::string> digests;  // per committed trigger
  std::vector<AttemptRecord> attempts;
  std::vector<curriculum::SelectionRecord> selections;
  std::vector<double> latencies_ms;
  double mean_mastery_before = 0.0;
  double mean_mastery_after = 0.0;
  double initial_skill = 0.0;  // persona mean skill, for reporting buckets
  LearnerState initial_state;
  LearnerState final_state;
};

TrajectoryLog run_trajectory(const Persona& persona, int days,
                             const ProblemBank& bank, const AppConfig& config,
                             std::uint64_t seed);

TrajectoryMetrics compute_metrics(const std::vector<TrajectoryLog>& logs,
                                  const ProblemBank& bank,
                                  const AppConfig& config);

struct SimulationOutput {
  std::vector<TrajectoryLog> logs;
  TrajectoryMetrics metrics;
};

// Scheduler/memory self-consistency probe. Simulates review episodes in
// which item memory strengthens multiplicatively on each successful
// recall (spacing effect) and decays exponentially between reviews, then
// scores predict_recall against the sampled outcomes. This isolates the
// recall model from curriculum difficulty matching, which pins live
// success rates near 50% and washes out ranking signal.
struct RecallProbeResult {
  std::vector<metrics::ScoredOutcome> pairs;
  double auroc = 0.0;
  double brier = 0.0;
  double ece = 0.0;
};

RecallProbeResult recall_probe(int cohort_size, int items_per_learner,
                               const SchedulerConfig& config,
                               std::uint64_t seed);

SimulationOutput run_simulation(const std::vector<Persona>& personas, int days,
                                const ProblemBank& bank,
                                const AppConfig& config, std::uint64_t seed);

// metrics JSON + CSV, plus per-figure CSVs (gains by initial skill,
// hint effectiveness, topic distribution).
void write_reports(const SimulationOutput& out, const ProblemBank& bank,
                   const std::string& out_dir);

}  // namespace sim
}  // namespace tutor
