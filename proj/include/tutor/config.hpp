#pragma once

// All tunable constants, grouped per subsystem, JSON-overridable.

#include <map>
#include <string>

#include "tutor/types.hpp"

namespace tutor {

struct MasteryConfig {
  double learn_rate_alpha = 0.2;
  double forget_rate_beta = 0.2;
  std::map<Difficulty, double> difficulty_weights = {
      {Difficulty::Easy, 0.8}, {Difficulty::Medium, 1.0}, {Difficulty::Hard, 1.2}};
  double recency_tau = 14.0;        // days
  double hint_penalty_eta_h = 0.02; // per hint
  double time_penalty_eta_t = 0.0001;  // per second over expectation
  double momentum_lambda = 0.7;     // in (0,1]
  double init_noise_sigma0 = 0.05;

  void check() const;
};

struct ProficiencyWeights {
  double w_mastery_avg = 0.40;
  double w_expertise_rank = 0.25;
  double w_self_reported = 0.20;
  double w_recent_success = 0.10;
  double w_streak_norm = 0.05;

  double sum() const {
    return w_mastery_avg + w_expertise_rank + w_self_reported +
           w_recent_success + w_streak_norm;
  }
  void check() const;
};

struct SchedulerConfig {
  int hint_threshold = 2;
  double shorten_factor = 0.7;
  double lengthen_factor = 1.2;
  double fast_fraction = 0.5;
  double recall_min = 0.6;
  double tau_scale_c = 1.0;
  int daily_cap = 20;

  void check() const;
};

struct CurriculumConfig {
  double ratio_review = 0.4;
  double ratio_growth = 0.5;
  double ratio_challenge = 0.1;
  double growth_low = 0.3;
  double growth_high = 0.7;
  int repetition_window_k = 7;     // days
  double prereq_mastery_min = 0.3;
  double max_topic_share = 0.4;    // fraction of the daily set
  int daily_set_size = 10;

  void check() const;
};

struct RewardConfig {
  double w_m = 1.0;
  double w_r = 0.5;
  double w_h = 0.01;
  double w_t = 0.0001;
  double mu_t = 300.0;  // seconds
};

struct AgentsConfig {
  std::string backend = "deterministic";  // or "replay"
  std::string replay_fixture;             // proposals file for the replay backend
  int inactivity_days = 3;
  int failure_streak_threshold = 3;
  int memory_cap_per_section = 20;
};

struct SimulationConfig {
  int days = 30;
  std::uint64_t seed = 42;
  int max_attempts_per_item = 4;
  int warmup_attempts_per_topic = 6;
};

struct AppConfig {
  MasteryConfig mastery;
  ProficiencyWeights proficiency;
  SchedulerConfig scheduler;
  CurriculumConfig curriculum;
  RewardConfig reward;
  AgentsConfig agents;
  SimulationConfig simulation;

  void check() const;
  static AppConfig load(const std::string& path);  // missing keys keep defaults
  void save(const std::string& path) const;
};

}  // namespace tutor
