#include "tutor/config.hpp"

#include <fstream>

#include "json.hpp"

namespace tutor {

using nlohmann::json;

void AppConfig::check() const {
  mastery.check();
  proficiency.check();
  scheduler.check();
  curriculum.check();
}

namespace {

template <typename T>
void get_if_present(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

AppConfig AppConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TutorError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw TutorError("config parse error: " + std::string(e.what()));
  }

  AppConfig cfg;
  if (j.contains("mastery")) {
    const auto& m = j["mastery"];
    get_if_present(m, "learn_rate_alpha", cfg.mastery.learn_rate_alpha);
    get_if_present(m, "forget_rate_beta", cfg.mastery.forget_rate_beta);
    get_if_present(m, "recency_tau", cfg.mastery.recency_tau);
    get_if_present(m, "hint_penalty_eta_h", cfg.mastery.hint_penalty_eta_h);
    get_if_present(m, "time_penalty_eta_t", cfg.mastery.time_penalty_eta_t);
    get_if_present(m, "momentum_lambda", cfg.mastery.momentum_lambda);
    get_if_present(m, "init_noise_sigma0", cfg.mastery.init_noise_sigma0);
    if (m.contains("difficulty_weights")) {
      for (const auto& [k, v] : m["difficulty_weights"].items()) {
        cfg.mastery.difficulty_weights[difficulty_from_string(k)] =
            v.get<double>();
      }
    }
  }
  if (j.contains("proficiency")) {
    const auto& p = j["proficiency"];
    get_if_present(p, "w_mastery_avg", cfg.proficiency.w_mastery_avg);
    get_if_present(p, "w_expertise_rank", cfg.proficiency.w_expertise_rank);
    get_if_present(p, "w_self_reported", cfg.proficiency.w_self_reported);
    get_if_present(p, "w_recent_success", cfg.proficiency.w_recent_success);
    get_if_present(p, "w_streak_norm", cfg.proficiency.w_streak_norm);
  }
  if (j.contains("scheduler")) {
    const auto& s = j["scheduler"];
    get_if_present(s, "hint_threshold", cfg.scheduler.hint_threshold);
    get_if_present(s, "shorten_factor", cfg.scheduler.shorten_factor);
    get_if_present(s, "lengthen_factor", cfg.scheduler.lengthen_factor);
    get_if_present(s, "fast_fraction", cfg.scheduler.fast_fraction);
    get_if_present(s, "recall_min", cfg.scheduler.recall_min);
    get_if_present(s, "tau_scale_c", cfg.scheduler.tau_scale_c);
    get_if_present(s, "daily_cap", cfg.scheduler.daily_cap);
  }
  if (j.contains("curriculum")) {
    const auto& c = j["curriculum"];
    get_if_present(c, "ratio_review", cfg.curriculum.ratio_review);
    get_if_present(c, "ratio_growth", cfg.curriculum.ratio_growth);
    get_if_present(c, "ratio_challenge", cfg.curriculum.ratio_challenge);
    get_if_present(c, "growth_low", cfg.curriculum.growth_low);
    get_if_present(c, "growth_high", cfg.curriculum.growth_high);
    get_if_present(c, "repetition_window_k", cfg.curriculum.repetition_window_k);
    get_if_present(c, "prereq_mastery_min", cfg.curriculum.prereq_mastery_min);
    get_if_present(c, "max_topic_share", cfg.curriculum.max_topic_share);
    get_if_present(c, "daily_set_size", cfg.curriculum.daily_set_size);
  }
  if (j.contains("reward")) {
    const auto& r = j["reward"];
    get_if_present(r, "w_m", cfg.reward.w_m);
    get_if_present(r, "w_r", cfg.reward.w_r);
    get_if_present(r, "w_h", cfg.reward.w_h);
    get_if_present(r, "w_t", cfg.reward.w_t);
    get_if_present(r, "mu_t", cfg.reward.mu_t);
  }
  if (j.contains("agents")) {
    const auto& a = j["agents"];
    get_if_present(a, "backend", cfg.agents.backend);
    get_if_present(a, "replay_fixture", cfg.agents.replay_fixture);
    get_if_present(a, "inactivity_days", cfg.agents.inactivity_days);
    get_if_present(a, "failure_streak_threshold",
                   cfg.agents.failure_streak_threshold);
    get_if_present(a, "memory_cap_per_section",
                   cfg.agents.memory_cap_per_section);
  }
  if (j.contains("simulation")) {
    const auto& s = j["simulation"];
    get_if_present(s, "days", cfg.simulation.days);
    get_if_present(s, "seed", cfg.simulation.seed);
    get_if_present(s, "max_attempts_per_item",
                   cfg.simulation.max_attempts_per_item);
    get_if_present(s, "warmup_attempts_per_topic",
                   cfg.simulation.warmup_attempts_per_topic);
  }
  cfg.check();
  return cfg;
}

void AppConfig::save(const std::string& path) const {
  json j;
  j["mastery"] = {
      {"learn_rate_alpha", mastery.learn_rate_alpha},
      {"forget_rate_beta", mastery.forget_rate_beta},
      {"recency_tau", mastery.recency_tau},
      {"hint_penalty_eta_h", mastery.hint_penalty_eta_h},
      {"time_penalty_eta_t", mastery.time_penalty_eta_t},
      {"momentum_lambda", mastery.momentum_lambda},
      {"init_noise_sigma0", mastery.init_noise_sigma0},
      {"difficulty_weights",
       {{"Easy", mastery.difficulty_weights.at(Difficulty::Easy)},
        {"Medium", mastery.difficulty_weights.at(Difficulty::Medium)},
        {"Hard", mastery.difficulty_weights.at(Difficulty::Hard)}}},
  };
  j["proficiency"] = {
      {"w_mastery_avg", proficiency.w_mastery_avg},
      {"w_expertise_rank", proficiency.w_expertise_rank},
      {"w_self_reported", proficiency.w_self_reported},
      {"w_recent_success", proficiency.w_recent_success},
      {"w_streak_norm", proficiency.w_streak_norm},
  };
  j["scheduler"] = {
      {"hint_threshold", scheduler.hint_threshold},
      {"shorten_factor", scheduler.shorten_factor},
      {"lengthen_factor", scheduler.lengthen_factor},
      {"fast_fraction", scheduler.fast_fraction},
      {"recall_min", scheduler.recall_min},
      {"tau_scale_c", scheduler.tau_scale_c},
      {"daily_cap", scheduler.daily_cap},
  };
  j["curriculum"] = {
      {"ratio_review", curriculum.ratio_review},
      {"ratio_growth", curriculum.ratio_growth},
      {"ratio_challenge", curriculum.ratio_challenge},
      {"growth_low", curriculum.growth_low},
      {"growth_high", curriculum.growth_high},
      {"repetition_window_k", curriculum.repetition_window_k},
      {"prereq_mastery_min", curriculum.prereq_mastery_min},
      {"max_topic_share", curriculum.max_topic_share},
      {"daily_set_size", curriculum.daily_set_size},
  };
  j["reward"] = {
      {"w_m", reward.w_m}, {"w_r", reward.w_r}, {"w_h", reward.w_h},
      {"w_t", reward.w_t}, {"mu_t", reward.mu_t},
  };
  j["agents"] = {
      {"backend", agents.backend},
      {"replay_fixture", agents.replay_fixture},
      {"inactivity_days", agents.inactivity_days},
      {"failure_streak_threshold", agents.failure_streak_threshold},
      {"memory_cap_per_section", agents.memory_cap_per_section},
  };
  j["simulation"] = {
      {"days", simulation.days},
      {"seed", simulation.seed},
      {"max_attempts_per_item", simulation.max_attempts_per_item},
      {"warmup_attempts_per_topic", simulation.warmup_attempts_per_topic},
  };
  std::ofstream out(path);
  if (!out) throw TutorError("cannot write config file: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace tutor
