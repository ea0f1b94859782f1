#include "tutor/learner_state.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace tutor {

const ActivityDay* EngagementState::day(Date d) const {
  for (const auto& a : activity_window) {
    if (a.date == d) return &a;
  }
  return nullptr;
}

const ReviewItem* LearnerState::find_review(const ItemId& id) const {
  for (const auto& r : reviews) {
    if (r.item_id == id) return &r;
  }
  return nullptr;
}

double LearnerState::mean_mastery() const {
  if (mastery.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [_, tm] : mastery) sum += tm.m;
  return sum / static_cast<double>(mastery.size());
}

void MasteryConfig::check() const {
  if (learn_rate_alpha <= 0.0 || forget_rate_beta <= 0.0) {
    throw TutorError("learn/forget rates must be positive");
  }
  if (difficulty_weights.size() != 3) {
    throw TutorError("difficulty_weights must carry exactly Easy/Medium/Hard");
  }
  if (recency_tau <= 0.0) throw TutorError("recency_tau must be positive");
  if (momentum_lambda <= 0.0 || momentum_lambda > 1.0) {
    throw TutorError("momentum_lambda must be in (0,1]");
  }
  if (hint_penalty_eta_h < 0.0 || time_penalty_eta_t < 0.0 ||
      init_noise_sigma0 < 0.0) {
    throw TutorError("penalty/noise parameters must be nonnegative");
  }
}

void ProficiencyWeights::check() const {
  if (std::abs(sum() - 1.0) > 1e-12) {
    throw TutorError("proficiency weights must sum to 1.0");
  }
}

namespace mastery {

std::map<TopicId, TopicMastery> init_mastery(
    const std::vector<TaggedObservation>& history,
    const std::set<TopicId>& topics, const MasteryConfig& config,
    std::uint64_t seed) {
  // group by topic, preserving timestamp order
  std::map<TopicId, std::vector<const Observation*>> per_topic;
  for (const auto& rec : history) {
    if (rec.topics.empty()) {
      throw TutorError("history observation with empty topic set");
    }
    rec.obs.check();
    for (const auto& t : rec.topics) per_topic[t].push_back(&rec.obs);
  }
  for (auto& [_, obs] : per_topic) {
    std::stable_sort(obs.begin(), obs.end(),
                     [](const Observation* a, const Observation* b) {
                       return a->timestamp < b->timestamp;
                     });
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, config.init_noise_sigma0);

  std::map<TopicId, TopicMastery> out;
  // iterate the topic universe in sorted order so the noise stream is
  // independent of history layout
  for (const auto& topic : topics) {
    TopicMastery tm;
    tm.topic_id = topic;
    auto it = per_topic.find(topic);
    if (it == per_topic.end() || it->second.empty()) {
      tm.m = 0.0;  // conservative cold-start prior
    } else {
      const auto& obs = it->second;
      double passes = 0.0;
      for (const auto* o : obs) passes += o->passed ? 1.0 : 0.0;
      double success_rate = passes / static_cast<double>(obs.size());

      std::size_t recent_n = std::min<std::size_t>(obs.size(), 10);
      double recent_passes = 0.0;
      for (std::size_t i = obs.size() - recent_n; i < obs.size(); ++i) {
        recent_passes += obs[i]->passed ? 1.0 : 0.0;
      }
      double recent_rate = recent_passes / static_cast<double>(recent_n);

      double eps = config.init_noise_sigma0 > 0.0 ? noise(rng) : 0.0;
      tm.m = clamp01(0.6 * success_rate + 0.4 * recent_rate + eps);
      tm.last_update = obs.back()->timestamp;
    }
    out.emplace(topic, std::move(tm));
  }
  return out;
}

double expected_solve_time(const ProblemItem& item,
                           std::span<const double> recent_solve_times) {
  if (item.expected_solve_time > 0.0) return item.expected_solve_time;
  if (!recent_solve_times.empty()) {
    std::vector<double> v(recent_solve_times.begin(), recent_solve_times.end());
    if (v.size() > 10) v.erase(v.begin(), v.end() - 10);
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  }
  return 300.0;
}

std::vector<MasteryDelta> apply_observation(const LearnerState& state,
                                            const Observation& obs,
                                            const ProblemItem& item,
                                            const MasteryConfig& config) {
  obs.check();
  if (obs.item_id != item.id) {
    throw TutorError("observation/item mismatch: " + obs.item_id);
  }
  if (item.topics.empty()) throw TutorError("item with empty topic set");

  const double w_d = config.difficulty_weights.at(item.difficulty);
  const double mu = expected_solve_time(item, {});
  const double y = obs.passed ? 1.0 : 0.0;

  std::vector<MasteryDelta> deltas;
  deltas.reserve(item.topics.size());
  for (const auto& topic : item.topics) {
    auto it = state.mastery.find(topic);
    if (it == state.mastery.end()) {
      throw TutorError("unknown topic on item: " + topic);
    }
    const TopicMastery& tm = it->second;
    const double m_prev = tm.m;

    double dt_days = 0.0;
    if (tm.last_update > 0 && obs.timestamp > tm.last_update) {
      dt_days = static_cast<double>(obs.timestamp - tm.last_update) /
                static_cast<double>(kSecondsPerDay);
    }
    const double w_r = std::exp(-dt_days / config.recency_tau);

    double m_new;
    std::string why;
    if (obs.passed) {
      m_new = std::min(1.0, m_prev + config.learn_rate_alpha * w_d * w_r *
                                         (1.0 - m_prev));
      // penalties attenuate gains on pass; failures already decrement m
      double penalty =
          config.hint_penalty_eta_h * obs.hint_count +
          config.time_penalty_eta_t * std::max(0.0, obs.solve_time - mu);
      m_new = clamp01(m_new - penalty);
      why = "pass";
      if (obs.hint_count > 0) why += ",hint_penalty";
      if (obs.solve_time > mu) why += ",time_penalty";
    } else {
      m_new = std::max(0.0, m_prev - config.forget_rate_beta * (1.0 / w_d) *
                                         w_r * m_prev);
      why = "fail";
    }

    const double m_final = (1.0 - config.momentum_lambda) * m_prev +
                           config.momentum_lambda * m_new;

    MasteryDelta d;
    d.topic = topic;
    d.before = m_prev;
    d.after = m_final;
    d.alpha_inc = y;
    d.beta_inc = 1.0 - y;
    d.rationale = why;
    deltas.push_back(std::move(d));
  }
  return deltas;
}

double compute_proficiency(const LearnerState& state,
                           const ProficiencyWeights& weights,
                           double recent_success, double streak_norm) {
  weights.check();
  double rank = state.preferences.expertise_rank;
  double self = state.preferences.self_reported_skill;
  for (double v : {rank, self, recent_success, streak_norm}) {
    if (v < 0.0 || v > 1.0) {
      throw TutorError("proficiency component out of [0,1]");
    }
  }
  return weights.w_mastery_avg * state.mean_mastery() +
         weights.w_expertise_rank * rank + weights.w_self_reported * self +
         weights.w_recent_success * recent_success +
         weights.w_streak_norm * streak_norm;
}

BetaMoments uncertainty(const TopicMastery& topic) {
  const double a = topic.alpha_count;
  const double b = topic.beta_count;
  if (a < 1.0 || b < 1.0) throw TutorError("Beta counts below the prior");
  BetaMoments mom;
  mom.mean = a / (a + b);
  mom.variance = a * b / ((a + b) * (a + b) * (a + b + 1.0));
  return mom;
}

}  // namespace mastery

}  // namespace tutor
