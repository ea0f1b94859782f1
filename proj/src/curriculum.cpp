#include "tutor/curriculum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "tutor/metrics.hpp"

namespace tutor {

void CurriculumConfig::check() const {
  if (std::abs(ratio_review + ratio_growth + ratio_challenge - 1.0) > 1e-12) {
    throw TutorError("curriculum ratios must sum to 1.0");
  }
  if (!(growth_low < growth_high)) {
    throw TutorError("growth_low must be below growth_high");
  }
  if (daily_set_size < 1) throw TutorError("daily_set_size must be >= 1");
  if (repetition_window_k < 0) throw TutorError("repetition window must be >= 0");
}

namespace curriculum {

const char* to_string(Zone z) {
  switch (z) {
    case Zone::Challenge: return "challenge";
    case Zone::Growth: return "growth";
    case Zone::Mastered: return "mastered";
  }
  return "growth";
}

const char* to_string(SlotKind k) {
  switch (k) {
    case SlotKind::Review: return "review";
    case SlotKind::Growth: return "growth";
    case SlotKind::Challenge: return "challenge";
  }
  return "growth";
}

Zone classify_zone(double m, const CurriculumConfig& config) {
  if (m < 0.0 || m > 1.0) throw TutorError("mastery out of [0,1]");
  if (m < config.growth_low) return Zone::Challenge;
  if (m <= config.growth_high) return Zone::Growth;
  return Zone::Mastered;
}

std::vector<const ProblemItem*> eligible_items(
    const ProblemBank& bank, const LearnerState& state,
    const std::vector<SelectionRecord>& history, Date today,
    const CurriculumConfig& config) {
  std::set<ItemId> recent;
  for (const auto& rec : history) {
    if (today.days - rec.date.days < config.repetition_window_k) {
      recent.insert(rec.item_id);
    }
  }

  std::vector<const ProblemItem*> out;
  for (const auto& item : bank.items) {
    if (recent.count(item.id)) continue;
    bool prereqs_ok = true;
    for (const auto& p : item.prerequisites) {
      auto it = state.mastery.find(p);
      double m = it == state.mastery.end() ? 0.0 : it->second.m;
      if (m < config.prereq_mastery_min) {
        prereqs_ok = false;
        break;
      }
    }
    if (prereqs_ok) out.push_back(&item);
  }
  std::sort(out.begin(), out.end(),
            [](const ProblemItem* a, const ProblemItem* b) { return a->id < b->id; });
  return out;
}

SlotTargets apportion_slots(int n, const CurriculumConfig& config) {
  const double ratios[3] = {config.ratio_review, config.ratio_growth,
                            config.ratio_challenge};
  int counts[3];
  double remainders[3];
  int assigned = 0;
  for (int i = 0; i < 3; ++i) {
    double exact = ratios[i] * n;
    counts[i] = static_cast<int>(std::floor(exact));
    remainders[i] = exact - counts[i];
    assigned += counts[i];
  }
  // largest remainder; ties favor growth, then review, then challenge
  const int order[3] = {1, 0, 2};
  while (assigned < n) {
    int best = -1;
    double best_rem = -1.0;
    for (int idx : order) {
      if (remainders[idx] > best_rem + 1e-12) {
        best_rem = remainders[idx];
        best = idx;
      }
    }
    counts[best]++;
    remainders[best] = -1.0;
    ++assigned;
  }
  return {counts[0], counts[1], counts[2]};
}

namespace {

double primary_mastery(const LearnerState& state, const ProblemItem& item) {
  auto it = state.mastery.find(item.primary_topic());
  return it == state.mastery.end() ? 0.0 : it->second.m;
}

// lowest mastery first; ties broken by a seeded permutation
void rank_pool(std::vector<const ProblemItem*>& pool,
               const LearnerState& state, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::shuffle(pool.begin(), pool.end(), rng);
  std::stable_sort(pool.begin(), pool.end(),
                   [&](const ProblemItem* a, const ProblemItem* b) {
                     return primary_mastery(state, *a) <
                            primary_mastery(state, *b);
                   });
}

}  // namespace

DailySet select_daily_set(const LearnerState& state, const ProblemBank& bank,
                          const std::vector<ReviewItem>& due_reviews,
                          const std::vector<SelectionRecord>& history,
                          Date today, const CurriculumConfig& config,
                          std::uint64_t seed) {
  config.check();
  const int n = config.daily_set_size;
  SlotTargets targets = apportion_slots(n, config);

  auto eligible = eligible_items(bank, state, history, today, config);

  // review pool: due items mapped back to bank entries (scheduled reviews
  // bypass the repetition window)
  std::vector<const ProblemItem*> review_pool;
  for (const auto& r : due_reviews) {
    if (const ProblemItem* item = bank.find(r.item_id)) {
      review_pool.push_back(item);
    }
  }

  std::vector<const ProblemItem*> growth_pool, challenge_pool;
  for (const ProblemItem* item : eligible) {
    switch (classify_zone(primary_mastery(state, *item), config)) {
      case Zone::Growth: growth_pool.push_back(item); break;
      case Zone::Challenge: challenge_pool.push_back(item); break;
      case Zone::Mastered: break;
    }
  }
  rank_pool(growth_pool, state, seed ^ 0x67726f77u);
  rank_pool(challenge_pool, state, seed ^ 0x6368616cu);

  DailySet out;
  std::set<ItemId> chosen;
  std::map<TopicId, int> topic_slots;
  const int topic_cap =
      std::max(1, static_cast<int>(std::floor(config.max_topic_share * n)));

  auto take = [&](std::vector<const ProblemItem*>& pool, SlotKind kind,
                  int want, bool enforce_share) {
    int taken = 0;
    for (auto it = pool.begin(); it != pool.end() && taken < want;) {
      const ProblemItem* item = *it;
      if (chosen.count(item->id)) {
        it = pool.erase(it);
        continue;
      }
      if (enforce_share &&
          topic_slots[item->primary_topic()] >= topic_cap) {
        ++it;
        continue;
      }
      chosen.insert(item->id);
      topic_slots[item->primary_topic()]++;
      out.slots.push_back({item->id, kind});
      it = pool.erase(it);
      ++taken;
    }
    return taken;
  };

  int got_r = take(review_pool, SlotKind::Review, targets.review, true);
  int got_g = take(growth_pool, SlotKind::Growth, targets.growth, true);
  int got_c = take(challenge_pool, SlotKind::Challenge, targets.challenge, true);

  // deficits backfill growth -> review -> challenge
  int deficit = n - (got_r + got_g + got_c);
  if (deficit > 0) deficit -= take(growth_pool, SlotKind::Growth, deficit, true);
  if (deficit > 0) deficit -= take(review_pool, SlotKind::Review, deficit, true);
  if (deficit > 0)
    deficit -= take(challenge_pool, SlotKind::Challenge, deficit, true);
  // relax the topic-share cap only when nothing else remains
  if (deficit > 0) deficit -= take(growth_pool, SlotKind::Growth, deficit, false);
  if (deficit > 0) deficit -= take(review_pool, SlotKind::Review, deficit, false);
  if (deficit > 0)
    deficit -= take(challenge_pool, SlotKind::Challenge, deficit, false);

  out.shortfall = deficit;
  return out;
}

CoverageReport coverage_report(const std::vector<SelectionRecord>& log,
                               const std::set<TopicId>& bank_topics,
                               const std::vector<double>& gains, int horizon) {
  if (horizon < 1) throw TutorError("horizon must be >= 1");
  CoverageReport rep;
  rep.horizon_days = horizon;

  std::map<TopicId, int> counts;
  std::set<TopicId> seen;
  for (const auto& rec : log) {
    for (const auto& t : rec.topics) {
      counts[t]++;
      seen.insert(t);
    }
  }
  if (!bank_topics.empty()) {
    rep.coverage = static_cast<double>(seen.size()) /
                   static_cast<double>(bank_topics.size());
  }
  std::vector<int> count_values;
  for (const auto& [_, c] : counts) count_values.push_back(c);
  rep.diversity = metrics::normalized_entropy(
      count_values, static_cast<int>(bank_topics.size()));

  if (!gains.empty()) {
    double med = metrics::median(gains);
    if (med > 0.0) {
      rep.fairness_iqr_ratio = metrics::iqr(gains) / med;
      rep.fairness_defined = true;
    } else {
      rep.fairness_iqr_ratio = std::numeric_limits<double>::infinity();
      rep.fairness_defined = false;
    }
  }
  return rep;
}

}  // namespace curriculum
}  // namespace tutor
