#include "doctest.h"

#include <cmath>
#include <random>

#include "tutor/learner_state.hpp"

using namespace tutor;

namespace {

Observation make_obs(const ItemId& id, bool passed, Timestamp ts,
                     int hints = 0, double solve_time = 100.0) {
  Observation o;
  o.item_id = id;
  o.passed = passed;
  o.timestamp = ts;
  o.hint_count = hints;
  o.solve_time = solve_time;
  o.tests_total = 4;
  o.tests_passed = passed ? 4 : 1;
  return o;
}

ProblemItem make_item(const ItemId& id, Difficulty d,
                      std::vector<TopicId> topics,
                      double expected_time = 300.0) {
  ProblemItem it;
  it.id = id;
  it.topics = std::move(topics);
  it.difficulty = d;
  it.expected_solve_time = expected_time;
  return it;
}

LearnerState one_topic_state(double m, Timestamp last_update = 0) {
  LearnerState s;
  s.learner_id = "t";
  TopicMastery tm;
  tm.topic_id = "alpha";
  tm.m = m;
  tm.last_update = last_update;
  s.mastery["alpha"] = tm;
  return s;
}

}  // namespace

TEST_CASE("init_mastery frozen cases") {
  MasteryConfig cfg;
  cfg.init_noise_sigma0 = 0.0;
  std::set<TopicId> topics = {"alpha", "beta"};

  SUBCASE("no history: cold-start prior") {
    auto m = mastery::init_mastery({}, topics, cfg, 7);
    CHECK(m.at("alpha").m == 0.0);
    CHECK(m.at("alpha").alpha_count == 1.0);
    CHECK(m.at("alpha").beta_count == 1.0);
  }

  SUBCASE("10/10 passes -> 1.0") {
    std::vector<mastery::TaggedObservation> hist;
    for (int i = 0; i < 10; ++i) {
      hist.push_back({make_obs("x", true, 1000 + i), {"alpha"}});
    }
    auto m = mastery::init_mastery(hist, topics, cfg, 7);
    CHECK(m.at("alpha").m == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.at("beta").m == 0.0);  // untouched topic stays at prior
  }

  SUBCASE("5/10 overall, last 10 all passes -> 0.7") {
    // 20 attempts: 10 old fails then 10 recent passes
    std::vector<mastery::TaggedObservation> hist;
    for (int i = 0; i < 10; ++i) {
      hist.push_back({make_obs("x", false, 1000 + i), {"alpha"}});
    }
    for (int i = 0; i < 10; ++i) {
      hist.push_back({make_obs("x", true, 2000 + i), {"alpha"}});
    }
    auto m = mastery::init_mastery(hist, topics, cfg, 7);
    CHECK(m.at("alpha").m == doctest::Approx(0.7).epsilon(1e-12));
  }

  SUBCASE("empty topic set on an observation is rejected") {
    std::vector<mastery::TaggedObservation> hist = {
        {make_obs("x", true, 1000), {}}};
    CHECK_THROWS_AS(mastery::init_mastery(hist, topics, cfg, 7), TutorError);
  }

  SUBCASE("seeded noise is deterministic") {
    cfg.init_noise_sigma0 = 0.05;
    std::vector<mastery::TaggedObservation> hist = {
        {make_obs("x", true, 1000), {"alpha"}},
        {make_obs("x", false, 1001), {"alpha"}}};
    auto a = mastery::init_mastery(hist, topics, cfg, 11);
    auto b = mastery::init_mastery(hist, topics, cfg, 11);
    auto c = mastery::init_mastery(hist, topics, cfg, 12);
    CHECK(a.at("alpha").m == b.at("alpha").m);
    CHECK(a.at("alpha").m != c.at("alpha").m);
  }
}

TEST_CASE("apply_observation frozen cases (lambda=1)") {
  MasteryConfig cfg;
  cfg.momentum_lambda = 1.0;

  SUBCASE("pass on Medium moves 0.5 -> 0.6") {
    auto s = one_topic_state(0.5);
    auto item = make_item("x", Difficulty::Medium, {"alpha"});
    auto deltas =
        mastery::apply_observation(s, make_obs("x", true, 100), item, cfg);
    REQUIRE(deltas.size() == 1);
    CHECK(deltas[0].after == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(deltas[0].alpha_inc == 1.0);
    CHECK(deltas[0].beta_inc == 0.0);
  }

  SUBCASE("fail on Hard moves 0.5 -> 0.41667") {
    auto s = one_topic_state(0.5);
    auto item = make_item("x", Difficulty::Hard, {"alpha"});
    auto deltas =
        mastery::apply_observation(s, make_obs("x", false, 100), item, cfg);
    CHECK(deltas[0].after ==
          doctest::Approx(0.5 - 0.2 * (1.0 / 1.2) * 0.5).epsilon(1e-12));
    CHECK(deltas[0].beta_inc == 1.0);
  }

  SUBCASE("fail at m=0 stays 0") {
    auto s = one_topic_state(0.0);
    auto item = make_item("x", Difficulty::Easy, {"alpha"});
    auto deltas =
        mastery::apply_observation(s, make_obs("x", false, 100), item, cfg);
    CHECK(deltas[0].after == 0.0);
  }

  SUBCASE("unknown topic is an error") {
    auto s = one_topic_state(0.5);
    auto item = make_item("x", Difficulty::Easy, {"ghost"});
    CHECK_THROWS_AS(
        mastery::apply_observation(s, make_obs("x", true, 100), item, cfg),
        TutorError);
  }

  SUBCASE("item/observation id mismatch is an error") {
    auto s = one_topic_state(0.5);
    auto item = make_item("y", Difficulty::Easy, {"alpha"});
    CHECK_THROWS_AS(
        mastery::apply_observation(s, make_obs("x", true, 100), item, cfg),
        TutorError);
  }
}

TEST_CASE("mastery oracle: brute-force pipeline agrees to 1e-12") {
  // independent re-statement of the update pipeline, written from the
  // formulas rather than the production code
  auto oracle = [](double m, bool pass, double w_d, double dt_days,
                   int hints, double t_solve, double mu,
                   const MasteryConfig& c) {
    double w_r = std::exp(-dt_days / c.recency_tau);
    double m2;
    if (pass) {
      m2 = std::min(1.0, m + c.learn_rate_alpha * w_d * w_r * (1.0 - m));
      double pen = c.hint_penalty_eta_h * hints +
                   c.time_penalty_eta_t * std::max(0.0, t_solve - mu);
      m2 = std::max(0.0, std::min(1.0, m2 - pen));
    } else {
      m2 = std::max(0.0, m - c.forget_rate_beta * (1.0 / w_d) * w_r * m);
    }
    return (1.0 - c.momentum_lambda) * m + c.momentum_lambda * m2;
  };

  std::mt19937_64 rng(20250101);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const Difficulty diffs[] = {Difficulty::Easy, Difficulty::Medium,
                              Difficulty::Hard};

  for (int i = 0; i < 1000; ++i) {
    MasteryConfig cfg;
    cfg.momentum_lambda = 0.05 + 0.95 * u01(rng);
    double m = u01(rng);
    bool pass = u01(rng) < 0.5;
    Difficulty d = diffs[i % 3];
    double dt_days = 30.0 * u01(rng);
    int hints = static_cast<int>(5.0 * u01(rng));
    double mu = 300.0;
    double t_solve = 600.0 * u01(rng);

    Timestamp last = 1'000'000;
    auto s = one_topic_state(m, last);
    auto item = make_item("x", d, {"alpha"}, mu);
    Observation obs = make_obs(
        "x", pass, last + static_cast<Timestamp>(dt_days * kSecondsPerDay),
        hints, t_solve);

    auto deltas = mastery::apply_observation(s, obs, item, cfg);
    double want = oracle(m, pass, cfg.difficulty_weights.at(d),
                         (obs.timestamp - last) / 86400.0, hints, t_solve, mu,
                         cfg);
    CHECK(std::abs(deltas[0].after - want) < 1e-12);
  }
}

TEST_CASE("mastery bounds under 1e5 random observations") {
  MasteryConfig cfg;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const Difficulty diffs[] = {Difficulty::Easy, Difficulty::Medium,
                              Difficulty::Hard};

  auto s = one_topic_state(0.5);
  Timestamp ts = 1000;
  for (int i = 0; i < 100000; ++i) {
    ts += static_cast<Timestamp>(u01(rng) * 2 * kSecondsPerDay);
    auto item = make_item("x", diffs[i % 3], {"alpha"});
    auto obs = make_obs("x", u01(rng) < 0.5, ts,
                        static_cast<int>(6 * u01(rng)), 900 * u01(rng));
    auto deltas = mastery::apply_observation(s, obs, item, cfg);
    REQUIRE(deltas[0].after >= 0.0);
    REQUIRE(deltas[0].after <= 1.0);
    auto& tm = s.mastery["alpha"];
    tm.m = deltas[0].after;
    tm.last_update = ts;
    tm.alpha_count += deltas[0].alpha_inc;
    tm.beta_count += deltas[0].beta_inc;
  }
}

TEST_CASE("directionality: pass never lowers m, fail never raises it") {
  MasteryConfig cfg;
  cfg.hint_penalty_eta_h = 0.0;
  cfg.time_penalty_eta_t = 0.0;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    double m = u01(rng);
    auto s = one_topic_state(m);
    auto item = make_item("x", Difficulty::Medium, {"alpha"});
    auto up = mastery::apply_observation(s, make_obs("x", true, 100), item, cfg);
    auto dn =
        mastery::apply_observation(s, make_obs("x", false, 100), item, cfg);
    CHECK(up[0].after >= m);
    CHECK(dn[0].after <= m);
  }
}

TEST_CASE("recency monotonicity: staler observations move m less") {
  MasteryConfig cfg;
  cfg.momentum_lambda = 1.0;
  auto item = make_item("x", Difficulty::Medium, {"alpha"});
  double prev_gap = -1.0;
  for (int days : {0, 1, 3, 7, 14, 30, 90}) {
    auto s = one_topic_state(0.5, 1000);
    auto obs = make_obs("x", true, 1000 + Timestamp(days) * kSecondsPerDay);
    auto deltas = mastery::apply_observation(s, obs, item, cfg);
    double gap = std::abs(deltas[0].after - 0.5);
    if (prev_gap >= 0.0) CHECK(gap <= prev_gap);
    prev_gap = gap;
  }
}

TEST_CASE("difficulty asymmetry") {
  MasteryConfig cfg;
  cfg.momentum_lambda = 1.0;
  auto s = one_topic_state(0.5);
  auto easy = make_item("x", Difficulty::Easy, {"alpha"});
  auto hard = make_item("x", Difficulty::Hard, {"alpha"});

  auto pass_easy =
      mastery::apply_observation(s, make_obs("x", true, 100), easy, cfg);
  auto pass_hard =
      mastery::apply_observation(s, make_obs("x", true, 100), hard, cfg);
  CHECK(pass_hard[0].after > pass_easy[0].after);

  auto fail_easy =
      mastery::apply_observation(s, make_obs("x", false, 100), easy, cfg);
  auto fail_hard =
      mastery::apply_observation(s, make_obs("x", false, 100), hard, cfg);
  // failing hard items is forgiven: smaller drop than failing easy ones
  CHECK(fail_hard[0].after > fail_easy[0].after);
}

TEST_CASE("proficiency composite frozen cases") {
  ProficiencyWeights w;
  CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-15));

  LearnerState s = one_topic_state(0.5);
  SUBCASE("mean mastery 0.5, all else 0 -> 0.20") {
    CHECK(mastery::compute_proficiency(s, w, 0.0, 0.0) ==
          doctest::Approx(0.20).epsilon(1e-12));
  }
  SUBCASE("0.6/0.4/0.5/0.7/0.5 -> 0.535") {
    s.mastery["alpha"].m = 0.6;
    s.preferences.expertise_rank = 0.4;
    s.preferences.self_reported_skill = 0.5;
    CHECK(mastery::compute_proficiency(s, w, 0.7, 0.5) ==
          doctest::Approx(0.535).epsilon(1e-12));
  }
  SUBCASE("all components 1 -> 1.0") {
    s.mastery["alpha"].m = 1.0;
    s.preferences.expertise_rank = 1.0;
    s.preferences.self_reported_skill = 1.0;
    CHECK(mastery::compute_proficiency(s, w, 1.0, 1.0) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("empty mastery map means mean 0, not an error") {
    LearnerState empty;
    CHECK(mastery::compute_proficiency(empty, w, 0.0, 0.0) == 0.0);
  }
  SUBCASE("component outside [0,1] is rejected") {
    CHECK_THROWS_AS(mastery::compute_proficiency(s, w, 1.5, 0.0), TutorError);
  }
}

TEST_CASE("beta uncertainty moments") {
  TopicMastery tm;
  tm.alpha_count = 1;
  tm.beta_count = 1;
  auto u = mastery::uncertainty(tm);
  CHECK(u.mean == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(u.variance == doctest::Approx(1.0 / 12.0).epsilon(1e-12));

  tm.alpha_count = 9;
  tm.beta_count = 1;
  u = mastery::uncertainty(tm);
  CHECK(u.mean == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(u.variance == doctest::Approx(9.0 / 1100.0).epsilon(1e-12));

  tm.alpha_count = 3;
  tm.beta_count = 3;
  u = mastery::uncertainty(tm);
  CHECK(u.mean == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(u.variance == doctest::Approx(9.0 / 252.0).epsilon(1e-12));
}

TEST_CASE("expected_solve_time fallbacks") {
  ProblemItem it = make_item("x", Difficulty::Easy, {"alpha"}, 240.0);
  CHECK(mastery::expected_solve_time(it, {}) == 240.0);
  it.expected_solve_time = 0.0;
  std::vector<double> recents = {100.0, 300.0, 200.0};
  CHECK(mastery::expected_solve_time(it, recents) == 200.0);
  CHECK(mastery::expected_solve_time(it, {}) == 300.0);
}
