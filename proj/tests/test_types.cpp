#include "doctest.h"

#include "tutor/types.hpp"

using namespace tutor;

TEST_CASE("date parse/format round trip") {
  CHECK(Date::parse("1970-01-01").days == 0);
  CHECK(Date::parse("2025-01-01").to_string() == "2025-01-01");
  CHECK(Date::parse("2024-02-29").to_string() == "2024-02-29");  // leap day
  CHECK(Date::parse("2025-01-01").next().to_string() == "2025-01-02");
  CHECK_THROWS_AS(Date::parse("2025-13-01"), TutorError);
  CHECK_THROWS_AS(Date::parse("not-a-date"), TutorError);
}

TEST_CASE("date/timestamp conversion floors toward earlier days") {
  Date d = Date::parse("2025-06-15");
  CHECK(Date::from_timestamp(d.to_timestamp()) == d);
  CHECK(Date::from_timestamp(d.to_timestamp() + kSecondsPerDay - 1) == d);
  CHECK(Date::from_timestamp(-1).days == -1);  // pre-epoch floor
}

TEST_CASE("rfc3339 round trip") {
  Timestamp ts = Date::parse("2025-03-10").to_timestamp() + 3661;
  CHECK(parse_rfc3339(format_rfc3339(ts)) == ts);
  CHECK(format_rfc3339(0) == "1970-01-01T00:00:00Z");
}

TEST_CASE("difficulty weights and logistic offsets") {
  CHECK(difficulty_weight(Difficulty::Easy) == 0.8);
  CHECK(difficulty_weight(Difficulty::Medium) == 1.0);
  CHECK(difficulty_weight(Difficulty::Hard) == 1.2);
  CHECK(difficulty_value(Difficulty::Easy) == 0.3);
  CHECK(difficulty_value(Difficulty::Medium) == 0.5);
  CHECK(difficulty_value(Difficulty::Hard) == 0.7);
  CHECK(difficulty_from_string("Hard") == Difficulty::Hard);
  CHECK_THROWS_AS(difficulty_from_string("Impossible"), TutorError);
}

TEST_CASE("observation consistency checks") {
  Observation ok;
  ok.item_id = "x";
  ok.passed = true;
  ok.tests_passed = 3;
  ok.tests_total = 3;
  CHECK_NOTHROW(ok.check());

  Observation bad = ok;
  bad.solve_time = -1.0;
  CHECK_THROWS_AS(bad.check(), TutorError);

  bad = ok;
  bad.passed = false;  // but all tests pass
  CHECK_THROWS_AS(bad.check(), TutorError);

  bad = ok;
  bad.tests_passed = 5;
  CHECK_THROWS_AS(bad.check(), TutorError);

  bad = ok;
  bad.hint_count = -2;
  CHECK_THROWS_AS(bad.check(), TutorError);
}

TEST_CASE("shipped bank loads and validates") {
  auto bank = ProblemBank::load(std::string(TUTOR_DATA_DIR) + "/bank.json");
  CHECK_NOTHROW(bank.check());
  CHECK(bank.topics.size() == 20);
  CHECK(bank.items.size() == 60);

  const ProblemItem* item = bank.find("arrays-warmup");
  REQUIRE(item != nullptr);
  CHECK(item->primary_topic() == "arrays");
  CHECK(item->difficulty == Difficulty::Easy);
  // all 5 levels x 3 tiers present
  for (int level = 1; level <= 5; ++level) {
    for (HintTier tier :
         {HintTier::Beginner, HintTier::Intermediate, HintTier::Advanced}) {
      CHECK(item->hint_template(level, tier).has_value());
    }
  }
  CHECK(!item->hint_template(6, HintTier::Beginner).has_value());
  CHECK(bank.find("no-such-item") == nullptr);
}

TEST_CASE("bank validation rejects dangling prerequisites") {
  ProblemBank bank;
  ProblemItem it;
  it.id = "a";
  it.topics = {"alpha"};
  it.prerequisites = {"ghost"};
  bank.items.push_back(it);
  bank.topics = {"alpha"};
  CHECK_THROWS_AS(bank.check(), TutorError);
}

TEST_CASE("error tag vocabulary is the closed 12-tag list") {
  CHECK(error_tag_vocabulary().size() == 12);
  CHECK(known_error_tag("missing-base-case"));
  CHECK(known_error_tag("off-by-one"));
  CHECK(!known_error_tag("made-up-tag"));
}
