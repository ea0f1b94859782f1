#pragma once

// Shared domain vocabulary: dates, timestamps, observations, problem bank.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace tutor {

using TopicId = std::string;
using ItemId = std::string;

struct TutorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unix seconds, UTC.
using Timestamp = std::int64_t;

constexpr std::int64_t kSecondsPerDay = 86400;

// Calendar day, stored as days since 1970-01-01.
struct Date {
  std::int32_t days = 0;

  auto operator<=>(const Date&) const = default;

  Date next() const { return Date{days + 1}; }
  Date plus(int n) const { return Date{days + n}; }
  Timestamp to_timestamp() const {
    return static_cast<Timestamp>(days) * kSecondsPerDay;
  }
  static Date from_timestamp(Timestamp ts) {
    // floor division for pre-1970 timestamps
    std::int64_t d = ts / kSecondsPerDay;
    if (ts % kSecondsPerDay < 0) --d;
    return Date{static_cast<std::int32_t>(d)};
  }

  std::string to_string() const;           // YYYY-MM-DD
  static Date parse(const std::string&);   // throws TutorError on bad input
};

std::string format_rfc3339(Timestamp ts);
Timestamp parse_rfc3339(const std::string& text);

enum class Difficulty { Easy, Medium, Hard };

const char* to_string(Difficulty d);
Difficulty difficulty_from_string(const std::string& s);

// Penalty weight w_d used by mastery updates; inverted on failure.
double difficulty_weight(Difficulty d);

// Logistic offset used by the simulated-learner success model.
double difficulty_value(Difficulty d);

enum class HintTier { Beginner, Intermediate, Advanced };

const char* to_string(HintTier t);
HintTier tier_from_string(const std::string& s);

// One submission/interaction record (o_t).
struct Observation {
  ItemId item_id;
  bool passed = false;
  Timestamp timestamp = 0;
  int hint_count = 0;
  std::vector<std::string> error_tags;
  double solve_time = 0.0;  // seconds
  int tests_passed = 0;
  int tests_total = 1;
  bool abandoned = false;

  // throws TutorError on inconsistent counts or negative solve time
  void check() const;
};

struct TestCase {
  std::string input;
  std::string expected_output;
};

// Curriculum bank entry.
struct ProblemItem {
  ItemId id;
  std::vector<TopicId> topics;  // nonempty; first entry is the primary topic
  Difficulty difficulty = Difficulty::Medium;
  std::set<TopicId> prerequisites;
  double expected_solve_time = 300.0;  // seconds
  std::string reference_solution;      // never rendered to learners
  // key: "<level>/<tier>", level in 1..5
  std::map<std::string, std::string> hint_templates;
  std::vector<TestCase> tests;
  // static suggestion table per category (time/space/readability/edge_case)
  std::map<std::string, std::vector<std::string>> suggestions;

  const TopicId& primary_topic() const { return topics.front(); }
  std::optional<std::string> hint_template(int level, HintTier tier) const;
};

struct ProblemBank {
  std::vector<ProblemItem> items;
  std::set<TopicId> topics;

  const ProblemItem* find(const ItemId& id) const;
  bool has_topic(const TopicId& t) const { return topics.count(t) > 0; }
  static ProblemBank load(const std::string& path);
  // throws TutorError on dangling prerequisites or empty topic sets
  void check() const;
};

// Closed vocabulary for Observation.error_tags / misconception tags.
const std::vector<std::string>& error_tag_vocabulary();
bool known_error_tag(const std::string& tag);

inline double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

}  // namespace tutor
