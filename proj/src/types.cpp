#include "tutor/types.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "json.hpp"

namespace tutor {

namespace {

// Howard Hinnant's civil-day algorithms.
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y = static_cast<int>(yy + (m <= 2));
}

}  // namespace

std::string Date::to_string() const {
  int y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", y, m, d);
  return buf;
}

Date Date::parse(const std::string& s) {
  int y = 0;
  unsigned m = 0, d = 0;
  if (std::sscanf(s.c_str(), "%d-%u-%u", &y, &m, &d) != 3 || m < 1 || m > 12 ||
      d < 1 || d > 31) {
    throw TutorError("invalid date: " + s);
  }
  return Date{static_cast<std::int32_t>(days_from_civil(y, m, d))};
}

std::string format_rfc3339(Timestamp ts) {
  Date date = Date::from_timestamp(ts);
  std::int64_t sod = ts - date.to_timestamp();
  char buf[16];
  std::snprintf(buf, sizeof(buf), "T%02lld:%02lld:%02lldZ",
                static_cast<long long>(sod / 3600),
                static_cast<long long>((sod / 60) % 60),
                static_cast<long long>(sod % 60));
  return date.to_string() + buf;
}

Timestamp parse_rfc3339(const std::string& text) {
  int y = 0;
  unsigned mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (std::sscanf(text.c_str(), "%d-%u-%uT%u:%u:%u", &y, &mo, &d, &h, &mi,
                  &s) != 6) {
    throw TutorError("invalid RFC 3339 timestamp: " + text);
  }
  return days_from_civil(y, mo, d) * kSecondsPerDay + h * 3600 + mi * 60 + s;
}

const char* to_string(Difficulty d) {
  switch (d) {
    case Difficulty::Easy: return "Easy";
    case Difficulty::Medium: return "Medium";
    case Difficulty::Hard: return "Hard";
  }
  return "Medium";
}

Difficulty difficulty_from_string(const std::string& s) {
  if (s == "Easy") return Difficulty::Easy;
  if (s == "Medium") return Difficulty::Medium;
  if (s == "Hard") return Difficulty::Hard;
  throw TutorError("unknown difficulty: " + s);
}

double difficulty_weight(Difficulty d) {
  switch (d) {
    case Difficulty::Easy: return 0.8;
    case Difficulty::Medium: return 1.0;
    case Difficulty::Hard: return 1.2;
  }
  return 1.0;
}

double difficulty_value(Difficulty d) {
  switch (d) {
    case Difficulty::Easy: return 0.3;
    case Difficulty::Medium: return 0.5;
    case Difficulty::Hard: return 0.7;
  }
  return 0.5;
}

const char* to_string(HintTier t) {
  switch (t) {
    case HintTier::Beginner: return "beginner";
    case HintTier::Intermediate: return "intermediate";
    case HintTier::Advanced: return "advanced";
  }
  return "beginner";
}

HintTier tier_from_string(const std::string& s) {
  if (s == "beginner") return HintTier::Beginner;
  if (s == "intermediate") return HintTier::Intermediate;
  if (s == "advanced") return HintTier::Advanced;
  throw TutorError("unknown hint tier: " + s);
}

void Observation::check() const {
  if (solve_time < 0.0) throw TutorError("negative solve time");
  if (tests_total <= 0) throw TutorError("tests_total must be positive");
  if (tests_passed < 0 || tests_passed > tests_total) {
    throw TutorError("tests_passed out of range");
  }
  if (passed != (tests_passed == tests_total)) {
    throw TutorError("passed flag inconsistent with test counts");
  }
  if (hint_count < 0) throw TutorError("negative hint count");
}

std::optional<std::string> ProblemItem::hint_template(int level,
                                                      HintTier tier) const {
  auto it = hint_templates.find(std::to_string(level) + "/" + to_string(tier));
  if (it == hint_templates.end()) return std::nullopt;
  return it->second;
}

const ProblemItem* ProblemBank::find(const ItemId& id) const {
  for (const auto& it : items) {
    if (it.id == id) return &it;
  }
  return nullptr;
}

ProblemBank ProblemBank::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TutorError("cannot open bank file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw TutorError("bank parse error: " + std::string(e.what()));
  }
  if (!j.is_array()) throw TutorError("bank file must be a JSON array");

  ProblemBank bank;
  for (const auto& rec : j) {
    ProblemItem item;
    item.id = rec.at("id").get<std::string>();
    item.topics = rec.at("topics").get<std::vector<TopicId>>();
    item.difficulty = difficulty_from_string(rec.at("difficulty"));
    if (rec.contains("prerequisites")) {
      for (const auto& p : rec["prerequisites"]) {
        item.prerequisites.insert(p.get<std::string>());
      }
    }
    item.expected_solve_time = rec.value("expected_solve_time", 300.0);
    item.reference_solution = rec.value("reference_solution", "");
    if (rec.contains("hint_templates")) {
      for (const auto& [k, v] : rec["hint_templates"].items()) {
        item.hint_templates[k] = v.get<std::string>();
      }
    }
    if (rec.contains("tests")) {
      for (const auto& t : rec["tests"]) {
        item.tests.push_back(
            {t.at("input").get<std::string>(), t.at("expected").get<std::string>()});
      }
    }
    if (rec.contains("suggestions")) {
      for (const auto& [k, v] : rec["suggestions"].items()) {
        item.suggestions[k] = v.get<std::vector<std::string>>();
      }
    }
    bank.items.push_back(std::move(item));
  }
  for (const auto& it : bank.items) {
    for (const auto& t : it.topics) bank.topics.insert(t);
  }
  bank.check();
  return bank;
}

void ProblemBank::check() const {
  for (const auto& it : items) {
    if (it.topics.empty()) {
      throw TutorError("bank item with empty topic set: " + it.id);
    }
    for (const auto& p : it.prerequisites) {
      if (topics.count(p) == 0) {
        throw TutorError("dangling prerequisite topic '" + p + "' on item " +
                         it.id);
      }
    }
  }
}

const std::vector<std::string>& error_tag_vocabulary() {
  static const std::vector<std::string> kTags = {
      "missing-base-case", "off-by-one",          "wrong-data-structure",
      "infinite-loop",     "unhandled-empty",     "integer-overflow",
      "wrong-complexity",  "mutation-aliasing",   "wrong-comparator",
      "missing-memoization", "boundary-condition", "null-dereference",
  };
  return kTags;
}

bool known_error_tag(const std::string& tag) {
  const auto& v = error_tag_vocabulary();
  return std::find(v.begin(), v.end(), tag) != v.end();
}

}  // namespace tutor
