#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <unistd.h>

#include "tutor/serialize.hpp"
#include "tutor/store.hpp"

using namespace tutor;
namespace fs = std::filesystem;

namespace {

ProblemBank shipped_bank() {
  return ProblemBank::load(std::string(TUTOR_DATA_DIR) + "/bank.json");
}

LearnerState base_state(const ProblemBank& bank) {
  LearnerState s;
  s.learner_id = "t";
  for (const auto& t : bank.topics) {
    TopicMastery tm;
    tm.topic_id = t;
    tm.m = 0.35;
    s.mastery[t] = tm;
  }
  return s;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() /
           ("tutor-test-" + tag + "-" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

store::EventRecord make_record(std::uint64_t version) {
  store::EventRecord r;
  r.version = version;
  r.timestamp = "2025-06-01T00:00:00Z";
  r.trigger_kind = "on_session_check";
  r.payload = nlohmann::json::object();
  r.accepted_deltas = nlohmann::json::array();
  r.rejected = nlohmann::json::array();
  r.state_digest = std::string(64, 'a');
  r.latency_ms = 0.1;
  return r;
}

}  // namespace

TEST_CASE("event record json round trip") {
  auto r = make_record(7);
  auto back = store::EventRecord::from_json(r.to_json());
  CHECK(back.version == 7);
  CHECK(back.trigger_kind == "on_session_check");
  CHECK(back.state_digest == r.state_digest);
  CHECK(back.latency_ms == r.latency_ms);
}

TEST_CASE("append refuses version gaps") {
  TempDir tmp("gaps");
  auto log = tmp.path / "events.jsonl";
  CHECK_NOTHROW(store::append_event(log, make_record(1)));
  CHECK_NOTHROW(store::append_event(log, make_record(2)));
  CHECK_THROWS_AS(store::append_event(log, make_record(4)), TutorError);
  CHECK_THROWS_AS(store::append_event(log, make_record(2)), TutorError);
  CHECK(store::read_events(log).size() == 2);
}

TEST_CASE("a thousand appends stay parseable") {
  TempDir tmp("bulk");
  auto log = tmp.path / "events.jsonl";
  for (int i = 1; i <= 1000; ++i) store::append_event(log, make_record(i));
  bool truncated = false;
  auto events = store::read_events(log, &truncated);
  CHECK(!truncated);
  REQUIRE(events.size() == 1000);
  for (std::size_t i = 0; i < events.size(); ++i) {
    CHECK(events[i].version == i + 1);
  }
}

TEST_CASE("truncated trailing line is dropped and reported") {
  TempDir tmp("trunc");
  auto log = tmp.path / "events.jsonl";
  for (int i = 1; i <= 3; ++i) store::append_event(log, make_record(i));
  // chop the file mid-way through the last line
  auto size = fs::file_size(log);
  fs::resize_file(log, size - 20);
  bool truncated = false;
  auto events = store::read_events(log, &truncated);
  CHECK(truncated);
  CHECK(events.size() == 2);
}

TEST_CASE("canonical snapshots") {
  auto bank = shipped_bank();

  SUBCASE("same state twice gives identical bytes and digest") {
    auto s = base_state(bank);
    auto a = store::write_snapshot(s);
    auto b = store::write_snapshot(s);
    CHECK(a.bytes == b.bytes);
    CHECK(a.digest == b.digest);
    CHECK(a.digest.size() == 64);
    CHECK(a.digest == state_digest(s));
  }

  SUBCASE("insertion order does not leak into the bytes") {
    LearnerState fwd, rev;
    fwd.learner_id = rev.learner_id = "t";
    std::vector<TopicId> topics = {"a", "b", "c", "d"};
    for (auto it = topics.begin(); it != topics.end(); ++it) {
      fwd.mastery[*it] = TopicMastery{*it, 0.2, 1, 1, 0};
    }
    for (auto it = topics.rbegin(); it != topics.rend(); ++it) {
      rev.mastery[*it] = TopicMastery{*it, 0.2, 1, 1, 0};
    }
    CHECK(store::write_snapshot(fwd).bytes == store::write_snapshot(rev).bytes);
  }

  SUBCASE("sub-ulp perturbations cannot change the digest") {
    auto s = base_state(bank);
    s.mastery["arrays"].m = 1.0 / 3.0;
    auto a = store::write_snapshot(s);
    s.mastery["arrays"].m = 1.0 / 3.0 + 1e-18;  // below render precision
    auto b = store::write_snapshot(s);
    CHECK(a.digest == b.digest);
  }

  SUBCASE("non-finite values are refused") {
    auto s = base_state(bank);
    s.mastery["arrays"].m = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS(store::write_snapshot(s));
  }
}

TEST_CASE("state serialization round trip is byte-identical") {
  auto bank = shipped_bank();
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int round = 0; round < 20; ++round) {
    auto s = base_state(bank);
    s.version = rng() % 1000;
    s.updated_at = static_cast<Timestamp>(rng() % 100000);
    for (auto& [_, tm] : s.mastery) {
      tm.m = u(rng);
      tm.alpha_count = 1 + rng() % 9;
      tm.beta_count = 1 + rng() % 9;
    }
    ReviewItem r;
    r.item_id = "arrays-warmup";
    r.topics = {"arrays"};
    r.due_date = Date{20000 + static_cast<int>(rng() % 100)};
    r.interval_days = 1 + static_cast<int>(rng() % 20);
    r.ease_factor = 1.3 + u(rng);
    r.n_reviews = static_cast<int>(rng() % 6);
    s.reviews.push_back(r);
    s.memory.trends.push_back("trend " + std::to_string(round));
    s.engagement.streak_days = static_cast<int>(rng() % 10);
    s.engagement.activity_window.push_back({Date{20000}, 3, 2});

    auto first = store::write_snapshot(s);
    auto reparsed = state_from_json(nlohmann::json::parse(first.bytes));
    auto second = store::write_snapshot(reparsed);
    CHECK(first.bytes == second.bytes);
  }
}

TEST_CASE("learner directory: record, reconstruct, detect tampering") {
  auto bank = shipped_bank();
  AppConfig cfg;
  auto initial = base_state(bank);

  TempDir tmp("dir");
  auto dir =
      store::LearnerDir::create(tmp.path / "learner", initial, bank, cfg,
                                std::string(TUTOR_DATA_DIR) + "/bank.json");

  Orchestrator orch(initial, bank, cfg, make_deterministic_backend());
  Date day = Date::parse("2025-06-01");
  for (int i = 0; i < 10; ++i) {
    Trigger t;
    t.kind = i % 2 == 0 ? TriggerKind::OnSessionCheck
                        : TriggerKind::OnDailyGeneration;
    t.date = day.plus(i / 2);
    t.timestamp = t.date.to_timestamp() + (i % 2) * 60;
    t.seed = 100 + i;
    auto rec = orch.handle(t);
    dir.record(rec, orch.state());
  }

  SUBCASE("snapshot tracks the last committed state") {
    auto snap = dir.load_snapshot();
    CHECK(snap.version == 10);
    CHECK(state_digest(snap) == state_digest(orch.state()));
  }

  SUBCASE("reconstruct replays the log back to the snapshot") {
    auto replayed = dir.reconstruct();
    CHECK(state_digest(replayed) == state_digest(orch.state()));
  }

  SUBCASE("a corrupted event surfaces its version") {
    // damage the digest recorded at version 7
    auto log = tmp.path / "learner" / "events.jsonl";
    std::ifstream in(log);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    in.close();
    REQUIRE(lines.size() == 10);
    auto j = nlohmann::json::parse(lines[6]);
    std::string d = j["state_digest"];
    d[0] = d[0] == 'f' ? '0' : 'f';
    j["state_digest"] = d;
    lines[6] = j.dump();
    std::ofstream out(log, std::ios::trunc);
    for (const auto& line : lines) out << line << "\n";
    out.close();

    try {
      dir.reconstruct();
      FAIL("tampered log must not reconstruct");
    } catch (const TutorError& e) {
      CHECK(std::string(e.what()).find("7") != std::string::npos);
    }
  }
}

TEST_CASE("one writer per directory") {
  TempDir tmp("lock");
  fs::create_directories(tmp.path / "learner");
  store::WriteLock first(tmp.path / "learner");
  CHECK_THROWS_AS(store::WriteLock(tmp.path / "learner"), TutorError);
}
