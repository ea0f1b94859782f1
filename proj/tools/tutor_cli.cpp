// Command-line front end: one learner directory per state, every command
// that mutates state goes through the orchestrator and lands in the
// append-only event log.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tutor/orchestrator.hpp"
#include "tutor/serialize.hpp"
#include "tutor/simulation.hpp"
#include "tutor/store.hpp"

namespace fs = std::filesystem;
using namespace tutor;

namespace {

// Rebuilds a live orchestrator by re-executing the event log, so derived
// bookkeeping (selection window, today's interventions) matches the
// state the log describes. Throws on any digest divergence.
Orchestrator open_orchestrator(const store::LearnerDir& dir) {
  std::ifstream in(dir.path() / "initial.json");
  if (!in) throw TutorError("missing initial snapshot");
  nlohmann::json j;
  in >> j;
  LearnerState initial = state_from_json(j);
  AppConfig config = dir.load_config();
  ProblemBank bank = dir.load_bank();

  Orchestrator orch(std::move(initial), std::move(bank), config,
                    make_backend(config.agents));
  for (const auto& e : dir.load_events()) {
    AuditRecord rec = orch.handle(trigger_from_json(e.payload));
    if (rec.state_digest_after != e.state_digest) {
      throw TutorError("event log diverges from engine at version " +
                       std::to_string(e.version));
    }
  }
  return orch;
}

int count_prior_hints(const store::LearnerDir& dir, const ItemId& item,
                      Date date) {
  int n = 0;
  for (const auto& e : dir.load_events()) {
    if (e.trigger_kind != "on_hint_request") continue;
    Trigger t = trigger_from_json(e.payload);
    if (t.item_id == item && t.date == date) ++n;
  }
  return n;
}

void print_actions(const AuditRecord& rec) {
  for (const auto& a : rec.actions) {
    if (const auto* h = std::get_if<HintAction>(&a.payload)) {
      std::cout << "hint level " << h->level << " (" << to_string(h->tier)
                << "): " << h->text << "\n";
    } else if (const auto* r = std::get_if<RecommendAction>(&a.payload)) {
      std::cout << "daily set (" << r->set.slots.size() << " items";
      if (r->set.shortfall > 0) {
        std::cout << ", shortfall " << r->set.shortfall;
      }
      std::cout << "):\n";
      for (const auto& s : r->set.slots) {
        std::cout << "  [" << curriculum::to_string(s.kind) << "] "
                  << s.item_id << "\n";
      }
    } else if (const auto* iv = std::get_if<InterventionAction>(&a.payload)) {
      std::cout << "intervention " << iv->kind << ": " << iv->message << "\n";
    } else if (const auto* f = std::get_if<FeedbackAction>(&a.payload)) {
      std::cout << (f->verdict_pass ? "pass" : "fail") << "\n";
      for (const auto& t : f->failing_tests) {
        std::cout << "  failing: " << t << "\n";
      }
      for (const auto& [cat, list] : f->suggestions) {
        for (const auto& s : list) std::cout << "  " << cat << ": " << s << "\n";
      }
    }
  }
  if (rec.failed) std::cout << "commit failed; state unchanged\n";
  std::cout << "version " << rec.version_after << " digest "
            << rec.state_digest_after.substr(0, 12) << "...\n";
}

int run_and_record(const std::string& dir_path, const Trigger& trigger) {
  store::WriteLock lock(dir_path);
  store::LearnerDir dir{fs::path(dir_path)};
  Orchestrator orch = open_orchestrator(dir);
  AuditRecord rec = orch.handle(trigger);
  dir.record(rec, orch.state());
  print_actions(rec);
  return rec.failed ? 1 : 0;
}

Observation parse_observation(const ItemId& item, bool passed, int tests_passed,
                              int tests_total, double solve_time, int hints,
                              const std::string& tags, Timestamp ts,
                              bool abandoned) {
  Observation obs;
  obs.item_id = item;
  obs.passed = passed;
  obs.timestamp = ts;
  obs.hint_count = hints;
  obs.solve_time = solve_time;
  obs.tests_total = tests_total;
  obs.tests_passed = passed ? tests_total : tests_passed;
  obs.abandoned = abandoned;
  std::stringstream ss(tags);
  std::string tag;
  while (std::getline(ss, tag, ',')) {
    if (!tag.empty()) obs.error_tags.push_back(tag);
  }
  obs.check();
  return obs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive tutoring engine"};
  app.require_subcommand(1);

  std::string dir, bank_path, config_path, learner_id, date_str, item;
  std::string tags, personas_path, out_dir = "reports", history_path;
  bool passed = false, abandoned = false;
  int tests_passed = 0, tests_total = 1, hints = -1, days = 0;
  double solve_time = 0.0;
  std::uint64_t seed = 42;

  auto add_dir = [&](CLI::App* cmd) {
    cmd->add_option("--dir", dir, "learner directory")->required();
  };
  auto add_date = [&](CLI::App* cmd) {
    cmd->add_option("--date", date_str, "session date YYYY-MM-DD")->required();
  };

  auto* init = app.add_subcommand("init", "create a learner directory");
  add_dir(init);
  init->add_option("--learner-id", learner_id)->required();
  init->add_option("--bank", bank_path, "problem bank JSON")->required();
  init->add_option("--config", config_path, "engine config JSON");
  init->add_option("--history", history_path,
                   "prior observations JSON for mastery initialization");
  init->add_option("--seed", seed);

  auto* daily = app.add_subcommand("daily", "generate today's problem set");
  add_dir(daily);
  add_date(daily);
  daily->add_option("--seed", seed, "tie-break seed");

  auto* submit = app.add_subcommand("submit", "record a submission");
  add_dir(submit);
  add_date(submit);
  submit->add_option("--item", item)->required();
  submit->add_flag("--passed", passed);
  submit->add_flag("--abandoned", abandoned);
  submit->add_option("--tests-passed", tests_passed);
  submit->add_option("--tests-total", tests_total);
  submit->add_option("--time", solve_time, "solve time in seconds");
  submit->add_option("--hints", hints,
                     "hints used (default: counted from the event log)");
  submit->add_option("--tags", tags, "comma-separated error tags");

  auto* hint = app.add_subcommand("hint", "request the next hint");
  add_dir(hint);
  add_date(hint);
  hint->add_option("--item", item)->required();

  auto* session = app.add_subcommand("session-check",
                                     "run engagement/curation checks");
  add_dir(session);
  add_date(session);

  auto* review = app.add_subcommand(
      "review-due", "process due reviews; with --item, records the outcome");
  add_dir(review);
  add_date(review);
  review->add_option("--item", item);
  review->add_flag("--passed", passed);
  review->add_option("--tests-passed", tests_passed);
  review->add_option("--tests-total", tests_total);
  review->add_option("--time", solve_time);
  review->add_option("--hints", hints);

  auto* simulate = app.add_subcommand("simulate", "run persona trajectories");
  simulate->add_option("--bank", bank_path)->required();
  simulate->add_option("--personas", personas_path)->required();
  simulate->add_option("--config", config_path);
  simulate->add_option("--days", days);
  simulate->add_option("--seed", seed);
  simulate->add_option("--out", out_dir, "report output directory");

  auto* report = app.add_subcommand("report", "summarize learner state");
  add_dir(report);

  auto* replay = app.add_subcommand(
      "replay", "verify the event log; exit 0 iff digests all match");
  add_dir(replay);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*init) {
      AppConfig config =
          config_path.empty() ? AppConfig{} : AppConfig::load(config_path);
      ProblemBank bank = ProblemBank::load(bank_path);
      LearnerState state;
      state.learner_id = learner_id;
      std::vector<mastery::TaggedObservation> history;
      if (!history_path.empty()) {
        std::ifstream in(history_path);
        if (!in) throw TutorError("cannot open history file");
        nlohmann::json j;
        in >> j;
        for (const auto& rec : j) {
          history.push_back({observation_from_json(rec.at("observation")),
                             rec.at("topics").get<std::vector<TopicId>>()});
        }
      }
      state.mastery =
          mastery::init_mastery(history, bank.topics, config.mastery, seed);
      state.memory.cap_per_section = config.agents.memory_cap_per_section;
      store::LearnerDir::create(dir, state, bank, config, bank_path);
      std::cout << "initialized " << dir << " with " << bank.items.size()
                << " bank items\n";
      return 0;
    }

    if (*daily) {
      Date d = Date::parse(date_str);
      Trigger t{TriggerKind::OnDailyGeneration, d.to_timestamp(), d};
      t.seed = seed;
      return run_and_record(dir, t);
    }

    if (*submit) {
      Date d = Date::parse(date_str);
      if (hints < 0) {
        store::LearnerDir ld{fs::path(dir)};
        hints = count_prior_hints(ld, item, d);
      }
      Trigger t{TriggerKind::OnSubmission, d.to_timestamp() + 8 * 3600, d};
      t.observation = parse_observation(item, passed, tests_passed, tests_total,
                                        solve_time, hints, tags,
                                        t.timestamp, abandoned);
      int rc = run_and_record(dir, t);
      if (rc != 0) return rc;
      // a graded attempt also refreshes the item's review schedule
      Trigger due{TriggerKind::OnReviewDue, t.timestamp + 1, d};
      due.observation = t.observation;
      return run_and_record(dir, due);
    }

    if (*hint) {
      Date d = Date::parse(date_str);
      store::LearnerDir ld{fs::path(dir)};
      Trigger t{TriggerKind::OnHintRequest, d.to_timestamp() + 8 * 3600, d};
      t.item_id = item;
      t.hint_history = count_prior_hints(ld, item, d);
      return run_and_record(dir, t);
    }

    if (*session) {
      Date d = Date::parse(date_str);
      Trigger t{TriggerKind::OnSessionCheck, d.to_timestamp(), d};
      return run_and_record(dir, t);
    }

    if (*review) {
      Date d = Date::parse(date_str);
      Trigger t{TriggerKind::OnReviewDue, d.to_timestamp() + 8 * 3600, d};
      if (!item.empty()) {
        t.observation = parse_observation(
            item, passed, tests_passed, tests_total, solve_time,
            hints < 0 ? 0 : hints, "", t.timestamp, false);
      }
      return run_and_record(dir, t);
    }

    if (*simulate) {
      AppConfig config =
          config_path.empty() ? AppConfig{} : AppConfig::load(config_path);
      if (days > 0) config.simulation.days = days;
      if (simulate->count("--seed")) config.simulation.seed = seed;
      ProblemBank bank = ProblemBank::load(bank_path);
      auto personas = sim::load_personas(personas_path);
      sim::SimulationOutput out = sim::run_simulation(
          personas, config.simulation.days, bank, config,
          config.simulation.seed);
      sim::write_reports(out, bank, out_dir);
      const auto& m = out.metrics;
      std::cout << "personas: " << out.logs.size()
                << "  days: " << config.simulation.days << "\n"
                << "mean mastery gain: " << m.mean_mastery_gain << "\n"
                << "success rate: " << m.success_rate_overall;
      if (m.success_rate_with_hints) {
        std::cout << " (with hints: " << *m.success_rate_with_hints << ")";
      }
      std::cout << "\ncoverage: " << m.coverage.coverage
                << "  diversity: " << m.coverage.diversity << "\n";
      if (m.recall_auroc) {
        std::cout << "recall AUROC (observed): " << *m.recall_auroc << "\n";
      }
      std::cout << "recall AUROC (consistency probe): " << m.recall_probe_auroc
                << "\n";
      if (m.brier) std::cout << "Brier: " << *m.brier << "  ECE: " << *m.ece << "\n";
      std::cout << "median trigger latency: " << m.median_trigger_latency_ms
                << " ms\nreports written to " << out_dir << "\n";
      return 0;
    }

    if (*report) {
      store::LearnerDir ld{fs::path(dir)};
      LearnerState s = ld.load_snapshot();
      std::cout << "learner " << s.learner_id << "  version " << s.version
                << "\nmean mastery: " << s.mean_mastery() << "\n";
      for (const auto& [topic, tm] : s.mastery) {
        auto u = mastery::uncertainty(tm);
        std::cout << "  " << topic << ": m=" << tm.m
                  << " (Beta mean " << u.mean << ")\n";
      }
      std::cout << "reviews scheduled: " << s.reviews.size()
                << "\nstreak: " << s.engagement.streak_days
                << "  failure streak: " << s.engagement.failure_streak << "\n";
      for (const auto& mc : s.memory.misconceptions) {
        std::cout << "  misconception #" << mc.rank << " " << mc.tag
                  << " (x" << mc.evidence_count << ")\n";
      }
      return 0;
    }

    if (*replay) {
      store::LearnerDir ld{fs::path(dir)};
      LearnerState rebuilt = ld.reconstruct();
      LearnerState snapshot = ld.load_snapshot();
      if (state_digest(rebuilt) != state_digest(snapshot)) {
        std::cerr << "snapshot does not match replayed state\n";
        return 1;
      }
      std::cout << "replay consistent at version " << rebuilt.version << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
