#include "tutor/store.hpp"

#include <fstream>
#include <sstream>

#include "tutor/canonical_json.hpp"
#include "tutor/serialize.hpp"

namespace tutor {
namespace store {

namespace fs = std::filesystem;
using nlohmann::json;

json EventRecord::to_json() const {
  json j;
  j["version"] = version;
  j["timestamp"] = timestamp;
  j["trigger_kind"] = trigger_kind;
  j["payload"] = payload;
  j["accepted_deltas"] = accepted_deltas;
  j["rejected"] = rejected;
  j["state_digest"] = state_digest;
  j["latency_ms"] = latency_ms;
  return j;
}

EventRecord EventRecord::from_json(const json& j) {
  EventRecord r;
  r.version = j.at("version").get<std::uint64_t>();
  r.timestamp = j.at("timestamp").get<std::string>();
  r.trigger_kind = j.at("trigger_kind").get<std::string>();
  r.payload = j.at("payload");
  r.accepted_deltas = j.at("accepted_deltas");
  r.rejected = j.at("rejected");
  r.state_digest = j.at("state_digest").get<std::string>();
  r.latency_ms = j.at("latency_ms").get<double>();
  return r;
}

EventRecord EventRecord::from_audit(const AuditRecord& a) {
  EventRecord r;
  r.version = a.version_after;
  r.timestamp = format_rfc3339(a.trigger.timestamp);
  r.trigger_kind = to_string(a.trigger.kind);
  r.payload = tutor::to_json(a.trigger);
  r.accepted_deltas = json::array();
  for (const auto& p : a.accepted) r.accepted_deltas.push_back(tutor::to_json(p));
  r.rejected = json::array();
  for (const auto& rp : a.rejected) {
    json e = tutor::to_json(rp.proposal);
    e["reason"] = rp.reason;
    r.rejected.push_back(std::move(e));
  }
  r.state_digest = a.state_digest_after;
  r.latency_ms = a.wall_time_ms;
  return r;
}

namespace {

std::optional<std::uint64_t> last_version_in_log(const fs::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string line, last_complete;
  while (std::getline(in, line)) {
    if (!line.empty()) {
      try {
        (void)json::parse(line);
        last_complete = line;
      } catch (...) {
        break;  // truncated tail
      }
    }
  }
  if (last_complete.empty()) return std::nullopt;
  return json::parse(last_complete).at("version").get<std::uint64_t>();
}

}  // namespace

void append_event(const fs::path& log_path, const EventRecord& record) {
  auto last = last_version_in_log(log_path);
  if (last && record.version != *last + 1) {
    throw TutorError("event log gap: last version " + std::to_string(*last) +
                     ", appending " + std::to_string(record.version));
  }
  std::ofstream out(log_path, std::ios::app);
  if (!out) throw TutorError("cannot open event log: " + log_path.string());
  out << record.to_json().dump() << "\n";
  out.flush();
  if (!out) throw TutorError("event log write failed");
}

std::vector<EventRecord> read_events(const fs::path& log_path,
                                     bool* truncated) {
  if (truncated) *truncated = false;
  std::vector<EventRecord> out;
  std::ifstream in(log_path);
  if (!in) return out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(EventRecord::from_json(json::parse(line)));
    } catch (...) {
      // recoverable up to the last complete line
      if (truncated) *truncated = true;
      break;
    }
  }
  return out;
}

SnapshotBytes write_snapshot(const LearnerState& state) {
  SnapshotBytes snap;
  snap.bytes = canonical_dump(tutor::to_json(state));
  snap.digest = sha256_hex(snap.bytes);
  return snap;
}

WriteLock::WriteLock(const fs::path& dir) : lock_file_(dir / "lock") {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (fs::exists(lock_file_)) {
    throw TutorError("learner directory is locked by another writer: " +
                     lock_file_.string());
  }
  std::ofstream out(lock_file_);
  if (!out) throw TutorError("cannot create lock file");
  held_ = true;
}

WriteLock::~WriteLock() {
  if (held_) {
    std::error_code ec;
    fs::remove(lock_file_, ec);
  }
}

LearnerDir::LearnerDir(fs::path dir) : dir_(std::move(dir)) {
  if (!fs::exists(dir_ / "snapshot.json")) {
    throw TutorError("not a learner directory: " + dir_.string());
  }
}

LearnerDir LearnerDir::create(fs::path dir, const LearnerState& initial,
                              const ProblemBank& bank, const AppConfig& config,
                              const std::string& bank_source_path) {
  fs::create_directories(dir);
  if (fs::exists(dir / "snapshot.json")) {
    throw TutorError("learner directory already initialized: " + dir.string());
  }
  (void)bank;

  SnapshotBytes snap = write_snapshot(initial);
  for (const char* name : {"snapshot.json", "initial.json"}) {
    std::ofstream out(dir / name);
    out << snap.bytes;
    if (!out) throw TutorError("cannot write snapshot");
  }
  {
    std::ofstream out(dir / "snapshot.digest");
    out << snap.digest << "\n";
  }
  config.save((dir / "config.json").string());
  fs::copy_file(bank_source_path, dir / "bank.json",
                fs::copy_options::overwrite_existing);
  { std::ofstream out(dir / "events.jsonl"); }
  return LearnerDir(std::move(dir));
}

LearnerState LearnerDir::load_snapshot() const {
  std::ifstream in(dir_ / "snapshot.json");
  json j;
  in >> j;
  return state_from_json(j);
}

AppConfig LearnerDir::load_config() const {
  return AppConfig::load((dir_ / "config.json").string());
}

ProblemBank LearnerDir::load_bank() const {
  return ProblemBank::load((dir_ / "bank.json").string());
}

std::vector<EventRecord> LearnerDir::load_events(bool* truncated) const {
  return read_events(dir_ / "events.jsonl", truncated);
}

void LearnerDir::record(const AuditRecord& audit,
                        const LearnerState& new_state) {
  append_event(dir_ / "events.jsonl", EventRecord::from_audit(audit));
  SnapshotBytes snap = write_snapshot(new_state);
  if (snap.digest != audit.state_digest_after) {
    throw TutorError("snapshot digest does not match audit record");
  }
  {
    std::ofstream out(dir_ / "snapshot.json", std::ios::trunc);
    out << snap.bytes;
  }
  {
    std::ofstream out(dir_ / "snapshot.digest", std::ios::trunc);
    out << snap.digest << "\n";
  }
}

LearnerState LearnerDir::reconstruct() const {
  std::ifstream in(dir_ / "initial.json");
  if (!in) throw TutorError("missing initial snapshot");
  json j;
  in >> j;
  LearnerState initial = state_from_json(j);

  auto events = load_events();
  std::vector<Trigger> triggers;
  std::vector<std::string> digests;
  for (const auto& e : events) {
    triggers.push_back(trigger_from_json(e.payload));
    digests.push_back(e.state_digest);
  }

  AppConfig config = load_config();
  ProblemBank bank = load_bank();
  ReplayResult res =
      Orchestrator::replay(std::move(initial), bank, config, triggers, digests);
  if (!res.ok()) {
    throw TutorError("replay divergence at version " +
                     std::to_string(res.divergence->version) + ": expected " +
                     res.divergence->expected_digest + ", got " +
                     res.divergence->actual_digest);
  }
  return std::move(res.state);
}

}  // namespace store
}  // namespace tutor
