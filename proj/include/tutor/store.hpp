#pragma once

// Event-sourced persistence: append-only JSONL audit log plus canonical
// snapshots, one directory per learner.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tutor/config.hpp"
#include "tutor/orchestrator.hpp"
#include "tutor/proposal.hpp"

namespace tutor {
namespace store {

struct EventRecord {
  std::uint64_t version = 0;
  std::string timestamp;  // RFC 3339
  std::string trigger_kind;
  nlohmann::json payload;          // serialized Trigger
  nlohmann::json accepted_deltas;  // JSON array
  nlohmann::json rejected;         // JSON array with reasons
  std::string state_digest;        // 64 lowercase hex chars
  double latency_ms = 0.0;

  nlohmann::json to_json() const;
  static EventRecord from_json(const nlohmann::json&);
  static EventRecord from_audit(const AuditRecord&);
};

// Appends one line; refuses version gaps. Flushes before returning.
void append_event(const std::filesystem::path& log_path,
                  const EventRecord& record);

// Complete records up to the last parseable line; a truncated trailing
// line is dropped and reported via `truncated`.
std::vector<EventRecord> read_events(const std::filesystem::path& log_path,
                                     bool* truncated = nullptr);

struct SnapshotBytes {
  std::string bytes;
  std::string digest;
};

SnapshotBytes write_snapshot(const LearnerState& state);

// Directory layout: <dir>/snapshot.json, snapshot.digest, events.jsonl,
// config.json, bank.json. One writer per directory (advisory lock file).
class LearnerDir {
 public:
  explicit LearnerDir(std::filesystem::path dir);

  static LearnerDir create(std::filesystem::path dir,
                           const LearnerState& initial,
                           const ProblemBank& bank, const AppConfig& config,
                           const std::string& bank_source_path);

  LearnerState load_snapshot() const;
  AppConfig load_config() const;
  ProblemBank load_bank() const;
  std::vector<EventRecord> load_events(bool* truncated = nullptr) const;

  void record(const AuditRecord& record, const LearnerState& new_state);

  // Replays the full event log from the initial snapshot and verifies
  // every recorded digest. Throws on divergence, naming the version.
  LearnerState reconstruct() const;

  const std::filesystem::path& path() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

class WriteLock {
 public:
  explicit WriteLock(const std::filesystem::path& dir);
  ~WriteLock();
  WriteLock(const WriteLock&) = delete;
  WriteLock& operator=(const WriteLock&) = delete;

 private:
  std::filesystem::path lock_file_;
  bool held_ = false;
};

}  // namespace store
}  // namespace tutor
