// Append-only run record stored as JSON Lines: one config line, then trial
// and epoch lines in the order they happen.
#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "swarmbo/convergence.hpp"
#include "swarmbo/gp.hpp"
#include "swarmbo/params.hpp"

namespace swarmbo {

struct TrialEntry {
  std::size_t index = 0;
  std::size_t epoch = 0;  // 0 for the initial design
  ParamVector params;
  double loss_hairpin = 0.0;
  double loss_tunnel = 0.0;
  double y = 0.0;
  std::uint64_t seed = 0;
  double wall_time = 0.0;  // s spent evaluating

  /// Equality ignores wall_time.
  friend bool operator==(const TrialEntry &a, const TrialEntry &b);
};

struct EpochEntry {
  EpochMetrics metrics;
  double batch_max_var = 0.0;  // this epoch only, before the running max
  GPHyperparams hyper;
  double y_mean = 0.0;
  double y_std = 1.0;
  std::optional<double> acq_value;

  friend bool operator==(const EpochEntry &, const EpochEntry &) = default;
};

struct RunRecord {
  nlohmann::json config = nlohmann::json::object();
  std::vector<TrialEntry> trials;
  std::vector<EpochEntry> epochs;

  std::size_t epochs_completed() const { return epochs.size(); }
  Dataset dataset() const;
  std::vector<ParamVector> points() const;
  /// Index of the trial with the largest y; throws on an empty record.
  std::size_t incumbent() const;

  friend bool operator==(const RunRecord &, const RunRecord &) = default;
};

nlohmann::json trial_to_json(const TrialEntry &t);
TrialEntry trial_from_json(const nlohmann::json &j);
nlohmann::json epoch_to_json(const EpochEntry &e);
EpochEntry epoch_from_json(const nlohmann::json &j);

/// Appends JSON lines to a record file, flushing after each line.
class RecordWriter {
public:
  /// Truncates and writes the whole record when `rewrite`, else appends.
  RecordWriter(const std::string &path, const RunRecord &existing, bool rewrite);
  ~RecordWriter();
  RecordWriter(const RecordWriter &) = delete;
  RecordWriter &operator=(const RecordWriter &) = delete;

  void append(const TrialEntry &t);
  void append(const EpochEntry &e);

private:
  void write_line(const nlohmann::json &j);
  std::string path_;
  std::FILE *file_ = nullptr;
};

/// Reads a record. An unparsable final line (interrupted write) is dropped,
/// as are trials of an epoch whose epoch line never arrived.
RunRecord read_record(const std::string &path);
/// Same, and reports whether anything was dropped.
RunRecord read_record(const std::string &path, bool *truncated);

void write_record(const RunRecord &record, const std::string &path);

}  // namespace swarmbo
