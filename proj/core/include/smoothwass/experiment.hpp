#ifndef SMOOTHWASS_EXPERIMENT_HPP_
#define SMOOTHWASS_EXPERIMENT_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "smoothwass/rng.hpp"

namespace smoothwass {

struct ReplicateRow {
  int id = 0;
  std::string seed;
  std::vector<double> values;  // aligned with ReplicationReport::columns
  bool ok = true;
  std::string error;
};

// Output of a replicated Monte Carlo experiment.  The summary block is a
// pure function of (columns, rows) so it can be recomputed bit-exactly from
// the persisted rows.
struct ReplicationReport {
  std::vector<std::string> columns;
  std::vector<ReplicateRow> rows;
  nlohmann::json summary;
  nlohmann::json metadata;
  bool partial = false;

  static nlohmann::json summarize(const std::vector<std::string>& columns,
                                  const std::vector<ReplicateRow>& rows);

  // Values of one column over the successful rows, in replicate order.
  std::vector<double> column(const std::string& name) const;

  std::string to_csv() const;
  void write_csv(const std::string& path) const;
  void write_json(const std::string& path) const;
};

struct ExperimentConfig {
  std::string command;
  nlohmann::json params;
  std::uint64_t master_seed = 1;
  int R = 1;
  int parallelism = 1;
  std::string out_prefix;  // empty: nothing written

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  // Hash of (command, params, master_seed, R); independent of parallelism
  // and output paths, matching the determinism contract.
  std::uint64_t config_hash() const;
};

using ReplicateFn = std::function<std::vector<double>(int rep, const SeedPath&)>;

// Runs fn over R replicates (parallel up to `parallelism`), each derived
// from root.child("rep").child(r).  Failures are recorded per row and mark
// the report partial; row order is by replicate id regardless of thread
// interleaving.
ReplicationReport run_replications(const std::vector<std::string>& columns,
                                   int R, int parallelism,
                                   const SeedPath& root, const ReplicateFn& fn);

// Dispatches on cfg.command; see the command registry in experiment.cpp.
// Writes <out>.csv and <out>.json when an output prefix is configured.
ReplicationReport run_experiment(const ExperimentConfig& cfg);

std::vector<std::string> experiment_commands();

}  // namespace smoothwass

#endif  // SMOOTHWASS_EXPERIMENT_HPP_
