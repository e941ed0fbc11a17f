#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ol2r/config.hpp"
#include "ol2r/metrics.hpp"

namespace ol2r {

inline constexpr const char* kVersionString = "0.1.0";

struct RunSummary {
  double cumulative_ndcg = 0.0;       // discounted online sum over all rounds
  std::int64_t total_regret = 0;
  double mean_offline_ndcg_last10 = 0.0;
  std::optional<double> final_validation_ndcg10;
  bool failed = false;
  std::string error;
};

struct RunRecord {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  int first_round = 1;  // > 1 for resumed runs; rows cover [first_round, T]
  std::vector<RoundMetrics> rows;
  RunSummary summary;
};

struct RunOptions {
  /// Write a checkpoint after this round (in addition to any
  /// checkpoint_interval from the config).
  int checkpoint_at_round = 0;
  std::string checkpoint_path;
  /// Resume from this checkpoint instead of starting fresh.
  std::string resume_from;
};

/// Executes the full interaction loop for `rounds` rounds: sample a query,
/// serve a ranking, simulate clicks, extract preference pairs, update the
/// policy. Deterministic: (config, seed) fixes every emitted byte.
RunRecord run_experiment(const ExperimentConfig& cfg, std::uint64_t seed,
                         const RunOptions& options = {});

/// Loads (or synthesizes) the dataset the config describes, normalization
/// applied.
Dataset load_dataset(const ExperimentConfig& cfg);

/// CSV schema:
/// round,query_id,online_ndcg,discounted_online,cum_online_ndcg,regret_pairs,
/// cum_regret,offline_ndcg10,n_uncertain,t_partition_us,t_topo_us,t_train_us,t_cov_us
extern const char* kCsvHeader;

void emit_csv(const RunRecord& record, const std::string& path,
              bool emit_timings);
std::string csv_text(const RunRecord& record, bool emit_timings);

/// Per-run sidecar with the config hash, canonical config and versions.
void emit_run_metadata(const ExperimentConfig& cfg, const RunRecord& record,
                       const std::string& path);

struct SweepEntry {
  ExperimentConfig config;
  std::vector<RunRecord> records;  // one per seed
  double mean_validation_ndcg = 0.0;
  bool failed = false;
  std::string error;
};

struct SweepResult {
  std::vector<SweepEntry> entries;
  int best_index = -1;
};

/// Cartesian product of the sweep grids x seeds; selection maximizes the
/// mean validation NDCG@10 at the final evaluation, skipping failed runs.
/// Selection does not depend on execution order.
SweepResult run_sweep(const ExperimentConfig& base);

}  // namespace ol2r
