#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ol2r {

/// Exploration-cost micro-benchmark: runs each policy through the full
/// interaction loop on a synthetic dataset and reports median per-round
/// phase timings near the final round.
struct BenchConfig {
  std::vector<int> widths = {16};
  int rounds = 500;
  /// Tokens: ci_full | ci_diag | ensemble:<N>
  std::vector<std::string> policies = {"ci_full", "ci_diag", "ensemble:2",
                                       "ensemble:1"};
  int feature_dim = 136;
  int docs_per_query = 10;
  int n_queries = 50;
  std::uint64_t dataset_seed = 99;
  std::uint64_t seed = 1;
  double lambda = 0.1;
  double learning_rate = 0.01;
  int epochs = 2;
  /// Training window keeps per-round cost flat; the covariance still
  /// accumulates every observed pair.
  int history_window = 100;
  double nu2 = 0.1;
  double alpha = 0.1;
  std::string click_profile = "perfect";
  int median_window = 101;
};

struct BenchPolicyResult {
  std::string policy;
  int width = 0;
  std::int64_t partition_us = 0;
  std::int64_t topo_us = 0;
  std::int64_t cov_us = 0;
  std::int64_t train_us = 0;

  std::int64_t exploration_us() const { return partition_us + cov_us; }
};

struct BenchReport {
  BenchConfig config;
  std::vector<BenchPolicyResult> results;
  /// Exploration cost must order full-CI >> diag-CI >= ensemble(2) >
  /// ensemble(1) with at least a 10x gap between full-CI and ensemble(2).
  bool ordering_ok = false;
  std::vector<std::string> notes;

  std::string table() const;
};

/// Parses the [bench] section of a config file (defaults when absent).
BenchConfig parse_bench_config(const std::string& text);

BenchReport run_bench(const BenchConfig& cfg);

}  // namespace ol2r
