#pragma once

#include <cstdint>
#include <memory>
#include <span>

#include "ol2r/config.hpp"
#include "ol2r/exploration.hpp"
#include "ol2r/serialize.hpp"

namespace ol2r {

struct ServeResult {
  std::vector<int> ranking;  // full permutation over the query's documents
  std::size_t n_certain = 0;
  std::size_t n_uncertain = 0;
  int removed_edges = 0;
  std::int64_t t_partition_us = 0;
  std::int64_t t_topo_us = 0;
};

/// One exploration policy instance: owns its rankers (and covariance state
/// where applicable) across rounds. The harness drives it serve ->
/// observe -> update once per round.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual ServeResult serve(const Query& q, RngStreams& streams) = 0;

  /// Feeds the round's new observations; covariance policies accumulate
  /// pair vectors here (at the parameters that served the round). Returns
  /// the covariance-phase time in microseconds.
  virtual std::int64_t observe(const Query& q,
                               std::span<const PairObservation> pairs) = 0;

  /// Retrains on the (windowed) history; perturbed policies draw fresh
  /// noise from their member streams. Returns the training time in
  /// microseconds.
  virtual std::int64_t update(const History& history, RngStreams& streams) = 0;

  /// Offline scoring of a query (no exploration).
  virtual void score_query(const Query& q, std::span<double> out) const = 0;

  virtual void save(BinaryWriter& w) const = 0;
  virtual void restore(BinaryReader& r) = 0;
};

/// Builds the policy the config names; rankers are initialized from the
/// init stream (one derived spur per ensemble member).
std::unique_ptr<Policy> make_policy(const ExperimentConfig& cfg,
                                    RngStreams& streams);

}  // namespace ol2r
