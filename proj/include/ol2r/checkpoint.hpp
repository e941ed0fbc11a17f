#pragma once

#include <cstdint>
#include <string>

#include "ol2r/policy.hpp"
#include "ol2r/ranker.hpp"
#include "ol2r/rng.hpp"

namespace ol2r {

/// Everything the interaction loop needs to continue mid-run: the round
/// reached, all rng stream positions, the pair history, the policy's
/// rankers/covariance and the running metric accumulators.
struct ExperimentState {
  int round = 0;  // rounds [1, round] are complete
  std::uint64_t seed = 0;
  RngStreams streams;
  History history;
  double cum_discounted = 0.0;
  double discount = 1.0;  // gamma^round
  std::int64_t cum_regret = 0;
  std::vector<double> offline_evals;
  std::optional<double> last_offline;
};

/// Binary checkpoint with a version header, the config hash and a trailing
/// checksum. Loading refuses corrupt files, version mismatches and configs
/// whose hash differs from the one recorded.
void save_checkpoint(const std::string& path, std::uint64_t config_hash,
                     const ExperimentState& state, const Policy& policy);

void load_checkpoint(const std::string& path, std::uint64_t config_hash,
                     ExperimentState& state, Policy& policy);

}  // namespace ol2r
