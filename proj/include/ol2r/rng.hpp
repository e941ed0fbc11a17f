#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace ol2r {

/// One deterministic random substream. Every draw reduces to raw
/// mt19937_64 output so the stream state serializes exactly and replaying
/// a seed reproduces the identical sequence. Draw budget per call is part
/// of the contract (checkpoint/resume depends on it):
///   uniform01 / uniform_index / bernoulli : one engine draw
///   normal                                : two engine draws (no cache)
class RandomStream {
 public:
  RandomStream() = default;
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform index in [0, n). Modulo reduction keeps the draw count at
  /// exactly one; the bias is O(n / 2^64).
  std::size_t uniform_index(std::size_t n);

  bool bernoulli(double p) { return uniform01() < p; }

  /// Box-Muller, stateless variant.
  double normal(double mean = 0.0, double stddev = 1.0);

  std::string serialize() const;
  void deserialize(const std::string& text);

  bool operator==(const RandomStream& other) const {
    return engine_ == other.engine_;
  }

 private:
  std::mt19937_64 engine_;
};

/// Mixes a master seed with a stream name and index into an independent
/// substream seed.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream_name,
                          std::uint64_t index = 0);

/// Named substreams for one experiment run. Streams never alias: each
/// purpose (and each ensemble member) owns its own engine, so consuming
/// one stream cannot shift draws in another.
class RngStreams {
 public:
  RngStreams() = default;
  /// member_seed_overrides, when non-empty, pins the perturbation seed of
  /// member n to overrides[n]; extra entries beyond n_members are unused.
  RngStreams(std::uint64_t master_seed, int n_members,
             const std::vector<std::uint64_t>& member_seed_overrides = {});

  RandomStream& query_sampling() { return query_sampling_; }
  RandomStream& clicks() { return clicks_; }
  RandomStream& topo_tiebreak() { return topo_tiebreak_; }
  RandomStream& init() { return init_; }
  RandomStream& perturbation(int member);
  int member_count() const { return static_cast<int>(perturbation_.size()); }

  std::string serialize() const;
  void deserialize(const std::string& text);

 private:
  RandomStream query_sampling_;
  RandomStream clicks_;
  RandomStream topo_tiebreak_;
  RandomStream init_;
  std::vector<RandomStream> perturbation_;
};

}  // namespace ol2r
