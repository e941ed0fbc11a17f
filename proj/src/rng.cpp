#include "ol2r/rng.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace ol2r {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::size_t RandomStream::uniform_index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
  return static_cast<std::size_t>(next_u64() % n);
}

double RandomStream::normal(double mean, double stddev) {
  // (0, 1] so the log argument never vanishes.
  double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  double r = std::sqrt(-2.0 * std::log(u1));
  return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
}

std::string RandomStream::serialize() const {
  std::ostringstream os;
  os << engine_;
  return os.str();
}

void RandomStream::deserialize(const std::string& text) {
  std::istringstream is(text);
  is >> engine_;
  if (!is) throw std::runtime_error("RandomStream: bad serialized state");
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view stream_name,
                          std::uint64_t index) {
  return splitmix64(splitmix64(master ^ fnv1a(stream_name)) ^
                    splitmix64(index + 1));
}

RngStreams::RngStreams(std::uint64_t master_seed, int n_members,
                       const std::vector<std::uint64_t>& member_seed_overrides)
    : query_sampling_(derive_seed(master_seed, "query_sampling")),
      clicks_(derive_seed(master_seed, "clicks")),
      topo_tiebreak_(derive_seed(master_seed, "topo_tiebreak")),
      init_(derive_seed(master_seed, "init")) {
  perturbation_.reserve(static_cast<std::size_t>(n_members));
  for (int n = 0; n < n_members; ++n) {
    std::uint64_t s =
        n < static_cast<int>(member_seed_overrides.size())
            ? derive_seed(member_seed_overrides[static_cast<std::size_t>(n)],
                          "perturbation_override")
            : derive_seed(master_seed, "perturbation",
                          static_cast<std::uint64_t>(n));
    perturbation_.emplace_back(s);
  }
}

RandomStream& RngStreams::perturbation(int member) {
  return perturbation_.at(static_cast<std::size_t>(member));
}

std::string RngStreams::serialize() const {
  std::ostringstream os;
  os << perturbation_.size() << '\n';
  os << query_sampling_.serialize() << '\n';
  os << clicks_.serialize() << '\n';
  os << topo_tiebreak_.serialize() << '\n';
  os << init_.serialize() << '\n';
  for (const auto& p : perturbation_) os << p.serialize() << '\n';
  return os.str();
}

void RngStreams::deserialize(const std::string& text) {
  std::istringstream is(text);
  std::size_t n = 0;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("RngStreams: empty");
  n = std::stoull(line);
  auto read_stream = [&is](RandomStream& s) {
    std::string l;
    if (!std::getline(is, l))
      throw std::runtime_error("RngStreams: truncated state");
    s.deserialize(l);
  };
  read_stream(query_sampling_);
  read_stream(clicks_);
  read_stream(topo_tiebreak_);
  read_stream(init_);
  perturbation_.assign(n, RandomStream());
  for (auto& p : perturbation_) read_stream(p);
}

}  // namespace ol2r
