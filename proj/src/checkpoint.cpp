#include "ol2r/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "ol2r/errors.hpp"
#include "ol2r/serialize.hpp"

namespace ol2r {

std::uint64_t fnv1a_hash(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

constexpr char kMagic[8] = {'O', 'L', '2', 'R', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

void save_history(BinaryWriter& w, const History& h) {
  const auto rounds = h.rounds();
  w.put_u64(rounds.size());
  for (const auto& round : rounds) {
    w.put_u32(static_cast<std::uint32_t>(round.round));
    w.put_u64(round.pairs.size());
    for (const auto& p : round.pairs) {
      w.put_u32(static_cast<std::uint32_t>(p.round));
      w.put_double(p.label);
      w.put_doubles(p.features_i);
      w.put_doubles(p.features_j);
    }
  }
}

History restore_history(BinaryReader& r) {
  History h;
  const std::uint64_t n_rounds = r.get_u64();
  for (std::uint64_t i = 0; i < n_rounds; ++i) {
    const int round = static_cast<int>(r.get_u32());
    const std::uint64_t n_pairs = r.get_u64();
    std::vector<PairObservation> pairs(n_pairs);
    for (auto& p : pairs) {
      p.round = static_cast<int>(r.get_u32());
      p.label = r.get_double();
      p.features_i = r.get_doubles();
      p.features_j = r.get_doubles();
    }
    h.append(round, std::move(pairs));
  }
  return h;
}

}  // namespace

void save_checkpoint(const std::string& path, std::uint64_t config_hash,
                     const ExperimentState& state, const Policy& policy) {
  BinaryWriter payload;
  payload.put_u64(config_hash);
  payload.put_u64(state.seed);
  payload.put_u32(static_cast<std::uint32_t>(state.round));
  payload.put_string(state.streams.serialize());
  save_history(payload, state.history);
  payload.put_double(state.cum_discounted);
  payload.put_double(state.discount);
  payload.put_i64(state.cum_regret);
  payload.put_doubles(state.offline_evals);
  payload.put_u32(state.last_offline.has_value() ? 1u : 0u);
  payload.put_double(state.last_offline.value_or(0.0));
  policy.save(payload);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot open checkpoint file " + path);
  out.write(kMagic, sizeof(kMagic));
  const std::uint32_t version = kVersion;
  out.write(reinterpret_cast<const char*>(&version), sizeof(version));
  const std::uint64_t size = payload.buffer().size();
  out.write(reinterpret_cast<const char*>(&size), sizeof(size));
  out.write(payload.buffer().data(),
            static_cast<std::streamsize>(payload.buffer().size()));
  const std::uint64_t checksum = fnv1a_hash(payload.buffer());
  out.write(reinterpret_cast<const char*>(&checksum), sizeof(checksum));
  if (!out) throw CheckpointError("checkpoint write failed for " + path);
}

void load_checkpoint(const std::string& path, std::uint64_t config_hash,
                     ExperimentState& state, Policy& policy) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string blob = ss.str();

  const std::size_t header = sizeof(kMagic) + sizeof(std::uint32_t) +
                             sizeof(std::uint64_t);
  if (blob.size() < header + sizeof(std::uint64_t))
    throw CheckpointError("checkpoint file truncated");
  if (std::memcmp(blob.data(), kMagic, sizeof(kMagic)) != 0)
    throw CheckpointError("not a checkpoint file");
  std::uint32_t version = 0;
  std::memcpy(&version, blob.data() + sizeof(kMagic), sizeof(version));
  if (version != kVersion)
    throw CheckpointError("checkpoint version mismatch: file has " +
                          std::to_string(version) + ", expected " +
                          std::to_string(kVersion));
  std::uint64_t size = 0;
  std::memcpy(&size, blob.data() + sizeof(kMagic) + sizeof(version),
              sizeof(size));
  if (blob.size() != header + size + sizeof(std::uint64_t))
    throw CheckpointError("checkpoint size mismatch");
  const std::string_view payload(blob.data() + header, size);
  std::uint64_t checksum = 0;
  std::memcpy(&checksum, blob.data() + header + size, sizeof(checksum));
  if (checksum != fnv1a_hash(payload))
    throw CheckpointError("checkpoint checksum mismatch (corrupt file)");

  BinaryReader r(payload);
  const std::uint64_t stored_hash = r.get_u64();
  if (stored_hash != config_hash)
    throw CheckpointError(
        "checkpoint was written under a different configuration");

  // Parse into a scratch state first so a malformed payload cannot leave
  // the caller half-loaded.
  ExperimentState scratch;
  scratch.seed = r.get_u64();
  scratch.round = static_cast<int>(r.get_u32());
  scratch.streams.deserialize(r.get_string());
  scratch.history = restore_history(r);
  scratch.cum_discounted = r.get_double();
  scratch.discount = r.get_double();
  scratch.cum_regret = r.get_i64();
  scratch.offline_evals = r.get_doubles();
  const bool has_offline = r.get_u32() != 0;
  const double last_offline = r.get_double();
  if (has_offline) scratch.last_offline = last_offline;
  policy.restore(r);
  if (!r.exhausted())
    throw CheckpointError("checkpoint has trailing bytes");
  state = std::move(scratch);
}

}  // namespace ol2r
