#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ol2r/rng.hpp"

namespace ol2r {

constexpr int kMinRelevance = 0;
constexpr int kMaxRelevance = 4;

struct Document {
  int doc_index = 0;  // position within the query's candidate list
  std::vector<double> features;
  int relevance = 0;  // graded label in [0, 4]
};

struct Query {
  std::string query_id;
  std::vector<Document> documents;

  int size() const { return static_cast<int>(documents.size()); }
  std::vector<int> labels() const;
};

enum class Normalization { none, per_query_minmax };

/// Hidden generator of a synthetic dataset; kept so evaluations can be
/// compared against the best ranking the labels admit.
struct SyntheticMeta {
  bool present = false;
  std::uint64_t seed = 0;
  std::vector<double> hidden_weights;      // w*
  std::array<double, 4> grade_edges{};     // sigmoid-score bin boundaries
};

struct Dataset {
  std::vector<Query> train;
  std::vector<Query> validation;
  std::vector<Query> test;
  int feature_dim = 0;
  Normalization normalization = Normalization::none;
  SyntheticMeta synthetic;
};

/// Parses one split of a LETOR/SVMLight text file:
///   <label> qid:<id> <index>:<value> ... [# comment]
/// One document per line, grouped by qid in order of first appearance,
/// document order preserved. Missing feature indices are zero-filled.
/// Throws DataError with the line number on malformed lines, labels
/// outside [0,4] or feature indices beyond feature_dim.
std::vector<Query> load_letor(const std::string& path, int feature_dim);

/// Writes a split back out in the same format, dense (all feature
/// indices present) so a round-trip preserves every value exactly.
void save_letor(const std::vector<Query>& split, const std::string& path);

/// Rescales each feature column to [0,1] over the query's documents;
/// constant columns become 0. Idempotent.
Query normalize_per_query(const Query& q);
void normalize_split(std::vector<Query>& split);

/// Uniform draw; consumes exactly one draw from the stream.
/// Throws DataError on an empty split.
const Query& sample_query(const std::vector<Query>& split, RandomStream& rng);

/// Synthetic dataset: features uniform in [0,1]^d, one hidden weight
/// vector per dataset, grades from binning sigmoid(x . w*) into five
/// equal-mass bins over the whole dataset. Deterministic in `seed`.
Dataset make_synthetic(int n_train, int n_validation, int n_test,
                       int docs_per_query, int feature_dim,
                       std::uint64_t seed);

/// Sidecar metadata (JSON) for synthetic datasets.
void save_synthetic_meta(const SyntheticMeta& meta, const std::string& path);
SyntheticMeta load_synthetic_meta(const std::string& path);

}  // namespace ol2r
