#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ol2r/dataset.hpp"
#include "ol2r/ranker.hpp"

namespace ol2r {

/// DCG with exponential gain (2^label - 1) and log2(rank + 1) discount over
/// the first min(k, V) positions, normalized by the ideal DCG over the same
/// labels. A query whose labels are all zero scores 0.
double ndcg_at_k(std::span<const int> ranking, std::span<const int> labels,
                 int k);

/// Discounted sum of a per-round NDCG series: sum_t series[t] * gamma^t.
double cumulative_ndcg(std::span<const double> ndcg_series, double gamma);

/// Number of document pairs with distinct labels served in the wrong
/// order. Equal-label pairs never count.
int pairwise_regret(std::span<const int> ranking, std::span<const int> labels);

/// Largest attainable pairwise regret: the number of label-distinct pairs.
int label_distinct_pairs(std::span<const int> labels);

using QueryScorer =
    std::function<void(const Query&, std::span<double> scores)>;

/// Mean NDCG@k over a split, ranking purely by score (stable on ties).
double offline_eval(const QueryScorer& scorer, std::span<const Query> split,
                    int k);
double offline_eval(const Ranker& r, std::span<const Query> split, int k);

/// Ranks a query's documents by descending score; ties keep document order.
std::vector<int> rank_by_scores(std::span<const double> scores);

struct RoundMetrics {
  int round = 0;
  std::string query_id;
  double online_ndcg = 0.0;
  double discounted_online = 0.0;
  double cum_online_ndcg = 0.0;
  int regret_pairs = 0;
  std::int64_t cum_regret = 0;
  std::optional<double> offline_ndcg10;
  int n_uncertain = 0;
  std::int64_t t_partition_us = 0;
  std::int64_t t_topo_us = 0;
  std::int64_t t_train_us = 0;
  std::int64_t t_cov_us = 0;
};

}  // namespace ol2r
