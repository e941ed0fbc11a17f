#include "ol2r/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ol2r/errors.hpp"

namespace ol2r {

namespace {

double gain(int label) { return std::exp2(static_cast<double>(label)) - 1.0; }

double dcg(std::span<const int> labels_in_rank_order, int k) {
  const int depth = std::min<int>(k, static_cast<int>(labels_in_rank_order.size()));
  double s = 0.0;
  for (int r = 1; r <= depth; ++r)
    s += gain(labels_in_rank_order[static_cast<std::size_t>(r - 1)]) /
         std::log2(static_cast<double>(r + 1));
  return s;
}

}  // namespace

double ndcg_at_k(std::span<const int> ranking, std::span<const int> labels,
                 int k) {
  if (k < 1) throw DataError("ndcg_at_k: k must be >= 1");
  std::vector<int> served;
  served.reserve(ranking.size());
  for (int doc : ranking) served.push_back(labels[static_cast<std::size_t>(doc)]);

  std::vector<int> ideal(labels.begin(), labels.end());
  std::sort(ideal.begin(), ideal.end(), std::greater<int>());

  const double idcg = dcg(ideal, k);
  if (idcg <= 0.0) return 0.0;
  return dcg(served, k) / idcg;
}

double cumulative_ndcg(std::span<const double> ndcg_series, double gamma) {
  if (!(gamma > 0.0) || gamma > 1.0)
    throw DataError("cumulative_ndcg: gamma must lie in (0, 1]");
  double total = 0.0;
  double discount = 1.0;
  for (double v : ndcg_series) {
    total += v * discount;
    discount *= gamma;
  }
  return total;
}

int pairwise_regret(std::span<const int> ranking,
                    std::span<const int> labels) {
  // ranking[r] = document served at position r; count pairs where the
  // lower-labeled document sits above the higher-labeled one.
  const int n = static_cast<int>(ranking.size());
  int count = 0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      const int la = labels[static_cast<std::size_t>(ranking[static_cast<std::size_t>(a)])];
      const int lb = labels[static_cast<std::size_t>(ranking[static_cast<std::size_t>(b)])];
      if (la < lb) ++count;
    }
  return count;
}

int label_distinct_pairs(std::span<const int> labels) {
  const int n = static_cast<int>(labels.size());
  int count = 0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (labels[static_cast<std::size_t>(a)] != labels[static_cast<std::size_t>(b)])
        ++count;
  return count;
}

std::vector<int> rank_by_scores(std::span<const double> scores) {
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
  });
  return order;
}

double offline_eval(const QueryScorer& scorer, std::span<const Query> split,
                    int k) {
  if (split.empty()) throw DataError("offline_eval: empty split");
  double total = 0.0;
  std::vector<double> scores;
  for (const Query& q : split) {
    scores.assign(static_cast<std::size_t>(q.size()), 0.0);
    scorer(q, scores);
    const auto ranking = rank_by_scores(scores);
    const auto labels = q.labels();
    total += ndcg_at_k(ranking, labels, k);
  }
  return total / static_cast<double>(split.size());
}

double offline_eval(const Ranker& r, std::span<const Query> split, int k) {
  return offline_eval(
      [&r](const Query& q, std::span<double> scores) {
        for (int i = 0; i < q.size(); ++i)
          scores[static_cast<std::size_t>(i)] =
              score(r, q.documents[static_cast<std::size_t>(i)].features);
      },
      split, k);
}

}  // namespace ol2r
