#include "ol2r/exploration.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "ol2r/errors.hpp"

namespace ol2r {

CertaintyPartition ensemble_partition(const Ensemble& e, const Query& q) {
  if (e.size() < 1) throw DataError("ensemble_partition: empty ensemble");
  const int n = q.size();
  CertaintyPartition out;
  out.n_docs = n;

  // Score once per member per document; pair logits are score differences.
  std::vector<double> scores(static_cast<std::size_t>(e.size()) * n);
  for (int m = 0; m < e.size(); ++m)
    for (int i = 0; i < n; ++i)
      scores[static_cast<std::size_t>(m) * n + i] =
          score(e.members[static_cast<std::size_t>(m)],
                q.documents[static_cast<std::size_t>(i)].features);

  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double min_logit = std::numeric_limits<double>::infinity();
      double max_logit = -std::numeric_limits<double>::infinity();
      for (int m = 0; m < e.size(); ++m) {
        const double l = scores[static_cast<std::size_t>(m) * n + i] -
                         scores[static_cast<std::size_t>(m) * n + j];
        min_logit = std::min(min_logit, l);
        max_logit = std::max(max_logit, l);
      }
      if (min_logit > 0.0) {
        out.certain.push_back({i, j, sigmoid(min_logit) - 0.5});
      } else if (max_logit < 0.0) {
        out.certain.push_back({j, i, 0.5 - sigmoid(max_logit)});
      } else {
        out.uncertain.emplace_back(i, j);
      }
    }
  }
  return out;
}

CovarianceState::CovarianceState(CovarianceMode mode, int dim, double lambda,
                                 int check_interval)
    : mode_(mode), dim_(dim), lambda_(lambda),
      check_interval_(check_interval) {
  if (dim <= 0) throw CovarianceError("CovarianceState: dim must be positive");
  if (!(lambda > 0.0))
    throw CovarianceError("CovarianceState: lambda must be positive");
  if (mode == CovarianceMode::full) {
    if (dim > kFullCovarianceGate)
      throw GateError(
          "full covariance refused: " + std::to_string(dim) +
          " parameters exceed the gate of " +
          std::to_string(kFullCovarianceGate) +
          "; use diagonal mode or ensemble exploration");
    a_ = DenseMatrix::identity_scaled(dim, lambda);
    a_inv_ = DenseMatrix::identity_scaled(dim, 1.0 / lambda);
  } else {
    diag_.assign(static_cast<std::size_t>(dim), lambda);
  }
}

void CovarianceState::update(std::span<const double> v) {
  if (static_cast<int>(v.size()) != dim_)
    throw CovarianceError("CovarianceState::update: dimension mismatch");
  for (double x : v)
    if (!std::isfinite(x))
      throw CovarianceError("CovarianceState::update: non-finite vector");
  if (mode_ == CovarianceMode::full) {
    rank_one_update(a_, v);
    sherman_morrison_update(a_inv_, v);
    ++since_check_;
    maybe_recheck();
  } else {
    for (std::size_t k = 0; k < diag_.size(); ++k) diag_[k] += v[k] * v[k];
  }
  ++update_count_;
}

void CovarianceState::maybe_recheck() {
  if (check_interval_ <= 0 || since_check_ < check_interval_) return;
  since_check_ = 0;
  if (inverse_residual(a_, a_inv_) <= 1e-6) return;
  // Drifted: rebuild from scratch once, then give up if still bad.
  a_inv_ = cholesky_inverse(a_);
  if (inverse_residual(a_, a_inv_) > 1e-6)
    throw CovarianceError(
        "covariance inverse unrecoverable; lambda is likely too small");
}

double CovarianceState::width_sq(std::span<const double> v) const {
  if (static_cast<int>(v.size()) != dim_)
    throw CovarianceError("CovarianceState::width_sq: dimension mismatch");
  if (mode_ == CovarianceMode::full) return quadform(a_inv_, v);
  double s = 0.0;
  for (std::size_t k = 0; k < diag_.size(); ++k) s += v[k] * v[k] / diag_[k];
  return s;
}

double CovarianceState::log_det() const {
  if (mode_ == CovarianceMode::full) return cholesky_logdet(a_);
  double s = 0.0;
  for (double d : diag_) s += std::log(d);
  return s;
}

double CovarianceState::log_det_ratio() const {
  return log_det() - dim_ * std::log(lambda_);
}

double CovarianceState::inverse_error() const {
  if (mode_ != CovarianceMode::full) return 0.0;
  return inverse_residual(a_, a_inv_);
}

void CovarianceState::save(BinaryWriter& w) const {
  w.put_u32(mode_ == CovarianceMode::full ? 0u : 1u);
  w.put_u32(static_cast<std::uint32_t>(dim_));
  w.put_double(lambda_);
  w.put_u32(static_cast<std::uint32_t>(check_interval_));
  w.put_i64(update_count_);
  w.put_u32(static_cast<std::uint32_t>(since_check_));
  if (mode_ == CovarianceMode::full) {
    w.put_doubles(a_.a);
    w.put_doubles(a_inv_.a);
  } else {
    w.put_doubles(diag_);
  }
}

CovarianceState CovarianceState::restore(BinaryReader& r) {
  const CovarianceMode mode =
      r.get_u32() == 0u ? CovarianceMode::full : CovarianceMode::diagonal;
  const int dim = static_cast<int>(r.get_u32());
  const double lambda = r.get_double();
  const int check_interval = static_cast<int>(r.get_u32());
  CovarianceState cov(mode, dim, lambda, check_interval);
  cov.update_count_ = r.get_i64();
  cov.since_check_ = static_cast<int>(r.get_u32());
  if (mode == CovarianceMode::full) {
    cov.a_.a = r.get_doubles();
    cov.a_inv_.a = r.get_doubles();
    const auto expected = static_cast<std::size_t>(dim) * dim;
    if (cov.a_.a.size() != expected || cov.a_inv_.a.size() != expected)
      throw CheckpointError("covariance checkpoint has wrong matrix size");
  } else {
    cov.diag_ = r.get_doubles();
    if (cov.diag_.size() != static_cast<std::size_t>(dim))
      throw CheckpointError("covariance checkpoint has wrong diagonal size");
  }
  return cov;
}

double alpha_schedule(const CovarianceState& cov, const AlphaParams& params) {
  if (params.constant.has_value()) return *params.constant;
  if (!(params.delta > 0.0) || params.delta > 1.0)
    throw ConfigError("alpha_schedule: delta must lie in (0, 1]");
  const double inside =
      params.noise_scale * params.noise_scale *
      (cov.log_det_ratio() + 2.0 * std::log(1.0 / params.delta));
  return params.multiplier * (std::sqrt(std::max(inside, 0.0)) + params.additive);
}

std::vector<double> covariance_features(const Ranker& r, const Query& q,
                                        GradFeatures grad_features) {
  const int n = q.size();
  if (const auto* lin = std::get_if<LinearRanker>(&r)) {
    std::vector<double> rows(static_cast<std::size_t>(n) * lin->dim());
    for (int i = 0; i < n; ++i)
      std::memcpy(rows.data() + static_cast<std::size_t>(i) * lin->dim(),
                  q.documents[static_cast<std::size_t>(i)].features.data(),
                  sizeof(double) * static_cast<std::size_t>(lin->dim()));
    return rows;
  }
  const auto& net = std::get<NeuralRanker>(r);
  const auto p = static_cast<std::size_t>(net.param_count());
  std::vector<double> rows(static_cast<std::size_t>(n) * p);
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(net.width));
  NeuralWorkspace ws;

  NeuralRanker at_init;
  const NeuralRanker* eval_net = &net;
  if (grad_features == GradFeatures::initial) {
    at_init = net;
    at_init.theta = net.theta0;
    eval_net = &at_init;
  }
  for (int i = 0; i < n; ++i) {
    std::span<double> row{rows.data() + static_cast<std::size_t>(i) * p, p};
    score_param_gradient(*eval_net,
                         q.documents[static_cast<std::size_t>(i)].features, ws,
                         row);
    for (double& v : row) v *= inv_sqrt_m;
  }
  return rows;
}

CertaintyPartition ci_partition(const Ranker& r, const CovarianceState& cov,
                                double alpha, const Query& q,
                                GradFeatures grad_features) {
  const int n = q.size();
  CertaintyPartition out;
  out.n_docs = n;
  if (n == 0) return out;

  std::vector<double> scores(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    scores[static_cast<std::size_t>(i)] =
        score(r, q.documents[static_cast<std::size_t>(i)].features);

  const auto rows = covariance_features(r, q, grad_features);
  const auto dim = static_cast<std::size_t>(cov.dim());
  std::vector<double> v(dim);

  for (int i = 0; i < n; ++i) {
    const double* ri = rows.data() + static_cast<std::size_t>(i) * dim;
    for (int j = i + 1; j < n; ++j) {
      const double* rj = rows.data() + static_cast<std::size_t>(j) * dim;
      for (std::size_t k = 0; k < dim; ++k) v[k] = ri[k] - rj[k];
      const double width = alpha * std::sqrt(std::max(cov.width_sq(v), 0.0));
      const double p = sigmoid(scores[static_cast<std::size_t>(i)] -
                               scores[static_cast<std::size_t>(j)]);
      if (p - width > 0.5) {
        out.certain.push_back({i, j, p - 0.5});
      } else if (p + width < 0.5) {
        out.certain.push_back({j, i, 0.5 - p});
      } else {
        out.uncertain.emplace_back(i, j);
      }
    }
  }
  return out;
}

std::vector<int> topo_rank(const CertaintyPartition& partition, int n_docs,
                           RandomStream& rng, int* removed_edges) {
  if (removed_edges != nullptr) *removed_edges = 0;
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n_docs));
  if (n_docs == 0) return order;

  // Adjacency over certain edges only; uncertain pairs impose nothing.
  // An edge dies either when consumed (its source is emitted) or when the
  // cycle fallback drops it, so each live edge holds exactly one unit of
  // its target's indegree.
  std::vector<std::vector<std::size_t>> out_edges(
      static_cast<std::size_t>(n_docs));
  std::vector<int> indegree(static_cast<std::size_t>(n_docs), 0);
  std::vector<char> edge_alive(partition.certain.size(), 1);
  for (std::size_t e = 0; e < partition.certain.size(); ++e) {
    const auto& edge = partition.certain[e];
    out_edges[static_cast<std::size_t>(edge.above)].push_back(e);
    ++indegree[static_cast<std::size_t>(edge.below)];
  }

  std::vector<int> available;
  for (int i = 0; i < n_docs; ++i)
    if (indegree[static_cast<std::size_t>(i)] == 0) available.push_back(i);

  while (static_cast<int>(order.size()) < n_docs) {
    if (available.empty()) {
      // Cycle among the remaining documents: drop the live certain edge
      // with the smallest margin.
      std::size_t weakest = partition.certain.size();
      double weakest_margin = std::numeric_limits<double>::infinity();
      for (std::size_t e = 0; e < partition.certain.size(); ++e) {
        if (edge_alive[e] && partition.certain[e].margin < weakest_margin) {
          weakest_margin = partition.certain[e].margin;
          weakest = e;
        }
      }
      if (weakest == partition.certain.size())
        throw DataError("topo_rank: stalled without a removable edge");
      edge_alive[weakest] = 0;
      if (removed_edges != nullptr) ++(*removed_edges);
      const int blocked = partition.certain[weakest].below;
      if (--indegree[static_cast<std::size_t>(blocked)] == 0)
        available.push_back(blocked);
      continue;
    }
    const std::size_t pick = rng.uniform_index(available.size());
    const int doc = available[pick];
    available[pick] = available.back();
    available.pop_back();
    order.push_back(doc);
    for (std::size_t e : out_edges[static_cast<std::size_t>(doc)]) {
      if (!edge_alive[e]) continue;
      edge_alive[e] = 0;
      const int next = partition.certain[e].below;
      if (--indegree[static_cast<std::size_t>(next)] == 0)
        available.push_back(next);
    }
  }
  return order;
}

std::vector<int> epsilon_greedy_rank(const Ranker& r, const Query& q,
                                     double epsilon, RandomStream& rng) {
  if (epsilon < 0.0 || epsilon > 1.0)
    throw ConfigError("epsilon_greedy_rank: epsilon must lie in [0, 1]");
  const int n = q.size();
  std::vector<double> scores(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    scores[static_cast<std::size_t>(i)] =
        score(r, q.documents[static_cast<std::size_t>(i)].features);

  std::vector<int> remaining(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) remaining[static_cast<std::size_t>(i)] = i;
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n));
  std::vector<std::size_t> best;

  while (!remaining.empty()) {
    std::size_t pick;
    if (epsilon > 0.0 && rng.bernoulli(epsilon)) {
      pick = rng.uniform_index(remaining.size());
    } else {
      best.clear();
      double best_score = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < remaining.size(); ++k) {
        const double s = scores[static_cast<std::size_t>(remaining[k])];
        if (s > best_score) {
          best_score = s;
          best.assign(1, k);
        } else if (s == best_score) {
          best.push_back(k);
        }
      }
      pick = best.size() == 1 ? best.front()
                              : best[rng.uniform_index(best.size())];
    }
    order.push_back(remaining[pick]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return order;
}

}  // namespace ol2r
