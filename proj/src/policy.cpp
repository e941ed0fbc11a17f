#include "ol2r/policy.hpp"

#include <chrono>
#include <cmath>

#include "ol2r/errors.hpp"
#include "ol2r/metrics.hpp"

namespace ol2r {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t elapsed_us(Clock::time_point from) {
  return std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() -
                                                               from)
      .count();
}

void save_ranker(BinaryWriter& w, const Ranker& r) {
  if (const auto* lin = std::get_if<LinearRanker>(&r)) {
    w.put_u32(0);
    w.put_doubles(lin->theta);
    return;
  }
  const auto& net = std::get<NeuralRanker>(r);
  w.put_u32(1);
  w.put_u32(static_cast<std::uint32_t>(net.input_dim));
  w.put_u32(static_cast<std::uint32_t>(net.width));
  w.put_u32(static_cast<std::uint32_t>(net.depth));
  w.put_u32(net.scale_output ? 1u : 0u);
  w.put_doubles(net.theta);
  w.put_doubles(net.theta0);
}

Ranker restore_ranker(BinaryReader& r) {
  const std::uint32_t kind = r.get_u32();
  if (kind == 0) {
    LinearRanker lin;
    lin.theta = r.get_doubles();
    return lin;
  }
  NeuralRanker net;
  net.input_dim = static_cast<int>(r.get_u32());
  net.width = static_cast<int>(r.get_u32());
  net.depth = static_cast<int>(r.get_u32());
  net.scale_output = r.get_u32() != 0;
  net.theta = r.get_doubles();
  net.theta0 = r.get_doubles();
  const auto expected = static_cast<std::size_t>(
      neural_param_count(net.input_dim, net.width, net.depth));
  if (net.theta.size() != expected || net.theta0.size() != expected)
    throw CheckpointError("ranker checkpoint has wrong parameter count");
  return net;
}

Ranker build_member(const ExperimentConfig& cfg, RandomStream& init_stream) {
  if (!algorithm_is_neural(cfg.algorithm.name))
    return LinearRanker(cfg.dataset.feature_dim);
  return init_neural(cfg.dataset.feature_dim, cfg.network.width,
                     cfg.network.depth, cfg.network.init,
                     cfg.network.scale_output, init_stream);
}

Ranker cold_start(const Ranker& r) {
  if (const auto* lin = std::get_if<LinearRanker>(&r))
    return LinearRanker(lin->dim());
  auto net = std::get<NeuralRanker>(r);
  net.theta = net.theta0;
  return net;
}

TrainConfig train_config(const ExperimentConfig& cfg) {
  TrainConfig tc;
  tc.lambda = cfg.training.lambda;
  tc.learning_rate = cfg.training.learning_rate;
  tc.epochs = cfg.resolved_epochs();
  tc.batch_size = cfg.training.batch_size;
  tc.warm_start = cfg.training.warm_start;
  return tc;
}

// Perturbed-history ensemble: every member retrains each round on the
// whole (windowed) history under freshly drawn pseudo noise; a pair is
// exploited only when all members agree on its direction.
class EnsemblePolicy final : public Policy {
 public:
  EnsemblePolicy(const ExperimentConfig& cfg, RngStreams& streams)
      : cfg_(cfg), tc_(train_config(cfg)) {
    ensemble_.nu = std::sqrt(cfg.algorithm.nu2);
    ensemble_.perturb_params = cfg.algorithm.perturb_params;
    for (int n = 0; n < cfg.algorithm.members; ++n) {
      RandomStream spur(derive_seed(streams.init().next_u64(), "member_init",
                                    static_cast<std::uint64_t>(n)));
      ensemble_.members.push_back(build_member(cfg, spur));
    }
  }

  ServeResult serve(const Query& q, RngStreams& streams) override {
    ServeResult out;
    const auto t0 = Clock::now();
    CertaintyPartition partition = ensemble_partition(ensemble_, q);
    out.t_partition_us = elapsed_us(t0);
    out.n_certain = partition.certain.size();
    out.n_uncertain = partition.uncertain.size();
    const auto t1 = Clock::now();
    out.ranking =
        topo_rank(partition, q.size(), streams.topo_tiebreak(), &out.removed_edges);
    out.t_topo_us = elapsed_us(t1);
    return out;
  }

  std::int64_t observe(const Query&, std::span<const PairObservation>) override {
    return 0;  // no covariance machinery
  }

  std::int64_t update(const History& history, RngStreams& streams) override {
    const auto t0 = Clock::now();
    for (int n = 0; n < ensemble_.size(); ++n) {
      RandomStream& noise = streams.perturbation(n);
      const auto gamma = draw_pair_noise(history, ensemble_.nu, noise);
      std::vector<double> offsets;
      TrainingData data{&history, gamma, {}};
      if (ensemble_.perturb_params) {
        offsets = perturb_params_center(
            ranker_param_count(ensemble_.members[static_cast<std::size_t>(n)]),
            ensemble_.nu, noise);
        data.center_offsets = offsets;
      }
      Ranker& member = ensemble_.members[static_cast<std::size_t>(n)];
      const Ranker start = tc_.warm_start ? member : cold_start(member);
      member = train(start, data, tc_);
    }
    return elapsed_us(t0);
  }

  void score_query(const Query& q, std::span<double> out) const override {
    if (cfg_.run.offline_scoring == OfflineScoring::member0) {
      for (int i = 0; i < q.size(); ++i)
        out[static_cast<std::size_t>(i)] = score(
            ensemble_.members.front(), q.documents[static_cast<std::size_t>(i)].features);
      return;
    }
    for (int i = 0; i < q.size(); ++i) {
      double s = 0.0;
      for (const auto& member : ensemble_.members)
        s += score(member, q.documents[static_cast<std::size_t>(i)].features);
      out[static_cast<std::size_t>(i)] = s / ensemble_.size();
    }
  }

  void save(BinaryWriter& w) const override {
    w.put_u32(static_cast<std::uint32_t>(ensemble_.size()));
    for (const auto& member : ensemble_.members) save_ranker(w, member);
  }

  void restore(BinaryReader& r) override {
    const auto n = r.get_u32();
    if (n != static_cast<std::uint32_t>(ensemble_.size()))
      throw CheckpointError("checkpoint ensemble size mismatch");
    for (auto& member : ensemble_.members) member = restore_ranker(r);
  }

 private:
  ExperimentConfig cfg_;
  TrainConfig tc_;
  Ensemble ensemble_;
};

// Confidence-interval baseline: one ranker trained on the unperturbed
// objective plus an explicit covariance ellipsoid over pair features.
class CiPolicy final : public Policy {
 public:
  CiPolicy(const ExperimentConfig& cfg, RngStreams& streams)
      : cfg_(cfg), tc_(train_config(cfg)) {
    RandomStream spur(derive_seed(streams.init().next_u64(), "member_init", 0));
    ranker_ = build_member(cfg, spur);
    const int dim =
        algorithm_is_neural(cfg.algorithm.name)
            ? std::get<NeuralRanker>(ranker_).param_count()
            : cfg.dataset.feature_dim;
    const auto mode = cfg.algorithm.name == Algorithm::ci_neural_diag
                          ? CovarianceMode::diagonal
                          : CovarianceMode::full;
    cov_ = CovarianceState(mode, dim, cfg.training.lambda);
    alpha_.multiplier = cfg.algorithm.alpha_multiplier;
    alpha_.noise_scale = cfg.algorithm.alpha_noise_scale;
    alpha_.delta = cfg.algorithm.alpha_delta;
    alpha_.additive = algorithm_is_neural(cfg.algorithm.name)
                          ? std::sqrt(cfg.training.lambda)
                          : static_cast<double>(cfg.dataset.feature_dim);
    if (cfg.algorithm.alpha_mode == AlphaMode::constant)
      alpha_.constant = cfg.algorithm.alpha;
  }

  ServeResult serve(const Query& q, RngStreams& streams) override {
    ServeResult out;
    const auto t0 = Clock::now();
    const double alpha = alpha_schedule(cov_, alpha_);
    CertaintyPartition partition =
        ci_partition(ranker_, cov_, alpha, q, cfg_.algorithm.grad_features);
    out.t_partition_us = elapsed_us(t0);
    out.n_certain = partition.certain.size();
    out.n_uncertain = partition.uncertain.size();
    const auto t1 = Clock::now();
    out.ranking =
        topo_rank(partition, q.size(), streams.topo_tiebreak(), &out.removed_edges);
    out.t_topo_us = elapsed_us(t1);
    return out;
  }

  std::int64_t observe(const Query& q,
                       std::span<const PairObservation> pairs) override {
    if (pairs.empty()) return 0;
    const auto t0 = Clock::now();
    // Pair feature vectors are taken at the parameters that served this
    // round, i.e. before the round's retraining.
    const auto dim = static_cast<std::size_t>(cov_.dim());
    std::vector<double> v(dim);
    if (const auto* lin = std::get_if<LinearRanker>(&ranker_)) {
      (void)lin;
      for (const auto& p : pairs) {
        for (std::size_t k = 0; k < dim; ++k)
          v[k] = p.features_i[k] - p.features_j[k];
        cov_.update(v);
      }
    } else {
      const auto& net = std::get<NeuralRanker>(ranker_);
      NeuralRanker at_init;
      const NeuralRanker* eval_net = &net;
      if (cfg_.algorithm.grad_features == GradFeatures::initial) {
        at_init = net;
        at_init.theta = net.theta0;
        eval_net = &at_init;
      }
      const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(net.width));
      std::vector<double> g_i(dim), g_j(dim);
      NeuralWorkspace ws;
      for (const auto& p : pairs) {
        score_param_gradient(*eval_net, p.features_i, ws, g_i);
        score_param_gradient(*eval_net, p.features_j, ws, g_j);
        for (std::size_t k = 0; k < dim; ++k)
          v[k] = (g_i[k] - g_j[k]) * inv_sqrt_m;
        cov_.update(v);
      }
    }
    (void)q;
    return elapsed_us(t0);
  }

  std::int64_t update(const History& history, RngStreams&) override {
    const auto t0 = Clock::now();
    TrainingData data{&history, {}, {}};
    const Ranker start = tc_.warm_start ? ranker_ : cold_start(ranker_);
    ranker_ = train(start, data, tc_);
    return elapsed_us(t0);
  }

  void score_query(const Query& q, std::span<double> out) const override {
    for (int i = 0; i < q.size(); ++i)
      out[static_cast<std::size_t>(i)] =
          score(ranker_, q.documents[static_cast<std::size_t>(i)].features);
  }

  void save(BinaryWriter& w) const override {
    save_ranker(w, ranker_);
    cov_.save(w);
  }

  void restore(BinaryReader& r) override {
    ranker_ = restore_ranker(r);
    cov_ = CovarianceState::restore(r);
    if (cov_.dim() != (algorithm_is_neural(cfg_.algorithm.name)
                           ? std::get<NeuralRanker>(ranker_).param_count()
                           : cfg_.dataset.feature_dim))
      throw CheckpointError("checkpoint covariance dimension mismatch");
  }

 private:
  ExperimentConfig cfg_;
  TrainConfig tc_;
  Ranker ranker_;
  CovarianceState cov_;
  AlphaParams alpha_;
};

class EpsilonGreedyPolicy final : public Policy {
 public:
  EpsilonGreedyPolicy(const ExperimentConfig& cfg, RngStreams& streams)
      : cfg_(cfg), tc_(train_config(cfg)) {
    RandomStream spur(derive_seed(streams.init().next_u64(), "member_init", 0));
    ranker_ = build_member(cfg, spur);
  }

  ServeResult serve(const Query& q, RngStreams& streams) override {
    ServeResult out;
    const auto t0 = Clock::now();
    out.ranking = epsilon_greedy_rank(ranker_, q, cfg_.algorithm.epsilon,
                                      streams.topo_tiebreak());
    out.t_partition_us = elapsed_us(t0);
    return out;
  }

  std::int64_t observe(const Query&, std::span<const PairObservation>) override {
    return 0;
  }

  std::int64_t update(const History& history, RngStreams&) override {
    const auto t0 = Clock::now();
    TrainingData data{&history, {}, {}};
    const Ranker start = tc_.warm_start ? ranker_ : cold_start(ranker_);
    ranker_ = train(start, data, tc_);
    return elapsed_us(t0);
  }

  void score_query(const Query& q, std::span<double> out) const override {
    for (int i = 0; i < q.size(); ++i)
      out[static_cast<std::size_t>(i)] =
          score(ranker_, q.documents[static_cast<std::size_t>(i)].features);
  }

  void save(BinaryWriter& w) const override { save_ranker(w, ranker_); }
  void restore(BinaryReader& r) override { ranker_ = restore_ranker(r); }

 private:
  ExperimentConfig cfg_;
  TrainConfig tc_;
  Ranker ranker_;
};

}  // namespace

std::unique_ptr<Policy> make_policy(const ExperimentConfig& cfg,
                                    RngStreams& streams) {
  switch (cfg.algorithm.name) {
    case Algorithm::p2_linear:
    case Algorithm::p2_neural:
      return std::make_unique<EnsemblePolicy>(cfg, streams);
    case Algorithm::ci_linear:
    case Algorithm::ci_neural_full:
    case Algorithm::ci_neural_diag:
      return std::make_unique<CiPolicy>(cfg, streams);
    case Algorithm::epsilon_greedy_linear:
    case Algorithm::epsilon_greedy_neural:
      return std::make_unique<EpsilonGreedyPolicy>(cfg, streams);
  }
  throw ConfigError("make_policy: unhandled algorithm");
}

}  // namespace ol2r
