#include "ol2r/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ol2r/errors.hpp"

namespace ol2r {

namespace {

double dot_n(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

double sigmoid(double z) {
  z = std::clamp(z, -kLogitClamp, kLogitClamp);
  return 1.0 / (1.0 + std::exp(-z));
}

double cross_entropy(double effective_label, double logit) {
  const double z = std::clamp(logit, -kLogitClamp, kLogitClamp);
  // log sigma(z) = -log1p(exp(-z)); log(1 - sigma(z)) = -z - log1p(exp(-z))
  const double log_sig = -std::log1p(std::exp(-z));
  const double log_one_minus = -z + log_sig;
  return -effective_label * log_sig - (1.0 - effective_label) * log_one_minus;
}

int neural_param_count(int input_dim, int width, int depth) {
  return width * input_dim + width * width * (depth - 2) + width;
}

NeuralRanker init_neural(int input_dim, int width, int depth, NeuralInit mode,
                         bool scale_output, RandomStream& rng) {
  if (depth < 2) throw ConfigError("init_neural: depth must be >= 2");
  if (width < 1 || input_dim < 1)
    throw ConfigError("init_neural: width and input_dim must be positive");
  if (mode == NeuralInit::antisymmetric && width % 2 != 0)
    throw ConfigError("init_neural: antisymmetric mode needs an even width");

  NeuralRanker r;
  r.input_dim = input_dim;
  r.width = width;
  r.depth = depth;
  r.scale_output = scale_output;
  r.theta.assign(
      static_cast<std::size_t>(neural_param_count(input_dim, width, depth)),
      0.0);

  const double stddev = std::sqrt(2.0 / width);
  const int m = width;
  const int half = m / 2;
  double* w1 = r.theta.data();

  if (mode == NeuralInit::gaussian_ntk) {
    for (auto& v : r.theta) v = rng.normal(0.0, stddev);
  } else {
    // First layer: lower half duplicates the upper half so every hidden
    // vector carries paired coordinates.
    for (int i = 0; i < half; ++i)
      for (int j = 0; j < input_dim; ++j) {
        double v = rng.normal(0.0, stddev);
        w1[i * input_dim + j] = v;
        w1[(i + half) * input_dim + j] = v;
      }
    // Hidden layers: equal diagonal blocks preserve the pairing.
    for (int layer = 0; layer < depth - 2; ++layer) {
      double* w = r.theta.data() + width * input_dim + layer * m * m;
      for (int i = 0; i < half; ++i)
        for (int j = 0; j < half; ++j) {
          double v = rng.normal(0.0, stddev);
          w[i * m + j] = v;
          w[(i + half) * m + (j + half)] = v;
        }
    }
    // Output row: negated pair cancels the duplicated halves exactly.
    double* wl = r.theta.data() + width * input_dim + (depth - 2) * m * m;
    for (int i = 0; i < half; ++i) {
      double v = rng.normal(0.0, stddev);
      wl[i] = v;
      wl[i + half] = -v;
    }
  }

  r.theta0 = r.theta;
  return r;
}

int ranker_param_count(const Ranker& r) {
  return std::visit(
      [](const auto& rr) {
        if constexpr (std::is_same_v<std::decay_t<decltype(rr)>, LinearRanker>)
          return rr.dim();
        else
          return rr.param_count();
      },
      r);
}

double score(const LinearRanker& r, std::span<const double> x) {
  if (x.size() != r.theta.size())
    throw DataError("score: feature dimension mismatch");
  return dot_n(r.theta.data(), x.data(), x.size());
}

namespace {

struct NeuralLayout {
  int m = 0, d = 0, depth = 0;
  const double* w1 = nullptr;
  const double* hidden = nullptr;  // (depth-2) blocks of m*m
  const double* wl = nullptr;

  NeuralLayout(const NeuralRanker& r, const double* theta)
      : m(r.width), d(r.input_dim), depth(r.depth) {
    w1 = theta;
    hidden = theta + static_cast<std::size_t>(m) * d;
    wl = hidden + static_cast<std::size_t>(m) * m * (depth - 2);
  }
};

double forward_impl(const NeuralRanker& r, std::span<const double> x,
                    NeuralWorkspace& ws) {
  if (static_cast<int>(x.size()) != r.input_dim)
    throw DataError("score: feature dimension mismatch");
  const NeuralLayout L(r, r.theta.data());
  const int m = L.m;
  ws.activations.resize(static_cast<std::size_t>(m) * (L.depth - 1));

  double* h = ws.activations.data();
  for (int i = 0; i < m; ++i) {
    double z = dot_n(L.w1 + static_cast<std::size_t>(i) * L.d, x.data(),
                     static_cast<std::size_t>(L.d));
    h[i] = z > 0.0 ? z : 0.0;
  }
  for (int layer = 0; layer < L.depth - 2; ++layer) {
    const double* w = L.hidden + static_cast<std::size_t>(layer) * m * m;
    const double* prev =
        ws.activations.data() + static_cast<std::size_t>(layer) * m;
    double* cur =
        ws.activations.data() + static_cast<std::size_t>(layer + 1) * m;
    for (int i = 0; i < m; ++i) {
      double z = dot_n(w + static_cast<std::size_t>(i) * m, prev,
                       static_cast<std::size_t>(m));
      cur[i] = z > 0.0 ? z : 0.0;
    }
  }
  const double* last =
      ws.activations.data() + static_cast<std::size_t>(L.depth - 2) * m;
  double out = dot_n(L.wl, last, static_cast<std::size_t>(m));
  return r.scale_output ? out * std::sqrt(static_cast<double>(m)) : out;
}

// Accumulates coeff * df/dtheta into grad; ws must hold the activations of
// the matching forward pass.
void backward_impl(const NeuralRanker& r, std::span<const double> x,
                   const NeuralWorkspace& ws, double coeff,
                   std::span<double> grad) {
  const NeuralLayout L(r, r.theta.data());
  const int m = L.m;
  const double scale = r.scale_output ? std::sqrt(static_cast<double>(m)) : 1.0;

  const std::size_t w1_size = static_cast<std::size_t>(m) * L.d;
  const std::size_t block = static_cast<std::size_t>(m) * m;
  double* g1 = grad.data();
  double* ghidden = grad.data() + w1_size;
  double* gl = ghidden + block * (L.depth - 2);

  const double* last =
      ws.activations.data() + static_cast<std::size_t>(L.depth - 2) * m;
  std::vector<double> delta(static_cast<std::size_t>(m));
  std::vector<double> delta_prev(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    gl[i] += coeff * scale * last[i];
    delta[static_cast<std::size_t>(i)] =
        last[i] > 0.0 ? coeff * scale * L.wl[i] : 0.0;
  }
  for (int layer = L.depth - 3; layer >= 0; --layer) {
    const double* w = L.hidden + static_cast<std::size_t>(layer) * block;
    const double* prev =
        ws.activations.data() + static_cast<std::size_t>(layer) * m;
    double* gw = ghidden + static_cast<std::size_t>(layer) * block;
    std::fill(delta_prev.begin(), delta_prev.end(), 0.0);
    for (int i = 0; i < m; ++i) {
      const double di = delta[static_cast<std::size_t>(i)];
      if (di == 0.0) continue;
      double* grow = gw + static_cast<std::size_t>(i) * m;
      const double* wrow = w + static_cast<std::size_t>(i) * m;
      for (int j = 0; j < m; ++j) {
        grow[j] += di * prev[j];
        delta_prev[static_cast<std::size_t>(j)] += wrow[j] * di;
      }
    }
    for (int j = 0; j < m; ++j)
      if (!(prev[j] > 0.0)) delta_prev[static_cast<std::size_t>(j)] = 0.0;
    std::swap(delta, delta_prev);
  }
  for (int i = 0; i < m; ++i) {
    const double di = delta[static_cast<std::size_t>(i)];
    if (di == 0.0) continue;
    double* grow = g1 + static_cast<std::size_t>(i) * L.d;
    for (int j = 0; j < L.d; ++j)
      grow[j] += di * x[static_cast<std::size_t>(j)];
  }
}

}  // namespace

double score(const NeuralRanker& r, std::span<const double> x,
             NeuralWorkspace& ws) {
  return forward_impl(r, x, ws);
}

double score(const NeuralRanker& r, std::span<const double> x) {
  NeuralWorkspace ws;
  return forward_impl(r, x, ws);
}

double score(const Ranker& r, std::span<const double> x) {
  return std::visit([&](const auto& rr) { return score(rr, x); }, r);
}

double pair_logit(const Ranker& r, std::span<const double> x_i,
                  std::span<const double> x_j) {
  return score(r, x_i) - score(r, x_j);
}

void score_param_gradient(const NeuralRanker& r, std::span<const double> x,
                          NeuralWorkspace& ws, std::span<double> out) {
  forward_impl(r, x, ws);
  std::fill(out.begin(), out.end(), 0.0);
  backward_impl(r, x, ws, 1.0, out);
}

std::vector<double> score_param_gradient(const NeuralRanker& r,
                                         std::span<const double> x) {
  std::vector<double> out(static_cast<std::size_t>(r.param_count()), 0.0);
  NeuralWorkspace ws;
  score_param_gradient(r, x, ws, out);
  return out;
}

void History::append(int round, std::vector<PairObservation> pairs) {
  if (!rounds_.empty() && round <= rounds_.back().round)
    throw DataError("History::append: rounds must be strictly increasing");
  total_pairs_ += pairs.size();
  rounds_.push_back(RoundPairs{round, std::move(pairs)});
}

void History::trim_to_last(int max_rounds) {
  if (max_rounds <= 0) return;
  if (static_cast<int>(rounds_.size()) <= max_rounds) return;
  const std::size_t drop =
      rounds_.size() - static_cast<std::size_t>(max_rounds);
  for (std::size_t i = 0; i < drop; ++i)
    total_pairs_ -= rounds_[i].pairs.size();
  rounds_.erase(rounds_.begin(),
                rounds_.begin() + static_cast<std::ptrdiff_t>(drop));
}

void History::clear() {
  rounds_.clear();
  total_pairs_ = 0;
}

namespace {

// Flattened view of the training pairs shared by both objectives.
struct PairRef {
  const double* x_i;
  const double* x_j;
  double effective_label;  // y + gamma
};

std::vector<PairRef> gather_pairs(const TrainingData& data) {
  std::vector<PairRef> refs;
  if (data.history == nullptr) return refs;
  refs.reserve(data.history->total_pairs());
  if (!data.gamma.empty() && data.gamma.size() != data.history->total_pairs())
    throw DataError("TrainingData: gamma must have one entry per pair");
  std::size_t k = 0;
  for (const auto& round : data.history->rounds()) {
    for (const auto& p : round.pairs) {
      const double g = data.gamma.empty() ? 0.0 : data.gamma[k];
      refs.push_back(
          PairRef{p.features_i.data(), p.features_j.data(), p.label + g});
      ++k;
    }
  }
  return refs;
}

// Objective = sum of pairwise cross-entropy terms + regularizer. The
// eval functions accumulate cross-entropy value/gradient over a subset of
// pairs; the regularizer lives in separate hooks so minibatch steps can
// weight the two parts differently.
class LinearObjective {
 public:
  LinearObjective(const LinearRanker& r, const TrainingData& data,
                  double lambda)
      : lambda_(lambda), dim_(r.theta.size()), pairs_(gather_pairs(data)) {
    if (!data.center_offsets.empty())
      throw DataError("linear rankers have no regularization-center offsets");
    diffs_.resize(pairs_.size() * dim_);
    for (std::size_t k = 0; k < pairs_.size(); ++k)
      for (std::size_t j = 0; j < dim_; ++j)
        diffs_[k * dim_ + j] = pairs_[k].x_i[j] - pairs_[k].x_j[j];
  }

  std::size_t pair_count() const { return pairs_.size(); }

  double eval_ce(std::span<const double> theta,
                 std::span<const std::size_t> subset, std::span<double> grad,
                 bool want_loss) const {
    double total = 0.0;
    auto visit = [&](std::size_t k) {
      const double* dx = diffs_.data() + k * dim_;
      const double z = std::clamp(dot_n(dx, theta.data(), dim_), -kLogitClamp,
                                  kLogitClamp);
      const double p = 1.0 / (1.0 + std::exp(-z));
      const double residual = p - pairs_[k].effective_label;
      if (want_loss) total += cross_entropy(pairs_[k].effective_label, z);
      if (!grad.empty())
        for (std::size_t j = 0; j < dim_; ++j) grad[j] += residual * dx[j];
    };
    if (subset.empty())
      for (std::size_t k = 0; k < pairs_.size(); ++k) visit(k);
    else
      for (std::size_t k : subset) visit(k);
    return total;
  }

  void add_reg_gradient(std::span<const double> theta,
                        std::span<double> grad, double weight) const {
    for (std::size_t j = 0; j < dim_; ++j)
      grad[j] += weight * lambda_ * theta[j];
  }

  double reg_loss(std::span<const double> theta) const {
    double s = 0.0;
    for (std::size_t j = 0; j < dim_; ++j)
      s += 0.5 * lambda_ * theta[j] * theta[j];
    return s;
  }

 private:
  double lambda_;
  std::size_t dim_;
  std::vector<PairRef> pairs_;
  std::vector<double> diffs_;  // pair_count x dim
};

class NeuralObjective {
 public:
  NeuralObjective(const NeuralRanker& r, const TrainingData& data,
                  double lambda)
      : lambda_(lambda), center_offsets_(data.center_offsets),
        pairs_(gather_pairs(data)) {
    if (!center_offsets_.empty() &&
        static_cast<int>(center_offsets_.size()) != r.param_count())
      throw DataError("center offsets must match the parameter count");
  }

  std::size_t pair_count() const { return pairs_.size(); }

  double eval_ce(const NeuralRanker& at, std::span<const std::size_t> subset,
                 std::span<double> grad, bool want_loss) {
    double total = 0.0;
    const auto dim = static_cast<std::size_t>(at.input_dim);
    auto visit = [&](std::size_t k) {
      const PairRef& p = pairs_[k];
      const double f_i = forward_impl(at, {p.x_i, dim}, ws_i_);
      const double f_j = forward_impl(at, {p.x_j, dim}, ws_j_);
      const double z = std::clamp(f_i - f_j, -kLogitClamp, kLogitClamp);
      const double prob = 1.0 / (1.0 + std::exp(-z));
      const double residual = prob - p.effective_label;
      if (want_loss) total += cross_entropy(p.effective_label, z);
      if (!grad.empty()) {
        backward_impl(at, {p.x_i, dim}, ws_i_, residual, grad);
        backward_impl(at, {p.x_j, dim}, ws_j_, -residual, grad);
      }
    };
    if (subset.empty())
      for (std::size_t k = 0; k < pairs_.size(); ++k) visit(k);
    else
      for (std::size_t k : subset) visit(k);
    return total;
  }

  void add_reg_gradient(const NeuralRanker& at, std::span<double> grad,
                        double weight) const {
    const double ml = at.width * lambda_;
    const double sqrt_ml = std::sqrt(ml);
    for (std::size_t l = 0; l < at.theta.size(); ++l) {
      const double off = center_offsets_.empty() ? 0.0 : center_offsets_[l];
      grad[l] +=
          weight * (ml * (at.theta[l] - at.theta0[l]) + sqrt_ml * off);
    }
  }

  double reg_loss(const NeuralRanker& at) const {
    const double ml = at.width * lambda_;
    const double inv_sqrt_ml = 1.0 / std::sqrt(ml);
    double s = 0.0;
    for (std::size_t l = 0; l < at.theta.size(); ++l) {
      const double off = center_offsets_.empty() ? 0.0 : center_offsets_[l];
      const double delta = at.theta[l] - at.theta0[l] + off * inv_sqrt_ml;
      s += 0.5 * ml * delta * delta;
    }
    return s;
  }

 private:
  double lambda_;
  std::span<const double> center_offsets_;
  std::vector<PairRef> pairs_;
  NeuralWorkspace ws_i_, ws_j_;
};

void check_finite(double probe, int epoch, const char* what) {
  if (!std::isfinite(probe))
    throw TrainError(std::string("train: non-finite ") + what, epoch);
}

void shuffle_indices(std::vector<std::size_t>& idx, RandomStream& rng) {
  for (std::size_t i = idx.size(); i > 1; --i)
    std::swap(idx[i - 1], idx[rng.uniform_index(i)]);
}

// Shared descent loop. FullBatchEval(grad, want_loss) -> ce value;
// SubsetEval(subset, grad) accumulates ce gradients over a minibatch.
template <typename FullEval, typename SubsetEval, typename RegGrad,
          typename RegLoss>
void descend(std::vector<double>& theta, const TrainConfig& cfg,
             std::size_t n_pairs, FullEval&& full_eval,
             SubsetEval&& subset_eval, RegGrad&& add_reg_grad,
             RegLoss&& reg_loss, RandomStream* shuffle_rng,
             std::vector<double>* epoch_losses) {
  std::vector<double> grad(theta.size());
  const double denom = static_cast<double>(std::max<std::size_t>(n_pairs, 1));

  std::vector<std::size_t> order;
  const bool minibatch = cfg.batch_size > 0 && n_pairs > 0;
  if (minibatch) {
    order.resize(n_pairs);
    std::iota(order.begin(), order.end(), std::size_t{0});
  }

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (!minibatch) {
      std::fill(grad.begin(), grad.end(), 0.0);
      const bool want_loss = epoch_losses != nullptr;
      const double ce = full_eval(grad, want_loss);
      add_reg_grad(grad, 1.0);
      if (want_loss) {
        const double total = ce + reg_loss();
        check_finite(total, epoch, "loss");
        epoch_losses->push_back(total);
      }
      const double step = cfg.learning_rate / denom;
      double probe = 0.0;
      for (std::size_t j = 0; j < theta.size(); ++j) {
        theta[j] -= step * grad[j];
        probe += grad[j];
      }
      check_finite(probe, epoch, "gradient");
      continue;
    }

    if (epoch_losses != nullptr) {
      const double total = full_eval({}, true) + reg_loss();
      check_finite(total, epoch, "loss");
      epoch_losses->push_back(total);
    }
    if (shuffle_rng != nullptr) shuffle_indices(order, *shuffle_rng);
    const auto batch = static_cast<std::size_t>(cfg.batch_size);
    for (std::size_t begin = 0; begin < n_pairs; begin += batch) {
      const std::size_t end = std::min(begin + batch, n_pairs);
      std::fill(grad.begin(), grad.end(), 0.0);
      subset_eval({order.data() + begin, end - begin}, grad);
      // Mean cross-entropy over the batch, regularizer weighted by its
      // share of the full objective.
      const double bsz = static_cast<double>(end - begin);
      for (auto& g : grad) g /= bsz;
      add_reg_grad(grad, 1.0 / denom);
      double probe = 0.0;
      for (std::size_t j = 0; j < theta.size(); ++j) {
        theta[j] -= cfg.learning_rate * grad[j];
        probe += grad[j];
      }
      check_finite(probe, epoch, "gradient");
    }
  }
}

}  // namespace

double loss(const Ranker& r, const TrainingData& data, double lambda) {
  if (const auto* lin = std::get_if<LinearRanker>(&r)) {
    LinearObjective obj(*lin, data, lambda);
    return obj.eval_ce(lin->theta, {}, {}, true) + obj.reg_loss(lin->theta);
  }
  const auto& net = std::get<NeuralRanker>(r);
  NeuralObjective obj(net, data, lambda);
  return obj.eval_ce(net, {}, {}, true) + obj.reg_loss(net);
}

void loss_gradient(const Ranker& r, const TrainingData& data, double lambda,
                   std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  if (const auto* lin = std::get_if<LinearRanker>(&r)) {
    LinearObjective obj(*lin, data, lambda);
    obj.eval_ce(lin->theta, {}, out, false);
    obj.add_reg_gradient(lin->theta, out, 1.0);
    return;
  }
  const auto& net = std::get<NeuralRanker>(r);
  NeuralObjective obj(net, data, lambda);
  obj.eval_ce(net, {}, out, false);
  obj.add_reg_gradient(net, out, 1.0);
}

std::vector<double> loss_gradient(const Ranker& r, const TrainingData& data,
                                  double lambda) {
  std::vector<double> out(static_cast<std::size_t>(ranker_param_count(r)),
                          0.0);
  loss_gradient(r, data, lambda, out);
  return out;
}

Ranker train(const Ranker& start, const TrainingData& data,
             const TrainConfig& cfg, RandomStream* shuffle_rng,
             std::vector<double>* epoch_losses) {
  if (cfg.epochs < 1) throw ConfigError("train: epochs must be >= 1");
  if (!(cfg.learning_rate > 0.0))
    throw ConfigError("train: learning_rate must be positive");
  if (!(cfg.lambda > 0.0)) throw ConfigError("train: lambda must be positive");

  Ranker result = start;
  if (auto* lin = std::get_if<LinearRanker>(&result)) {
    LinearObjective obj(*lin, data, cfg.lambda);
    descend(
        lin->theta, cfg, obj.pair_count(),
        [&](std::span<double> g, bool want_loss) {
          return obj.eval_ce(lin->theta, {}, g, want_loss);
        },
        [&](std::span<const std::size_t> subset, std::span<double> g) {
          obj.eval_ce(lin->theta, subset, g, false);
        },
        [&](std::span<double> g, double w) {
          obj.add_reg_gradient(lin->theta, g, w);
        },
        [&]() { return obj.reg_loss(lin->theta); }, shuffle_rng,
        epoch_losses);
    return result;
  }

  auto& net = std::get<NeuralRanker>(result);
  NeuralObjective obj(net, data, cfg.lambda);
  descend(
      net.theta, cfg, obj.pair_count(),
      [&](std::span<double> g, bool want_loss) {
        return obj.eval_ce(net, {}, g, want_loss);
      },
      [&](std::span<const std::size_t> subset, std::span<double> g) {
        obj.eval_ce(net, subset, g, false);
      },
      [&](std::span<double> g, double w) { obj.add_reg_gradient(net, g, w); },
      [&]() { return obj.reg_loss(net); }, shuffle_rng, epoch_losses);
  return result;
}

std::vector<double> perturb_params_center(int param_count, double nu,
                                          RandomStream& rng) {
  std::vector<double> offsets(static_cast<std::size_t>(param_count), 0.0);
  if (nu > 0.0)
    for (auto& v : offsets) v = rng.normal(0.0, nu);
  return offsets;
}

std::vector<double> draw_pair_noise(const History& h, double nu,
                                    RandomStream& rng) {
  std::vector<double> gamma(h.total_pairs(), 0.0);
  if (nu > 0.0)
    for (auto& v : gamma) v = rng.normal(0.0, nu);
  return gamma;
}

}  // namespace ol2r
