#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "ol2r/click.hpp"
#include "ol2r/rng.hpp"

namespace ol2r {

/// Logits are clamped to this range before sigmoid / log to keep the
/// cross-entropy finite.
constexpr double kLogitClamp = 35.0;

double sigmoid(double z);
/// -y_eff * log(sigma(z)) - (1 - y_eff) * log(1 - sigma(z)); defined and
/// smooth for effective labels outside [0, 1] as well.
double cross_entropy(double effective_label, double logit);

struct LinearRanker {
  std::vector<double> theta;

  LinearRanker() = default;
  explicit LinearRanker(int dim) : theta(static_cast<std::size_t>(dim), 0.0) {}
  int dim() const { return static_cast<int>(theta.size()); }
};

enum class NeuralInit { gaussian_ntk, antisymmetric };

/// Fully connected ReLU network f(x) = s * W_L relu(W_{L-1} ... relu(W_1 x))
/// with s = sqrt(width) when scale_output is set. Parameters are stored
/// flat: W_1 row-major (width x dim), then the square hidden layers, then
/// the output row (width). theta0 is the frozen snapshot taken at
/// construction and is never mutated afterwards.
struct NeuralRanker {
  int input_dim = 0;
  int width = 0;
  int depth = 2;  // L >= 2
  bool scale_output = true;
  std::vector<double> theta;
  std::vector<double> theta0;

  int param_count() const { return static_cast<int>(theta.size()); }
};

/// width + width*dim + width^2 * (depth - 2)
int neural_param_count(int input_dim, int width, int depth);

/// gaussian_ntk draws every weight from N(0, 2/width). antisymmetric
/// (width must be even) duplicates the first-layer halves and negates the
/// paired output weights so the initial function is identically zero.
NeuralRanker init_neural(int input_dim, int width, int depth, NeuralInit mode,
                         bool scale_output, RandomStream& rng);

using Ranker = std::variant<LinearRanker, NeuralRanker>;

int ranker_param_count(const Ranker& r);

/// Reusable activation buffers for the neural forward/backward passes.
struct NeuralWorkspace {
  std::vector<double> activations;      // depth-1 hidden vectors, concatenated
  std::vector<double> preactivations;
};

double score(const LinearRanker& r, std::span<const double> x);
double score(const NeuralRanker& r, std::span<const double> x);
double score(const NeuralRanker& r, std::span<const double> x,
             NeuralWorkspace& ws);
double score(const Ranker& r, std::span<const double> x);

/// f(x_i) - f(x_j). Exactly antisymmetric.
double pair_logit(const Ranker& r, std::span<const double> x_i,
                  std::span<const double> x_j);

/// d f(x) / d theta, written into `out` (param_count entries). The
/// workspace must hold the activations of the matching forward call.
void score_param_gradient(const NeuralRanker& r, std::span<const double> x,
                          NeuralWorkspace& ws, std::span<double> out);
/// Convenience overload: runs the forward pass itself.
std::vector<double> score_param_gradient(const NeuralRanker& r,
                                         std::span<const double> x);

struct RoundPairs {
  int round = 0;
  std::vector<PairObservation> pairs;
};

/// Append-only record of per-round preference pairs; rounds strictly
/// increasing. A sliding window (trim_front) drops the oldest rounds when
/// memory has to stay bounded.
class History {
 public:
  void append(int round, std::vector<PairObservation> pairs);
  void trim_to_last(int max_rounds);
  std::span<const RoundPairs> rounds() const { return rounds_; }
  std::size_t total_pairs() const { return total_pairs_; }
  bool empty() const { return total_pairs_ == 0; }
  int last_round() const { return rounds_.empty() ? 0 : rounds_.back().round; }
  void clear();

 private:
  std::vector<RoundPairs> rounds_;
  std::size_t total_pairs_ = 0;
};

/// View of one training problem: a history plus optional per-pair pseudo
/// noise (gamma, one entry per pair in round-major order) and optional
/// per-parameter regularization-center offsets (neural only).
struct TrainingData {
  const History* history = nullptr;
  std::span<const double> gamma;           // empty = unperturbed
  std::span<const double> center_offsets;  // empty = center at theta0
};

struct TrainConfig {
  double lambda = 0.1;
  double learning_rate = 0.01;
  int epochs = 30;
  int batch_size = 0;  // 0 = full batch
  bool warm_start = true;
};

/// Perturbed pairwise cross-entropy objective. Linear rankers regularize
/// (lambda/2)||theta||^2; neural rankers (width*lambda/2)||theta - theta0||^2
/// (shifted by center_offsets/sqrt(width*lambda) when offsets are given).
double loss(const Ranker& r, const TrainingData& data, double lambda);

/// Analytic gradient of `loss`, written into `out`.
void loss_gradient(const Ranker& r, const TrainingData& data, double lambda,
                   std::span<double> out);
std::vector<double> loss_gradient(const Ranker& r, const TrainingData& data,
                                  double lambda);

/// Full-batch gradient descent for `epochs` steps starting from `start`
/// (the caller decides warm vs cold start by what it passes). When
/// epoch_losses is non-null the loss at the beginning of each epoch is
/// appended. Throws TrainError when the loss goes non-finite. Minibatch
/// mode shuffles with `shuffle_rng`.
Ranker train(const Ranker& start, const TrainingData& data,
             const TrainConfig& cfg, RandomStream* shuffle_rng = nullptr,
             std::vector<double>* epoch_losses = nullptr);

/// Per-parameter pseudo-noise offsets gamma_l ~ N(0, nu^2) for the
/// regularization-center variant. nu = 0 yields all zeros (and draws
/// nothing). Fresh draws each call.
std::vector<double> perturb_params_center(int param_count, double nu,
                                          RandomStream& rng);

/// Per-pair pseudo noise gamma ~ N(0, nu^2), one entry per pair of `h`,
/// in round-major order. nu = 0 yields zeros without consuming draws.
std::vector<double> draw_pair_noise(const History& h, double nu,
                                    RandomStream& rng);

}  // namespace ol2r
