#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ol2r/click.hpp"
#include "ol2r/dataset.hpp"
#include "ol2r/exploration.hpp"

namespace ol2r {

enum class Algorithm {
  p2_linear,
  p2_neural,
  ci_linear,
  ci_neural_full,
  ci_neural_diag,
  epsilon_greedy_linear,
  epsilon_greedy_neural,
};

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);
bool algorithm_is_neural(Algorithm a);

enum class DataSource { synthetic, letor };
enum class AlphaMode { constant, schedule };
enum class OfflineScoring { mean, member0 };

struct DatasetConfig {
  DataSource source = DataSource::synthetic;
  std::string train_path;
  std::string validation_path;
  std::string test_path;
  std::string synthetic_meta_path;
  Normalization normalization = Normalization::per_query_minmax;
  int feature_dim = 10;
  int n_train = 200;
  int n_validation = 0;
  int n_test = 100;
  int docs_per_query = 10;
  std::uint64_t synthetic_seed = 7;
};

struct SimulationConfig {
  std::string click_profile = "perfect";
  std::vector<double> custom_clicks;  // 10 probabilities when profile=custom
  int lookahead = 1;
  int rounds = 5000;
  int eval_interval = 50;
  double gamma = 0.9995;
};

struct AlgorithmConfig {
  Algorithm name = Algorithm::p2_linear;
  int members = 2;
  double nu2 = 0.1;
  bool perturb_params = false;
  double epsilon = 0.1;
  AlphaMode alpha_mode = AlphaMode::constant;
  double alpha = 0.1;
  double alpha_multiplier = 1.0;
  double alpha_noise_scale = 0.5;
  double alpha_delta = 1.0;
  GradFeatures grad_features = GradFeatures::current;
  std::vector<std::uint64_t> member_seeds;
};

struct TrainingConfig {
  double lambda = 0.1;
  double learning_rate = 0.01;
  int epochs = 0;  // 0 = auto: 30 for neural, 100 for linear
  int batch_size = 0;
  bool warm_start = true;
  int history_window = 0;  // rounds; 0 = unlimited
};

struct NetworkConfig {
  int width = 100;
  int depth = 2;
  NeuralInit init = NeuralInit::gaussian_ntk;
  bool scale_output = true;
};

struct RunConfig {
  std::vector<std::uint64_t> seeds = {1};
  std::string out_dir = ".";
  bool emit_timings = false;
  int checkpoint_interval = 0;  // rounds; 0 = none
  OfflineScoring offline_scoring = OfflineScoring::mean;
};

struct SweepGrids {
  std::vector<double> lambda_grid;
  std::vector<double> learning_rate_grid;
  std::vector<int> members_grid;
  std::vector<double> nu2_grid;
  std::vector<double> alpha_grid;
  std::vector<double> epsilon_grid;

  bool empty() const;
};

struct ExperimentConfig {
  DatasetConfig dataset;
  SimulationConfig simulation;
  AlgorithmConfig algorithm;
  TrainingConfig training;
  NetworkConfig network;
  RunConfig run;
  SweepGrids sweep;

  int resolved_epochs() const;
  ClickProfile resolved_click_profile() const;
};

/// Parses the key = value section format. Unknown sections or keys are
/// errors; so are values that fail validation.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

/// Stable rendering of every setting that influences a run's trajectory.
/// Sweep grids, output-only settings and the seed list are excluded, so
/// two configs hash equal exactly when they define the same experiment.
std::string canonical_text(const ExperimentConfig& cfg);
std::uint64_t config_hash(const ExperimentConfig& cfg);

void validate(const ExperimentConfig& cfg);

/// Cartesian product of the sweep grids over a base config. Grids the
/// algorithm does not consume are rejected; empty grids keep the base
/// value.
std::vector<ExperimentConfig> expand_grid(const ExperimentConfig& base);

/// A commented sample configuration covering every key.
std::string sample_config();

/// Raw key -> value pairs of one section, in file order. Used by readers
/// of sections the main parser passes through (bench).
std::vector<std::pair<std::string, std::string>> config_section(
    const std::string& text, const std::string& section);

}  // namespace ol2r
