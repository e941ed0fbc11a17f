#include <doctest.h>

#include <cmath>

#include "ol2r/errors.hpp"
#include "ol2r/ranker.hpp"
#include "oracles.hpp"

using namespace ol2r;

namespace {

PairObservation make_pair(std::vector<double> xi, std::vector<double> xj,
                          double y) {
  PairObservation p;
  p.features_i = std::move(xi);
  p.features_j = std::move(xj);
  p.label = y;
  return p;
}

History history_of(std::vector<PairObservation> pairs) {
  History h;
  h.append(1, std::move(pairs));
  return h;
}

History random_history(int n_pairs, int dim, RandomStream& rng) {
  std::vector<PairObservation> pairs;
  for (int k = 0; k < n_pairs; ++k) {
    std::vector<double> xi(static_cast<std::size_t>(dim)),
        xj(static_cast<std::size_t>(dim));
    for (auto& v : xi) v = rng.uniform01();
    for (auto& v : xj) v = rng.uniform01();
    pairs.push_back(make_pair(std::move(xi), std::move(xj),
                              rng.bernoulli(0.5) ? 1.0 : 0.0));
  }
  return history_of(std::move(pairs));
}

double loss_at_params(const Ranker& proto, const TrainingData& data,
                      double lambda, const std::vector<double>& params) {
  Ranker r = proto;
  if (auto* lin = std::get_if<LinearRanker>(&r))
    lin->theta = params;
  else
    std::get<NeuralRanker>(r).theta = params;
  return loss(r, data, lambda);
}

}  // namespace

TEST_SUITE_BEGIN("ranker");

TEST_CASE("linear score is the dot product") {
  LinearRanker r;
  r.theta = {1.0, -1.0};
  CHECK(score(r, std::vector<double>{2.0, 3.0}) == -1.0);
  CHECK_THROWS_AS(score(r, std::vector<double>{1.0}), DataError);
}

TEST_CASE("zero-weight network scores zero") {
  NeuralRanker net;
  net.input_dim = 3;
  net.width = 4;
  net.depth = 2;
  net.theta.assign(static_cast<std::size_t>(neural_param_count(3, 4, 2)), 0.0);
  net.theta0 = net.theta;
  CHECK(score(net, std::vector<double>{1.0, 2.0, 3.0}) == 0.0);
}

TEST_CASE("parameter count formula") {
  CHECK(neural_param_count(136, 100, 2) == 100 + 100 * 136);
  CHECK(neural_param_count(10, 16, 3) == 16 + 160 + 256);
  RandomStream rng(1);
  const auto net = init_neural(136, 100, 2, NeuralInit::gaussian_ntk, true, rng);
  CHECK(net.param_count() == 13700);
}

TEST_CASE("antisymmetric initialization scores zero everywhere") {
  RandomStream rng(5);
  for (int depth : {2, 3}) {
    const auto net =
        init_neural(7, 8, depth, NeuralInit::antisymmetric, true, rng);
    RandomStream xs(9);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> x(7);
      for (auto& v : x) v = xs.normal();
      CHECK(std::fabs(score(net, x)) < 1e-9);
    }
  }
  CHECK_THROWS_AS(init_neural(7, 9, 2, NeuralInit::antisymmetric, true, rng),
                  ConfigError);
}

TEST_CASE("same init seed reproduces identical weights") {
  RandomStream a(42), b(42);
  const auto na = init_neural(5, 6, 3, NeuralInit::gaussian_ntk, true, a);
  const auto nb = init_neural(5, 6, 3, NeuralInit::gaussian_ntk, true, b);
  CHECK(na.theta == nb.theta);
}

TEST_CASE("pair logit is exactly antisymmetric") {
  RandomStream rng(3);
  const Ranker net = init_neural(4, 6, 2, NeuralInit::gaussian_ntk, true, rng);
  LinearRanker lin;
  lin.theta = {0.3, -0.7, 0.1, 2.0};
  const Ranker rl = lin;
  RandomStream xs(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> xi(4), xj(4);
    for (auto& v : xi) v = xs.normal();
    for (auto& v : xj) v = xs.normal();
    for (const Ranker* r : {&net, &rl})
      CHECK(pair_logit(*r, xi, xj) + pair_logit(*r, xj, xi) == 0.0);
  }
  CHECK(pair_logit(rl, std::vector<double>{3.0, 0, 0, 0},
                   std::vector<double>{1.0, 0, 0, 0}) ==
        doctest::Approx(0.6).epsilon(1e-12));
  CHECK(sigmoid(pair_logit(rl, std::vector<double>{1, 1, 1, 1},
                           std::vector<double>{1, 1, 1, 1})) == 0.5);
}

TEST_CASE("single zero-logit pair costs ln 2") {
  LinearRanker r(2);  // theta = 0 so the logit and the regularizer vanish
  const auto h = history_of({make_pair({1, 0}, {0, 1}, 1.0)});
  TrainingData data{&h, {}, {}};
  CHECK(loss(r, data, 0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("zero noise equals the unperturbed loss bit for bit") {
  RandomStream rng(7);
  const auto h = random_history(20, 4, rng);
  LinearRanker lin(4);
  lin.theta = {0.2, -0.4, 0.9, 0.0};
  const std::vector<double> zeros(h.total_pairs(), 0.0);
  TrainingData with_zeros{&h, zeros, {}};
  TrainingData without{&h, {}, {}};
  CHECK(loss(lin, with_zeros, 0.1) == loss(lin, without, 0.1));
  CHECK(loss_gradient(Ranker(lin), with_zeros, 0.1) ==
        loss_gradient(Ranker(lin), without, 0.1));
}

TEST_CASE("effective labels outside [0,1] stay defined and match the formula") {
  LinearRanker r;
  r.theta = {0.5};
  const auto h = history_of({make_pair({1.0}, {0.0}, 1.0)});
  const std::vector<double> gamma = {0.3};  // effective label 1.3
  TrainingData data{&h, gamma, {}};
  const double z = 0.5;
  const double sig = 1.0 / (1.0 + std::exp(-z));
  const double expected = -1.3 * std::log(sig) - (1.0 - 1.3) * std::log(1.0 - sig);
  const double reg = 0.5 * 0.01 * 0.25;
  CHECK(loss(r, data, 0.01) == doctest::Approx(expected + reg).epsilon(1e-12));
  CHECK(std::isfinite(loss(r, data, 0.01)));
}

TEST_CASE("zero residual leaves only the regularizer gradient") {
  LinearRanker r;
  r.theta = {0.0};
  const auto h = history_of({make_pair({1.0}, {0.0}, 0.5)});
  TrainingData data{&h, {}, {}};  // logit 0 -> sigma = 0.5 = y
  const auto g = loss_gradient(Ranker(r), data, 1e-9);
  CHECK(std::fabs(g[0]) < 1e-12);
}

TEST_CASE("analytic gradients match finite differences") {
  RandomStream rng(11);

  SUBCASE("linear") {
    const auto h = random_history(30, 5, rng);
    std::vector<double> gamma(h.total_pairs());
    for (auto& g : gamma) g = rng.normal(0.0, 0.3);
    TrainingData data{&h, gamma, {}};
    const Ranker proto = LinearRanker(5);
    for (int point = 0; point < 20; ++point) {
      std::vector<double> params(5);
      for (auto& v : params) v = rng.normal();
      Ranker at = proto;
      std::get<LinearRanker>(at).theta = params;
      const auto analytic = loss_gradient(at, data, 0.1);
      const auto fd = oracle::finite_difference_gradient(
          [&](const std::vector<double>& p) {
            return loss_at_params(proto, data, 0.1, p);
          },
          params);
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < fd.size(); ++i) {
        num += (analytic[i] - fd[i]) * (analytic[i] - fd[i]);
        den += fd[i] * fd[i];
      }
      CHECK(std::sqrt(num) < 1e-5 * std::max(1.0, std::sqrt(den)));
    }
  }

  SUBCASE("neural with center offsets") {
    const auto h = random_history(10, 4, rng);
    const auto net = init_neural(4, 16, 2, NeuralInit::gaussian_ntk, true, rng);
    std::vector<double> gamma(h.total_pairs());
    for (auto& g : gamma) g = rng.normal(0.0, 0.3);
    std::vector<double> offsets(static_cast<std::size_t>(net.param_count()));
    for (auto& o : offsets) o = rng.normal(0.0, 0.1);
    TrainingData data{&h, gamma, offsets};
    for (int point = 0; point < 5; ++point) {
      Ranker at = net;
      for (auto& v : std::get<NeuralRanker>(at).theta)
        v += rng.normal(0.0, 0.05);
      const auto analytic = loss_gradient(at, data, 0.1);
      const auto fd = oracle::finite_difference_gradient(
          [&](const std::vector<double>& p) {
            return loss_at_params(net, data, 0.1, p);
          },
          std::get<NeuralRanker>(at).theta, 1e-5);
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < fd.size(); ++i) {
        num += (analytic[i] - fd[i]) * (analytic[i] - fd[i]);
        den += fd[i] * fd[i];
      }
      CHECK(std::sqrt(num) < 1e-3 * std::max(1.0, std::sqrt(den)));
    }
  }
}

TEST_CASE("linear loss is convex for effective labels in [0,1]") {
  RandomStream rng(13);
  const auto h = random_history(15, 3, rng);
  TrainingData data{&h, {}, {}};
  const Ranker proto = LinearRanker(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(3), b(3), mid(3);
    for (int i = 0; i < 3; ++i) {
      a[static_cast<std::size_t>(i)] = rng.normal(0.0, 3.0);
      b[static_cast<std::size_t>(i)] = rng.normal(0.0, 3.0);
      mid[static_cast<std::size_t>(i)] = 0.5 * (a[static_cast<std::size_t>(i)] +
                                                b[static_cast<std::size_t>(i)]);
    }
    const double la = loss_at_params(proto, data, 0.1, a);
    const double lb = loss_at_params(proto, data, 0.1, b);
    const double lm = loss_at_params(proto, data, 0.1, mid);
    CHECK(lm <= 0.5 * (la + lb) + 1e-9);
  }
}

TEST_CASE("training an empty history returns the initialization") {
  History h;
  TrainingData data{&h, {}, {}};
  TrainConfig cfg;
  cfg.lambda = 0.1;
  cfg.learning_rate = 0.05;
  cfg.epochs = 20;

  const Ranker lin = LinearRanker(4);
  const Ranker trained = train(lin, data, cfg);
  CHECK(std::get<LinearRanker>(trained).theta == std::vector<double>(4, 0.0));

  RandomStream rng(2);
  const Ranker net = init_neural(4, 6, 2, NeuralInit::gaussian_ntk, true, rng);
  const Ranker tnet = train(net, data, cfg);
  CHECK(std::get<NeuralRanker>(tnet).theta ==
        std::get<NeuralRanker>(net).theta);
}

TEST_CASE("separable history trains to the right signs, near the grid optimum") {
  const auto h = history_of({make_pair({1.0, 0.0}, {0.0, 1.0}, 1.0),
                             make_pair({0.0, 1.0}, {1.0, 0.0}, 0.0)});
  TrainingData data{&h, {}, {}};
  TrainConfig cfg;
  cfg.lambda = 0.01;
  cfg.learning_rate = 1.0;
  cfg.epochs = 3000;
  const Ranker result = train(Ranker(LinearRanker(2)), data, cfg);
  const auto& theta = std::get<LinearRanker>(result).theta;
  CHECK(theta[0] > 0.0);
  CHECK(theta[1] < 0.0);
  double best_grid = 1e300;
  for (double t0 = -5.0; t0 <= 5.0; t0 += 0.1)
    for (double t1 = -5.0; t1 <= 5.0; t1 += 0.1)
      best_grid = std::min(
          best_grid, loss_at_params(LinearRanker(2), data, 0.01, {t0, t1}));
  CHECK(loss(result, data, 0.01) <= best_grid + 1e-6);
}

TEST_CASE("loss decreases monotonically for a stable learning rate") {
  RandomStream rng(17);
  const auto h = random_history(40, 6, rng);
  TrainingData data{&h, {}, {}};
  TrainConfig cfg;
  cfg.lambda = 0.1;
  cfg.learning_rate = 0.5;
  cfg.epochs = 50;
  std::vector<double> losses;
  train(Ranker(LinearRanker(6)), data, cfg, nullptr, &losses);
  REQUIRE(losses.size() == 50);
  for (std::size_t i = 1; i < losses.size(); ++i)
    CHECK(losses[i] <= losses[i - 1] + 1e-12);
}

TEST_CASE("a huge lambda pins the linear minimizer near zero") {
  RandomStream rng(19);
  const auto h = random_history(20, 3, rng);
  TrainingData data{&h, {}, {}};
  TrainConfig cfg;
  cfg.lambda = 1e4;
  cfg.learning_rate = 0.001;  // the regularizer dominates the curvature
  cfg.epochs = 1000;
  const auto result = train(Ranker(LinearRanker(3)), data, cfg);
  for (double v : std::get<LinearRanker>(result).theta)
    CHECK(std::fabs(v) < 1e-2);
}

TEST_CASE("training is deterministic and never mutates its input") {
  RandomStream rng(23);
  const auto h = random_history(25, 4, rng);
  std::vector<double> gamma(h.total_pairs());
  for (auto& g : gamma) g = rng.normal(0.0, 0.3);
  TrainingData data{&h, gamma, {}};
  TrainConfig cfg;
  cfg.lambda = 0.1;
  cfg.learning_rate = 0.2;
  cfg.epochs = 30;
  const Ranker start = LinearRanker(4);
  const auto r1 = train(start, data, cfg);
  const auto r2 = train(start, data, cfg);
  CHECK(std::get<LinearRanker>(r1).theta == std::get<LinearRanker>(r2).theta);
  CHECK(std::get<LinearRanker>(start).theta == std::vector<double>(4, 0.0));
}

TEST_CASE("minibatch mode still learns the separable problem") {
  const auto h = history_of({make_pair({1.0, 0.0}, {0.0, 1.0}, 1.0),
                             make_pair({0.9, 0.1}, {0.2, 0.8}, 1.0),
                             make_pair({0.1, 0.9}, {0.8, 0.1}, 0.0)});
  TrainingData data{&h, {}, {}};
  TrainConfig cfg;
  cfg.lambda = 0.01;
  cfg.learning_rate = 0.5;
  cfg.epochs = 400;
  cfg.batch_size = 2;
  RandomStream shuffle(31);
  const auto result = train(Ranker(LinearRanker(2)), data, cfg, &shuffle);
  const auto& theta = std::get<LinearRanker>(result).theta;
  CHECK(theta[0] > 0.0);
  CHECK(theta[1] < 0.0);
}

TEST_CASE("history windows drop the oldest rounds") {
  History h;
  h.append(1, {make_pair({1.0}, {0.0}, 1.0)});
  h.append(2, {make_pair({0.5}, {0.0}, 1.0), make_pair({0.2}, {0.0}, 0.0)});
  h.append(5, {make_pair({0.1}, {0.0}, 1.0)});
  CHECK(h.total_pairs() == 4);
  CHECK(h.last_round() == 5);
  CHECK_THROWS_AS(h.append(5, {}), DataError);
  h.trim_to_last(2);
  CHECK(h.rounds().size() == 2);
  CHECK(h.total_pairs() == 3);
  CHECK(h.rounds().front().round == 2);
}

TEST_CASE("center offsets have the requested variance and are fresh per call") {
  RandomStream rng(37);
  const auto zero = perturb_params_center(100, 0.0, rng);
  CHECK(zero == std::vector<double>(100, 0.0));

  const double nu = 0.7;
  double sum = 0.0, sumsq = 0.0;
  const int n = 100000;
  std::vector<double> first, second;
  for (int block = 0; block < n / 100; ++block) {
    const auto offsets = perturb_params_center(100, nu, rng);
    if (block == 0) first = offsets;
    if (block == 1) second = offsets;
    for (double v : offsets) {
      sum += v;
      sumsq += v * v;
    }
  }
  CHECK(first != second);
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::fabs(var - nu * nu) < 0.02 * nu * nu);
}

TEST_CASE("pair noise draws nothing at nu = 0 and one value per pair otherwise") {
  History h;
  h.append(1, {make_pair({1.0}, {0.0}, 1.0), make_pair({0.3}, {0.1}, 0.0)});
  RandomStream a(43), b(43);
  const auto zeros = draw_pair_noise(h, 0.0, a);
  CHECK(zeros == std::vector<double>(2, 0.0));
  CHECK(a.next_u64() == b.next_u64());
  RandomStream c(47);
  const auto noise = draw_pair_noise(h, 0.5, c);
  CHECK(noise.size() == 2);
  CHECK(noise[0] != noise[1]);
}

TEST_SUITE_END();
