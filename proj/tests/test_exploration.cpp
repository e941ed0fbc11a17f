#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>

#include "ol2r/errors.hpp"
#include "ol2r/exploration.hpp"
#include "ol2r/metrics.hpp"
#include "oracles.hpp"

using namespace ol2r;

namespace {

Query query_from_features(const std::vector<std::vector<double>>& features) {
  Query q;
  q.query_id = "q";
  for (const auto& f : features)
    q.documents.push_back({static_cast<int>(q.documents.size()), f, 0});
  return q;
}

Ensemble linear_ensemble(const std::vector<std::vector<double>>& thetas) {
  Ensemble e;
  for (const auto& t : thetas) {
    LinearRanker r;
    r.theta = t;
    e.members.emplace_back(r);
  }
  return e;
}

bool has_edge(const CertaintyPartition& p, int above, int below) {
  return std::any_of(p.certain.begin(), p.certain.end(),
                     [&](const CertainEdge& e) {
                       return e.above == above && e.below == below;
                     });
}

bool respects_edges(const std::vector<int>& order,
                    const CertaintyPartition& p) {
  std::vector<int> position(order.size());
  for (std::size_t r = 0; r < order.size(); ++r)
    position[static_cast<std::size_t>(order[r])] = static_cast<int>(r);
  return std::all_of(p.certain.begin(), p.certain.end(),
                     [&](const CertainEdge& e) {
                       return position[static_cast<std::size_t>(e.above)] <
                              position[static_cast<std::size_t>(e.below)];
                     });
}

// Kahn's algorithm as an acyclicity oracle.
bool is_acyclic(const CertaintyPartition& p, int n) {
  std::vector<int> indegree(static_cast<std::size_t>(n), 0);
  for (const auto& e : p.certain) ++indegree[static_cast<std::size_t>(e.below)];
  std::vector<int> stack;
  for (int i = 0; i < n; ++i)
    if (indegree[static_cast<std::size_t>(i)] == 0) stack.push_back(i);
  int emitted = 0;
  while (!stack.empty()) {
    const int doc = stack.back();
    stack.pop_back();
    ++emitted;
    for (const auto& e : p.certain)
      if (e.above == doc && --indegree[static_cast<std::size_t>(e.below)] == 0)
        stack.push_back(e.below);
  }
  return emitted == n;
}

}  // namespace

TEST_SUITE_BEGIN("exploration");

TEST_CASE("a single member makes every untied pair certain") {
  const auto q = query_from_features({{1.0}, {3.0}, {2.0}});
  const auto e = linear_ensemble({{1.0}});
  const auto p = ensemble_partition(e, q);
  CHECK(p.uncertain.empty());
  CHECK(p.certain.size() == 3);
  CHECK(has_edge(p, 1, 2));
  CHECK(has_edge(p, 2, 0));
  CHECK(has_edge(p, 1, 0));

  RandomStream rng(1);
  const auto order = topo_rank(p, q.size(), rng);
  CHECK(order == std::vector<int>{1, 2, 0});  // sorted by score
}

TEST_CASE("disagreeing members leave the pair uncertain") {
  const auto q = query_from_features({{1.0}, {2.0}});
  const auto e = linear_ensemble({{1.0}, {-1.0}});
  const auto p = ensemble_partition(e, q);
  CHECK(p.certain.empty());
  REQUIRE(p.uncertain.size() == 1);
  CHECK(p.uncertain[0] == std::pair<int, int>{0, 1});
}

TEST_CASE("exact score ties are classified uncertain") {
  const auto q = query_from_features({{1.0, 0.0}, {0.0, 1.0}});
  const auto e = linear_ensemble({{1.0, 1.0}});
  const auto p = ensemble_partition(e, q);
  CHECK(p.certain.empty());
  CHECK(p.uncertain.size() == 1);
}

TEST_CASE("members agreeing on a total order certify all three pairs") {
  const auto q = query_from_features({{1.0}, {2.0}, {3.0}});
  const auto e = linear_ensemble({{1.0}, {2.0}, {0.5}});
  const auto p = ensemble_partition(e, q);
  CHECK(p.uncertain.empty());
  REQUIRE(p.certain.size() == 3);
  // brute force: every member ranks 2 > 1 > 0
  CHECK(has_edge(p, 2, 1));
  CHECK(has_edge(p, 1, 0));
  CHECK(has_edge(p, 2, 0));
}

TEST_CASE("ensemble certain graphs are always acyclic and topo respects them") {
  RandomStream rng(123);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n_members = 1 + static_cast<int>(rng.uniform_index(5));
    const int v = 2 + static_cast<int>(rng.uniform_index(19));
    const int d = 3;
    std::vector<std::vector<double>> thetas(
        static_cast<std::size_t>(n_members));
    for (auto& t : thetas) {
      t.resize(d);
      for (auto& x : t) x = rng.normal();
    }
    std::vector<std::vector<double>> features(static_cast<std::size_t>(v));
    for (auto& f : features) {
      f.resize(d);
      for (auto& x : f) x = rng.uniform01();
    }
    const auto q = query_from_features(features);
    const auto p = ensemble_partition(linear_ensemble(thetas), q);
    CHECK(is_acyclic(p, v));
    CHECK(p.certain.size() + p.uncertain.size() ==
          static_cast<std::size_t>(v * (v - 1) / 2));
    int removed = 0;
    const auto order = topo_rank(p, v, rng, &removed);
    CHECK(removed == 0);
    CHECK(respects_edges(order, p));
  }
}

TEST_CASE("covariance worked example: lambda 1, one update") {
  CovarianceState cov(CovarianceMode::full, 2, 1.0);
  cov.update(std::vector<double>{1.0, 0.0});
  CHECK(cov.matrix().at(0, 0) == 2.0);
  CHECK(cov.matrix().at(0, 1) == 0.0);
  CHECK(cov.matrix().at(1, 1) == 1.0);
  CHECK(cov.inverse().at(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cov.inverse().at(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cov.inverse().at(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("incremental inverse tracks the dense oracle over 100 updates") {
  const int d = 50;
  CovarianceState cov(CovarianceMode::full, d, 1.0);
  RandomStream rng(7);
  for (int k = 0; k < 100; ++k) {
    std::vector<double> v(static_cast<std::size_t>(d));
    for (auto& x : v) x = 2.0 * rng.uniform01() - 1.0;
    cov.update(v);
  }
  const auto oracle_inv = oracle::gauss_jordan_inverse(cov.matrix().a, d);
  double worst = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      worst = std::max(worst,
                       std::fabs(cov.inverse().at(i, j) -
                                 oracle_inv[static_cast<std::size_t>(i) * d + j]));
  CHECK(worst < 1e-8);
  CHECK(cov.inverse_error() < 1e-6);
}

TEST_CASE("cholesky log-det matches the LU oracle") {
  const int d = 20;
  CovarianceState cov(CovarianceMode::full, d, 0.5);
  RandomStream rng(11);
  for (int k = 0; k < 40; ++k) {
    std::vector<double> v(static_cast<std::size_t>(d));
    for (auto& x : v) x = rng.normal();
    cov.update(v);
  }
  const double lib = cov.log_det();
  const double oracle_val = oracle::lu_logdet(cov.matrix().a, d);
  CHECK(std::fabs(lib - oracle_val) < 1e-8 * std::fabs(oracle_val));
}

TEST_CASE("diagonal log-det is the sum of logs") {
  CovarianceState cov(CovarianceMode::diagonal, 2, 1.0);
  cov.update(std::vector<double>{1.0, 0.0});         // diag (2, 1)
  cov.update(std::vector<double>{0.0, std::sqrt(2.0)});  // diag (2, 3)
  CHECK(cov.log_det() == doctest::Approx(std::log(6.0)).epsilon(1e-12));
}

TEST_CASE("empty update leaves the state untouched") {
  CovarianceState cov(CovarianceMode::full, 3, 2.0);
  const auto before = cov.matrix().a;
  // no update calls at all
  CHECK(cov.matrix().a == before);
  CHECK(cov.update_count() == 0);
  CHECK(cov.log_det_ratio() == doctest::Approx(0.0));
}

TEST_CASE("full covariance beyond the gate is refused") {
  CHECK_THROWS_AS(CovarianceState(CovarianceMode::full, 5000, 1.0), GateError);
}

TEST_CASE("width closed form at A = lambda I") {
  const double lambda = 4.0;
  CovarianceState cov(CovarianceMode::full, 3, lambda);
  const std::vector<double> x = {1.0, 2.0, 2.0};  // norm 3
  CHECK(std::sqrt(cov.width_sq(x)) == doctest::Approx(3.0 / 2.0).epsilon(1e-12));
}

TEST_CASE("alpha schedule: constant override, t=0 reduction, monotonicity") {
  CovarianceState cov(CovarianceMode::full, 4, 1.0);
  AlphaParams params;
  params.constant = 0.25;
  CHECK(alpha_schedule(cov, params) == 0.25);

  params.constant.reset();
  params.multiplier = 2.0;
  params.additive = 3.0;
  params.delta = 1.0;
  CHECK(alpha_schedule(cov, params) == doctest::Approx(6.0).epsilon(1e-12));

  RandomStream rng(13);
  double prev = alpha_schedule(cov, params);
  for (int k = 0; k < 1000; ++k) {
    std::vector<double> v(4);
    for (auto& x : v) x = rng.normal();
    cov.update(v);
    if (k % 50 == 0) {
      const double cur = alpha_schedule(cov, params);
      CHECK(cur >= prev - 1e-12);
      prev = cur;
    }
  }
}

TEST_CASE("ci partition: cold start explores everything, tight alpha exploits") {
  LinearRanker r;
  r.theta = {1.0};
  const auto q = query_from_features({{0.2}, {0.5}, {0.9}});
  CovarianceState cov(CovarianceMode::full, 1, 0.01);

  // huge width: every pair uncertain
  const auto wide = ci_partition(Ranker(r), cov, 100.0, q);
  CHECK(wide.certain.empty());
  CHECK(wide.uncertain.size() == 3);

  // alpha = 0 reduces to the single-member ensemble behaviour
  const auto tight = ci_partition(Ranker(r), cov, 0.0, q);
  CHECK(tight.uncertain.empty());
  CHECK(tight.certain.size() == 3);
  CHECK(has_edge(tight, 2, 1));
  CHECK(has_edge(tight, 1, 0));
}

TEST_CASE("diagonal and full widths differ under correlated updates") {
  // Hand-built 2x2: A = I + v v^T with v = (1, 1):
  //   full A = [[2,1],[1,2]], inverse [[2,-1],[-1,2]]/3
  //   diagonal approximation only keeps (2, 2).
  CovarianceState full(CovarianceMode::full, 2, 1.0);
  CovarianceState diag(CovarianceMode::diagonal, 2, 1.0);
  const std::vector<double> v = {1.0, 1.0};
  full.update(v);
  diag.update(v);
  const std::vector<double> probe = {1.0, -1.0};
  // full: probe^T A^{-1} probe = (2+1+1+2)/3 = 2; diag: 1/2 + 1/2 = 1
  CHECK(full.width_sq(probe) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(diag.width_sq(probe) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("neural ci features scale gradients by sqrt(width)") {
  RandomStream rng(17);
  const auto net = init_neural(3, 4, 2, NeuralInit::gaussian_ntk, true, rng);
  const auto q = query_from_features({{0.1, 0.2, 0.3}, {0.9, 0.8, 0.7}});
  const auto rows = covariance_features(Ranker(net), q, GradFeatures::current);
  REQUIRE(rows.size() == 2 * static_cast<std::size_t>(net.param_count()));
  const auto direct = score_param_gradient(net, q.documents[0].features);
  for (std::size_t k = 0; k < direct.size(); ++k)
    CHECK(rows[k] == doctest::Approx(direct[k] / 2.0).epsilon(1e-12));

  // initial-parameter features differ once the network has moved
  NeuralRanker moved = net;
  for (auto& w : moved.theta) w += 0.1;
  const auto rows_current =
      covariance_features(Ranker(moved), q, GradFeatures::current);
  const auto rows_initial =
      covariance_features(Ranker(moved), q, GradFeatures::initial);
  CHECK(rows_current != rows_initial);
  CHECK(rows_initial == rows);  // theta0 is the frozen copy of net's init
}

TEST_CASE("topo rank on a certain chain is deterministic") {
  CertaintyPartition p;
  p.n_docs = 3;
  p.certain = {{0, 1, 0.4}, {1, 2, 0.4}, {0, 2, 0.4}};
  RandomStream rng(19);
  for (int trial = 0; trial < 20; ++trial)
    CHECK(topo_rank(p, 3, rng) == std::vector<int>{0, 1, 2});
}

TEST_CASE("unconstrained topo rank is uniform over permutations") {
  CertaintyPartition p;
  p.n_docs = 4;
  RandomStream rng(23);
  std::map<std::vector<int>, int> counts;
  const int n = 10000;
  for (int trial = 0; trial < n; ++trial) ++counts[topo_rank(p, 4, rng)];
  CHECK(counts.size() == 24);
  const double expected = n / 24.0;
  double chi2 = 0.0;
  for (const auto& [perm, c] : counts)
    chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < oracle::chi2_critical_99(23));
}

TEST_CASE("single certain edge is respected, third document floats") {
  CertaintyPartition p;
  p.n_docs = 3;
  p.certain = {{0, 1, 0.3}};
  RandomStream rng(29);
  bool c_first = false, c_last = false;
  for (int trial = 0; trial < 500; ++trial) {
    const auto order = topo_rank(p, 3, rng);
    CHECK(respects_edges(order, p));
    if (order.front() == 2) c_first = true;
    if (order.back() == 2) c_last = true;
  }
  CHECK(c_first);
  CHECK(c_last);
}

TEST_CASE("cycle fallback drops the weakest edge and reports it") {
  CertaintyPartition p;
  p.n_docs = 3;
  p.certain = {{0, 1, 0.4}, {1, 2, 0.3}, {2, 0, 0.05}};
  RandomStream rng(31);
  int removed = -1;
  const auto order = topo_rank(p, 3, rng, &removed);
  CHECK(removed == 1);
  CHECK(order == std::vector<int>{0, 1, 2});  // weakest edge 2->0 dropped
}

TEST_CASE("empty partition of zero documents") {
  CertaintyPartition p;
  RandomStream rng(1);
  CHECK(topo_rank(p, 0, rng).empty());
}

TEST_CASE("epsilon greedy at the extremes") {
  LinearRanker r;
  r.theta = {1.0};
  const auto q = query_from_features({{0.1}, {0.9}, {0.5}});
  RandomStream rng(37);
  for (int trial = 0; trial < 20; ++trial)
    CHECK(epsilon_greedy_rank(Ranker(r), q, 0.0, rng) ==
          std::vector<int>{1, 2, 0});

  std::map<std::vector<int>, int> counts;
  for (int trial = 0; trial < 6000; ++trial)
    ++counts[epsilon_greedy_rank(Ranker(r), q, 1.0, rng)];
  CHECK(counts.size() == 6);
  for (const auto& [perm, c] : counts) CHECK(c > 6000 / 6 * 0.8);
}

TEST_CASE("epsilon greedy explores at the advertised rate") {
  LinearRanker r;
  r.theta = {1.0};
  const auto q = query_from_features({{0.9}, {0.1}});
  RandomStream rng(41);
  const int n = 100000;
  int better_first = 0;
  for (int trial = 0; trial < n; ++trial)
    if (epsilon_greedy_rank(Ranker(r), q, 0.5, rng).front() == 0)
      ++better_first;
  // 1 - eps + eps/2
  CHECK(std::fabs(better_first / static_cast<double>(n) - 0.75) < 0.01);
}

TEST_CASE("partition cost scales quadratically in the candidate count") {
  RandomStream rng(53);
  const auto net = init_neural(50, 16, 2, NeuralInit::gaussian_ntk, true, rng);
  CovarianceState cov(CovarianceMode::diagonal, net.param_count(), 0.1);

  auto random_query = [&](int v) {
    std::vector<std::vector<double>> features(static_cast<std::size_t>(v));
    for (auto& f : features) {
      f.resize(50);
      for (auto& x : f) x = rng.uniform01();
    }
    return query_from_features(features);
  };

  const std::vector<int> sizes = {16, 32, 64};
  std::vector<double> median_us;
  for (int v : sizes) {
    const auto q = random_query(v);
    std::vector<double> times;
    for (int rep = 0; rep < 31; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      (void)ci_partition(Ranker(net), cov, 0.05, q);
      times.push_back(std::chrono::duration<double, std::micro>(
                          std::chrono::steady_clock::now() - t0)
                          .count());
    }
    std::sort(times.begin(), times.end());
    median_us.push_back(times[times.size() / 2]);
  }
  // least-squares slope of log(time) against log(V)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double x = std::log(static_cast<double>(sizes[i]));
    const double y = std::log(median_us[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(sizes.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope > 1.7);
  CHECK(slope < 2.3);
}

TEST_SUITE_END();
