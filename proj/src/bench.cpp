#include "ol2r/bench.hpp"

#include <algorithm>
#include <sstream>

#include "ol2r/config.hpp"
#include "ol2r/errors.hpp"
#include "ol2r/experiment.hpp"

namespace ol2r {

namespace {

std::vector<std::string> split_commas(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : v) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ' && c != '\t') {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

ExperimentConfig bench_experiment_config(const BenchConfig& b,
                                         const std::string& policy,
                                         int width) {
  ExperimentConfig cfg;
  cfg.dataset.source = DataSource::synthetic;
  cfg.dataset.feature_dim = b.feature_dim;
  cfg.dataset.n_train = b.n_queries;
  cfg.dataset.n_validation = 0;
  cfg.dataset.n_test = 0;
  cfg.dataset.docs_per_query = b.docs_per_query;
  cfg.dataset.synthetic_seed = b.dataset_seed;
  cfg.simulation.click_profile = b.click_profile;
  cfg.simulation.rounds = b.rounds;
  cfg.simulation.eval_interval = b.rounds + 1;  // no offline evals
  cfg.training.lambda = b.lambda;
  cfg.training.learning_rate = b.learning_rate;
  cfg.training.epochs = b.epochs;
  cfg.training.history_window = b.history_window;
  cfg.network.width = width;
  cfg.network.depth = 2;
  cfg.algorithm.nu2 = b.nu2;
  cfg.algorithm.alpha_mode = AlphaMode::constant;
  cfg.algorithm.alpha = b.alpha;
  cfg.run.emit_timings = true;

  if (policy == "ci_full") {
    cfg.algorithm.name = Algorithm::ci_neural_full;
    cfg.algorithm.members = 1;
  } else if (policy == "ci_diag") {
    cfg.algorithm.name = Algorithm::ci_neural_diag;
    cfg.algorithm.members = 1;
  } else if (policy.rfind("ensemble:", 0) == 0) {
    cfg.algorithm.name = Algorithm::p2_neural;
    cfg.algorithm.members = std::stoi(policy.substr(9));
  } else {
    throw ConfigError("bench: unknown policy token '" + policy +
                      "' (expected ci_full, ci_diag or ensemble:<N>)");
  }
  validate(cfg);
  return cfg;
}

std::int64_t median_of(std::vector<std::int64_t> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

const BenchPolicyResult* find_result(const BenchReport& report, int width,
                                     const std::string& policy) {
  for (const auto& r : report.results)
    if (r.width == width && r.policy == policy) return &r;
  return nullptr;
}

}  // namespace

BenchConfig parse_bench_config(const std::string& text) {
  BenchConfig b;
  for (const auto& [key, value] : config_section(text, "bench")) {
    if (key == "widths") {
      b.widths.clear();
      for (const auto& tok : split_commas(value))
        b.widths.push_back(std::stoi(tok));
    } else if (key == "rounds") {
      b.rounds = std::stoi(value);
    } else if (key == "policies") {
      b.policies = split_commas(value);
    } else if (key == "feature_dim") {
      b.feature_dim = std::stoi(value);
    } else if (key == "docs_per_query") {
      b.docs_per_query = std::stoi(value);
    } else if (key == "n_queries") {
      b.n_queries = std::stoi(value);
    } else if (key == "dataset_seed") {
      b.dataset_seed = std::stoull(value);
    } else if (key == "seed") {
      b.seed = std::stoull(value);
    } else if (key == "lambda") {
      b.lambda = std::stod(value);
    } else if (key == "learning_rate") {
      b.learning_rate = std::stod(value);
    } else if (key == "epochs") {
      b.epochs = std::stoi(value);
    } else if (key == "history_window") {
      b.history_window = std::stoi(value);
    } else if (key == "nu2") {
      b.nu2 = std::stod(value);
    } else if (key == "alpha") {
      b.alpha = std::stod(value);
    } else if (key == "click_profile") {
      b.click_profile = value;
    } else if (key == "median_window") {
      b.median_window = std::stoi(value);
    } else {
      throw ConfigError("unknown config key [bench] " + key);
    }
  }
  return b;
}

BenchReport run_bench(const BenchConfig& cfg) {
  BenchReport report;
  report.config = cfg;

  for (int width : cfg.widths) {
    for (const auto& policy : cfg.policies) {
      // GateError from an oversized full covariance propagates: the
      // refusal is the correct outcome, not a skipped row.
      const ExperimentConfig exp = bench_experiment_config(cfg, policy, width);
      const RunRecord rec = run_experiment(exp, cfg.seed);
      if (rec.summary.failed)
        throw TrainError("bench run failed: " + rec.summary.error, -1);

      const int window =
          std::min<int>(cfg.median_window, static_cast<int>(rec.rows.size()));
      std::vector<std::int64_t> partition, topo, cov, training;
      for (std::size_t i = rec.rows.size() - static_cast<std::size_t>(window);
           i < rec.rows.size(); ++i) {
        partition.push_back(rec.rows[i].t_partition_us);
        topo.push_back(rec.rows[i].t_topo_us);
        cov.push_back(rec.rows[i].t_cov_us);
        training.push_back(rec.rows[i].t_train_us);
      }
      BenchPolicyResult r;
      r.policy = policy;
      r.width = width;
      r.partition_us = median_of(partition);
      r.topo_us = median_of(topo);
      r.cov_us = median_of(cov);
      r.train_us = median_of(training);
      report.results.push_back(r);
    }
  }

  // Qualitative ordering of exploration cost (partition + covariance).
  report.ordering_ok = true;
  for (int width : cfg.widths) {
    const auto* full = find_result(report, width, "ci_full");
    const auto* diag = find_result(report, width, "ci_diag");
    const auto* ens2 = find_result(report, width, "ensemble:2");
    const auto* ens1 = find_result(report, width, "ensemble:1");
    auto note = [&](bool ok, const std::string& text) {
      report.notes.push_back((ok ? "pass: " : "FAIL: ") + text +
                             " (width " + std::to_string(width) + ")");
      report.ordering_ok = report.ordering_ok && ok;
    };
    if (full && ens2)
      note(full->exploration_us() >= 10 * ens2->exploration_us(),
           "full-CI exploration >= 10x ensemble(2)");
    if (full && diag)
      note(full->exploration_us() > diag->exploration_us(),
           "full-CI exploration > diag-CI");
    if (diag && ens2)
      note(diag->exploration_us() >= ens2->exploration_us(),
           "diag-CI exploration >= ensemble(2)");
    if (diag && ens1)
      note(diag->exploration_us() >= ens1->exploration_us(),
           "diag-CI exploration >= ensemble(1)");
    if (ens2 && ens1)
      note(ens2->exploration_us() > ens1->exploration_us(),
           "ensemble(2) exploration > ensemble(1)");
  }
  return report;
}

std::string BenchReport::table() const {
  std::ostringstream os;
  os << "policy        width  partition_us  topo_us  cov_us  train_us  "
        "explore_us\n";
  for (const auto& r : results) {
    os << r.policy;
    for (std::size_t i = r.policy.size(); i < 14; ++i) os << ' ';
    os << r.width << "\t" << r.partition_us << "\t" << r.topo_us << "\t"
       << r.cov_us << "\t" << r.train_us << "\t" << r.exploration_us() << '\n';
  }
  for (const auto& n : notes) os << n << '\n';
  os << (ordering_ok ? "ordering: ok" : "ordering: VIOLATED") << '\n';
  return os.str();
}

}  // namespace ol2r
