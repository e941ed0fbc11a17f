#include "ol2r/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ol2r/checkpoint.hpp"
#include "ol2r/errors.hpp"
#include "ol2r/policy.hpp"
#include "ol2r/serialize.hpp"

namespace ol2r {

const char* kCsvHeader =
    "round,query_id,online_ndcg,discounted_online,cum_online_ndcg,"
    "regret_pairs,cum_regret,offline_ndcg10,n_uncertain,t_partition_us,"
    "t_topo_us,t_train_us,t_cov_us";

Dataset load_dataset(const ExperimentConfig& cfg) {
  const auto& d = cfg.dataset;
  if (d.source == DataSource::synthetic)
    return make_synthetic(d.n_train, d.n_validation, d.n_test,
                          d.docs_per_query, d.feature_dim, d.synthetic_seed);

  Dataset ds;
  ds.feature_dim = d.feature_dim;
  ds.normalization = d.normalization;
  ds.train = load_letor(d.train_path, d.feature_dim);
  if (!d.validation_path.empty())
    ds.validation = load_letor(d.validation_path, d.feature_dim);
  if (!d.test_path.empty()) ds.test = load_letor(d.test_path, d.feature_dim);
  std::set<std::string> seen;
  for (const auto* split : {&ds.train, &ds.validation, &ds.test})
    for (const auto& q : *split)
      if (!seen.insert(q.query_id).second)
        throw DataError("splits are not disjoint: query '" + q.query_id +
                        "' appears twice");
  if (d.normalization == Normalization::per_query_minmax) {
    normalize_split(ds.train);
    normalize_split(ds.validation);
    normalize_split(ds.test);
  }
  if (!d.synthetic_meta_path.empty())
    ds.synthetic = load_synthetic_meta(d.synthetic_meta_path);
  return ds;
}

namespace {

using Clock = std::chrono::steady_clock;

QueryScorer policy_scorer(const Policy& policy) {
  return [&policy](const Query& q, std::span<double> out) {
    policy.score_query(q, out);
  };
}

std::vector<int> displayed_prefix(const std::vector<int>& ranking) {
  const int k = std::min<int>(kDisplayDepth, static_cast<int>(ranking.size()));
  return std::vector<int>(ranking.begin(), ranking.begin() + k);
}

}  // namespace

RunRecord run_experiment(const ExperimentConfig& cfg, std::uint64_t seed,
                         const RunOptions& options) {
  validate(cfg);
  const Dataset dataset = load_dataset(cfg);
  if (dataset.train.empty()) throw DataError("run_experiment: empty train split");

  const ClickProfile profile = cfg.resolved_click_profile();
  const int rounds = cfg.simulation.rounds;

  RunRecord record;
  record.config_hash = config_hash(cfg);
  record.seed = seed;

  ExperimentState state;
  state.seed = seed;
  state.streams =
      RngStreams(seed, cfg.algorithm.members, cfg.algorithm.member_seeds);
  auto policy = make_policy(cfg, state.streams);

  if (!options.resume_from.empty()) {
    load_checkpoint(options.resume_from, record.config_hash, state, *policy);
    if (state.seed != seed)
      throw CheckpointError("checkpoint was written under a different seed");
    record.first_round = state.round + 1;
  }

  record.rows.reserve(static_cast<std::size_t>(rounds - state.round));

  for (int t = state.round + 1; t <= rounds; ++t) {
    const Query& q = sample_query(dataset.train, state.streams.query_sampling());

    ServeResult served = policy->serve(q, state.streams);

    const auto displayed = displayed_prefix(served.ranking);
    const Interaction interaction =
        simulate_clicks(q, displayed, profile, state.streams.clicks());
    auto pairs = extract_pairs(q, interaction, cfg.simulation.lookahead, t);

    const std::int64_t t_cov = policy->observe(q, pairs);
    if (!pairs.empty()) state.history.append(t, std::move(pairs));
    state.history.trim_to_last(cfg.training.history_window);

    std::int64_t t_train = 0;
    try {
      t_train = policy->update(state.history, state.streams);
    } catch (const TrainError& e) {
      // Abort with a checkpoint so the divergence point stays inspectable.
      state.round = t - 1;
      const std::string path = !options.checkpoint_path.empty()
                                   ? options.checkpoint_path
                                   : cfg.run.out_dir + "/diverged.ckpt";
      std::string note;
      try {
        save_checkpoint(path, record.config_hash, state, *policy);
        note = " (checkpoint: " + path + ")";
      } catch (const Error& ce) {
        note = std::string(" (checkpoint failed: ") + ce.what() + ")";
      }
      record.summary.failed = true;
      record.summary.error =
          std::string(e.what()) + " at round " + std::to_string(t) + note;
      return record;
    }

    RoundMetrics row;
    row.round = t;
    row.query_id = q.query_id;
    const auto labels = q.labels();
    row.online_ndcg = ndcg_at_k(served.ranking, labels, kDisplayDepth);
    row.discounted_online = row.online_ndcg * state.discount;
    state.cum_discounted += row.discounted_online;
    row.cum_online_ndcg = state.cum_discounted;
    state.discount *= cfg.simulation.gamma;
    row.regret_pairs = pairwise_regret(served.ranking, labels);
    state.cum_regret += row.regret_pairs;
    row.cum_regret = state.cum_regret;
    row.n_uncertain = static_cast<int>(served.n_uncertain);
    row.t_partition_us = served.t_partition_us;
    row.t_topo_us = served.t_topo_us;
    row.t_train_us = t_train;
    row.t_cov_us = t_cov;

    if (t % cfg.simulation.eval_interval == 0 && !dataset.test.empty()) {
      const double offline =
          offline_eval(policy_scorer(*policy), dataset.test, kDisplayDepth);
      row.offline_ndcg10 = offline;
      state.offline_evals.push_back(offline);
      state.last_offline = offline;
    }

    record.rows.push_back(std::move(row));
    state.round = t;

    const bool interval_hit = cfg.run.checkpoint_interval > 0 &&
                              t % cfg.run.checkpoint_interval == 0;
    if ((options.checkpoint_at_round == t || interval_hit) &&
        !options.checkpoint_path.empty())
      save_checkpoint(options.checkpoint_path, record.config_hash, state,
                      *policy);
  }

  record.summary.cumulative_ndcg = state.cum_discounted;
  record.summary.total_regret = state.cum_regret;
  const std::size_t tail =
      std::min<std::size_t>(10, state.offline_evals.size());
  if (tail > 0) {
    double s = 0.0;
    for (std::size_t i = state.offline_evals.size() - tail;
         i < state.offline_evals.size(); ++i)
      s += state.offline_evals[i];
    record.summary.mean_offline_ndcg_last10 = s / static_cast<double>(tail);
  }
  if (!dataset.validation.empty())
    record.summary.final_validation_ndcg10 =
        offline_eval(policy_scorer(*policy), dataset.validation, kDisplayDepth);
  return record;
}

namespace {

// Shortest representation that parses back to the identical double, so
// running sums recomputed from the file match exactly.
std::string fmt_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

std::string csv_text(const RunRecord& record, bool emit_timings) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& row : record.rows) {
    out += std::to_string(row.round);
    out += ',';
    out += row.query_id;
    out += ',';
    out += fmt_double(row.online_ndcg);
    out += ',';
    out += fmt_double(row.discounted_online);
    out += ',';
    out += fmt_double(row.cum_online_ndcg);
    out += ',';
    out += std::to_string(row.regret_pairs);
    out += ',';
    out += std::to_string(row.cum_regret);
    out += ',';
    if (row.offline_ndcg10.has_value()) out += fmt_double(*row.offline_ndcg10);
    out += ',';
    out += std::to_string(row.n_uncertain);
    for (std::int64_t t : {row.t_partition_us, row.t_topo_us, row.t_train_us,
                           row.t_cov_us}) {
      out += ',';
      out += std::to_string(emit_timings ? t : 0);
    }
    out += '\n';
  }
  return out;
}

void emit_csv(const RunRecord& record, const std::string& path,
              bool emit_timings) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("emit_csv: cannot open " + path);
  out << csv_text(record, emit_timings);
  if (!out) throw DataError("emit_csv: write failed for " + path);
}

void emit_run_metadata(const ExperimentConfig& cfg, const RunRecord& record,
                       const std::string& path) {
  nlohmann::json j;
  j["version"] = kVersionString;
  j["config_hash"] = record.config_hash;
  j["seed"] = record.seed;
  j["rounds"] = cfg.simulation.rounds;
  j["eval_interval"] = cfg.simulation.eval_interval;
  j["first_round"] = record.first_round;
  j["algorithm"] = to_string(cfg.algorithm.name);
  j["config"] = canonical_text(cfg);
  j["failed"] = record.summary.failed;
  if (record.summary.failed) j["error"] = record.summary.error;
  j["summary"] = {
      {"cumulative_ndcg", record.summary.cumulative_ndcg},
      {"total_regret", record.summary.total_regret},
      {"mean_offline_ndcg_last10", record.summary.mean_offline_ndcg_last10},
  };
  if (record.summary.final_validation_ndcg10.has_value())
    j["summary"]["final_validation_ndcg10"] =
        *record.summary.final_validation_ndcg10;
  j["written_at"] = static_cast<std::int64_t>(
      std::chrono::duration_cast<std::chrono::seconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("emit_run_metadata: cannot open " + path);
  out << j.dump(2) << '\n';
}

SweepResult run_sweep(const ExperimentConfig& base) {
  const auto grid = expand_grid(base);
  SweepResult result;
  result.entries.reserve(grid.size());

  for (const auto& cfg : grid) {
    SweepEntry entry;
    entry.config = cfg;
    double sum = 0.0;
    int evaluated = 0;
    for (std::uint64_t seed : cfg.run.seeds) {
      RunRecord rec;
      try {
        rec = run_experiment(cfg, seed);
      } catch (const Error& e) {
        entry.failed = true;
        entry.error = e.what();
        break;
      }
      if (rec.summary.failed) {
        entry.failed = true;
        entry.error = rec.summary.error;
        entry.records.push_back(std::move(rec));
        break;
      }
      // Selection metric: validation split when present, else the test
      // split's final evaluation.
      if (rec.summary.final_validation_ndcg10.has_value())
        sum += *rec.summary.final_validation_ndcg10;
      else
        sum += rec.summary.mean_offline_ndcg_last10;
      ++evaluated;
      entry.records.push_back(std::move(rec));
    }
    if (!entry.failed && evaluated > 0)
      entry.mean_validation_ndcg = sum / evaluated;
    result.entries.push_back(std::move(entry));
  }

  // Exact score ties break on the canonical config text so the selection
  // cannot depend on grid enumeration order.
  for (std::size_t i = 0; i < result.entries.size(); ++i) {
    const auto& e = result.entries[i];
    if (e.failed) continue;
    if (result.best_index < 0) {
      result.best_index = static_cast<int>(i);
      continue;
    }
    const auto& best =
        result.entries[static_cast<std::size_t>(result.best_index)];
    if (e.mean_validation_ndcg > best.mean_validation_ndcg ||
        (e.mean_validation_ndcg == best.mean_validation_ndcg &&
         canonical_text(e.config) < canonical_text(best.config)))
      result.best_index = static_cast<int>(i);
  }
  return result;
}

}  // namespace ol2r
