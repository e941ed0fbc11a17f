#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ol2r/bench.hpp"
#include "ol2r/config.hpp"
#include "ol2r/errors.hpp"
#include "ol2r/experiment.hpp"
#include "ol2r/plot.hpp"

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ol2r::ConfigError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string run_basename(const ol2r::ExperimentConfig& cfg,
                         std::uint64_t seed) {
  return "run_" + ol2r::to_string(cfg.algorithm.name) + "_seed" +
         std::to_string(seed);
}

int cmd_run(const std::string& config_path, std::int64_t seed_override,
            const std::string& out_override, int checkpoint_at,
            const std::string& checkpoint_path, const std::string& resume) {
  ol2r::ExperimentConfig cfg = ol2r::parse_config_file(config_path);
  if (!out_override.empty()) cfg.run.out_dir = out_override;
  fs::create_directories(cfg.run.out_dir);

  std::vector<std::uint64_t> seeds = cfg.run.seeds;
  if (seed_override >= 0)
    seeds = {static_cast<std::uint64_t>(seed_override)};

  int failures = 0;
  for (std::uint64_t seed : seeds) {
    ol2r::RunOptions options;
    options.checkpoint_at_round = checkpoint_at;
    options.resume_from = resume;
    options.checkpoint_path = checkpoint_path;
    if (options.checkpoint_path.empty() &&
        (checkpoint_at > 0 || cfg.run.checkpoint_interval > 0))
      options.checkpoint_path =
          cfg.run.out_dir + "/" + run_basename(cfg, seed) + ".ckpt";

    const auto record = ol2r::run_experiment(cfg, seed, options);
    const std::string base = cfg.run.out_dir + "/" + run_basename(cfg, seed);
    ol2r::emit_csv(record, base + ".csv", cfg.run.emit_timings);
    ol2r::emit_run_metadata(cfg, record, base + ".meta.json");
    if (record.summary.failed) {
      ++failures;
      std::cerr << "seed " << seed << " FAILED: " << record.summary.error
                << '\n';
      continue;
    }
    std::cout << base << ".csv  cumulative_ndcg="
              << record.summary.cumulative_ndcg
              << " total_regret=" << record.summary.total_regret
              << " offline_last10=" << record.summary.mean_offline_ndcg_last10
              << '\n';
  }
  return failures == 0 ? 0 : 1;
}

int cmd_sweep(const std::string& config_path, const std::string& out_override) {
  ol2r::ExperimentConfig cfg = ol2r::parse_config_file(config_path);
  if (!out_override.empty()) cfg.run.out_dir = out_override;
  fs::create_directories(cfg.run.out_dir);

  const auto result = ol2r::run_sweep(cfg);
  for (std::size_t i = 0; i < result.entries.size(); ++i) {
    const auto& e = result.entries[i];
    std::cout << "point " << i << ": lambda=" << e.config.training.lambda
              << " lr=" << e.config.training.learning_rate
              << " members=" << e.config.algorithm.members
              << " nu2=" << e.config.algorithm.nu2
              << " alpha=" << e.config.algorithm.alpha
              << " epsilon=" << e.config.algorithm.epsilon;
    if (e.failed)
      std::cout << "  FAILED (" << e.error << ")\n";
    else
      std::cout << "  validation_ndcg=" << e.mean_validation_ndcg << '\n';
    for (const auto& rec : e.records) {
      const std::string base = cfg.run.out_dir + "/sweep_point" +
                               std::to_string(i) + "_seed" +
                               std::to_string(rec.seed);
      ol2r::emit_csv(rec, base + ".csv", cfg.run.emit_timings);
      ol2r::emit_run_metadata(e.config, rec, base + ".meta.json");
    }
  }
  if (result.best_index < 0) {
    std::cerr << "sweep: every grid point failed\n";
    return 1;
  }
  std::cout << "selected point " << result.best_index << '\n';
  return 0;
}

int cmd_bench(const std::string& config_path, const std::string& out_path) {
  ol2r::BenchConfig bench = config_path.empty()
                                ? ol2r::BenchConfig{}
                                : ol2r::parse_bench_config(read_file(config_path));
  const auto report = ol2r::run_bench(bench);
  std::cout << report.table();
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::trunc);
    out << report.table();
  }
  return report.ordering_ok ? 0 : 1;
}

int cmd_plot(const std::vector<std::string>& csvs,
             const std::vector<std::string>& series_specs,
             const std::string& label, const std::string& out_prefix) {
  std::vector<ol2r::PlotSeries> series;
  for (const auto& spec : series_specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
      throw ol2r::ConfigError("--series expects name=file1,file2,...");
    ol2r::PlotSeries s;
    s.label = spec.substr(0, eq);
    std::string cur;
    for (char c : spec.substr(eq + 1)) {
      if (c == ',') {
        if (!cur.empty()) s.csv_paths.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) s.csv_paths.push_back(cur);
    series.push_back(std::move(s));
  }
  if (!csvs.empty()) series.push_back(ol2r::PlotSeries{label, csvs});
  const auto files = ol2r::emit_plots(series, out_prefix);
  for (const auto& f : files) std::cout << f << '\n';
  return 0;
}

int cmd_make_synthetic(int n_train, int n_validation, int n_test, int docs,
                       int dim, std::uint64_t seed, const std::string& out) {
  fs::create_directories(out);
  const auto ds = ol2r::make_synthetic(n_train, n_validation, n_test, docs,
                                       dim, seed);
  ol2r::save_letor(ds.train, out + "/train.txt");
  ol2r::save_letor(ds.validation, out + "/validation.txt");
  ol2r::save_letor(ds.test, out + "/test.txt");
  ol2r::save_synthetic_meta(ds.synthetic, out + "/meta.json");
  std::cout << out << ": " << ds.train.size() << " train / "
            << ds.validation.size() << " validation / " << ds.test.size()
            << " test queries, d=" << dim << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online learning-to-rank simulation harness"};
  app.require_subcommand(1);

  std::string config_path, out_path, checkpoint_path, resume_path, label = "run";
  std::int64_t seed_override = -1;
  int checkpoint_at = 0;

  auto* run = app.add_subcommand("run", "Execute one experiment per seed");
  run->add_option("--config", config_path, "Config file")->required();
  run->add_option("--seed", seed_override, "Run only this seed");
  run->add_option("--out", out_path, "Output directory override");
  run->add_option("--checkpoint-at", checkpoint_at,
                  "Write a checkpoint after this round");
  run->add_option("--checkpoint", checkpoint_path, "Checkpoint file path");
  run->add_option("--resume", resume_path, "Resume from a checkpoint file");

  auto* sweep = app.add_subcommand("sweep", "Grid search over [sweep] values");
  sweep->add_option("--config", config_path, "Config file")->required();
  sweep->add_option("--out", out_path, "Output directory override");

  auto* bench =
      app.add_subcommand("bench", "Exploration-cost micro-benchmark");
  bench->add_option("--config", config_path,
                    "Config file with a [bench] section (defaults if omitted)");
  bench->add_option("--out", out_path, "Also write the report here");

  std::vector<std::string> plot_csvs, plot_series;
  auto* plot = app.add_subcommand("plot", "Render SVG curves from run CSVs");
  plot->add_option("csvs", plot_csvs, "CSV files averaged into one series");
  plot->add_option("--series", plot_series,
                   "Named series as name=file1,file2 (repeatable)");
  plot->add_option("--label", label, "Label for the positional series");
  plot->add_option("--out", out_path, "Output path prefix")->required();

  int sy_train = 200, sy_validation = 0, sy_test = 100, sy_docs = 10,
      sy_dim = 10;
  std::uint64_t sy_seed = 7;
  auto* makesyn =
      app.add_subcommand("make-synthetic", "Write a synthetic dataset");
  makesyn->add_option("--queries", sy_train, "Training queries");
  makesyn->add_option("--validation", sy_validation, "Validation queries");
  makesyn->add_option("--test", sy_test, "Test queries");
  makesyn->add_option("--docs", sy_docs, "Documents per query");
  makesyn->add_option("--dim", sy_dim, "Feature dimension");
  makesyn->add_option("--seed", sy_seed, "Generator seed");
  makesyn->add_option("--out", out_path, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(config_path, seed_override, out_path, checkpoint_at,
                     checkpoint_path, resume_path);
    if (sweep->parsed()) return cmd_sweep(config_path, out_path);
    if (bench->parsed()) return cmd_bench(config_path, out_path);
    if (plot->parsed())
      return cmd_plot(plot_csvs, plot_series, label, out_path);
    if (makesyn->parsed())
      return cmd_make_synthetic(sy_train, sy_validation, sy_test, sy_docs,
                                sy_dim, sy_seed, out_path);
  } catch (const ol2r::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
