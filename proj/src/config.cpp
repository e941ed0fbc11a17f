#include "ol2r/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ol2r/errors.hpp"
#include "ol2r/serialize.hpp"

namespace ol2r {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::p2_linear: return "p2_linear";
    case Algorithm::p2_neural: return "p2_neural";
    case Algorithm::ci_linear: return "ci_linear";
    case Algorithm::ci_neural_full: return "ci_neural_full";
    case Algorithm::ci_neural_diag: return "ci_neural_diag";
    case Algorithm::epsilon_greedy_linear: return "epsilon_greedy_linear";
    case Algorithm::epsilon_greedy_neural: return "epsilon_greedy_neural";
  }
  return "?";
}

Algorithm algorithm_from_string(const std::string& s) {
  for (Algorithm a :
       {Algorithm::p2_linear, Algorithm::p2_neural, Algorithm::ci_linear,
        Algorithm::ci_neural_full, Algorithm::ci_neural_diag,
        Algorithm::epsilon_greedy_linear, Algorithm::epsilon_greedy_neural})
    if (to_string(a) == s) return a;
  throw ConfigError("unknown algorithm '" + s + "'");
}

bool algorithm_is_neural(Algorithm a) {
  return a == Algorithm::p2_neural || a == Algorithm::ci_neural_full ||
         a == Algorithm::ci_neural_diag ||
         a == Algorithm::epsilon_greedy_neural;
}

bool SweepGrids::empty() const {
  return lambda_grid.empty() && learning_rate_grid.empty() &&
         members_grid.empty() && nu2_grid.empty() && alpha_grid.empty() &&
         epsilon_grid.empty();
}

int ExperimentConfig::resolved_epochs() const {
  if (training.epochs > 0) return training.epochs;
  return algorithm_is_neural(algorithm.name) ? 30 : 100;
}

ClickProfile ExperimentConfig::resolved_click_profile() const {
  if (simulation.click_profile == "custom")
    return ClickProfile::custom(simulation.custom_clicks);
  return ClickProfile::by_name(simulation.click_profile);
}

namespace {

struct RawConfig {
  // section -> key -> value, plus consumption tracking for unknown-key
  // detection.
  std::map<std::string, std::map<std::string, std::string>> sections;
  mutable std::map<std::string, std::map<std::string, bool>> used;

  bool has(const std::string& sec, const std::string& key) const {
    auto s = sections.find(sec);
    return s != sections.end() && s->second.count(key) > 0;
  }

  std::optional<std::string> get(const std::string& sec,
                                 const std::string& key) const {
    auto s = sections.find(sec);
    if (s == sections.end()) return std::nullopt;
    auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    used[sec][key] = true;
    return k->second;
  }

  void check_all_used() const {
    for (const auto& [sec, keys] : sections)
      for (const auto& [key, value] : keys) {
        (void)value;
        if (!used.count(sec) || !used.at(sec).count(key))
          throw ConfigError("unknown config key [" + sec + "] " + key);
      }
  }
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

RawConfig tokenize(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": empty section name");
      raw.sections[section];
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    if (section.empty())
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": key outside any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": empty key");
    if (!raw.sections[section].try_emplace(key, value).second)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": duplicate key '" + key + "'");
  }
  return raw;
}

const std::set<std::string> kKnownSections = {
    "dataset", "simulation", "algorithm", "training",
    "network", "run",        "sweep",     "bench"};

double parse_double(const std::string& sec, const std::string& key,
                    const std::string& v) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("[" + sec + "] " + key + ": bad number '" + v + "'");
  }
}

std::int64_t parse_int(const std::string& sec, const std::string& key,
                       const std::string& v) {
  try {
    std::size_t pos = 0;
    long long i = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError("[" + sec + "] " + key + ": bad integer '" + v + "'");
  }
}

bool parse_bool(const std::string& sec, const std::string& key,
                const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("[" + sec + "] " + key + ": bad boolean '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : v) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  cur = trim(cur);
  if (!cur.empty()) out.push_back(cur);
  return out;
}

template <typename Fn>
void read(const RawConfig& raw, const std::string& sec, const std::string& key,
          Fn&& apply) {
  if (auto v = raw.get(sec, key)) apply(*v);
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  RawConfig raw = tokenize(text);
  for (const auto& [sec, kv] : raw.sections) {
    (void)kv;
    if (!kKnownSections.count(sec))
      throw ConfigError("unknown config section [" + sec + "]");
  }

  ExperimentConfig cfg;

  read(raw, "dataset", "source", [&](const std::string& v) {
    if (v == "synthetic") cfg.dataset.source = DataSource::synthetic;
    else if (v == "letor") cfg.dataset.source = DataSource::letor;
    else throw ConfigError("[dataset] source: expected synthetic or letor");
  });
  read(raw, "dataset", "train_path",
       [&](const std::string& v) { cfg.dataset.train_path = v; });
  read(raw, "dataset", "validation_path",
       [&](const std::string& v) { cfg.dataset.validation_path = v; });
  read(raw, "dataset", "test_path",
       [&](const std::string& v) { cfg.dataset.test_path = v; });
  read(raw, "dataset", "synthetic_meta_path",
       [&](const std::string& v) { cfg.dataset.synthetic_meta_path = v; });
  read(raw, "dataset", "normalization", [&](const std::string& v) {
    if (v == "none") cfg.dataset.normalization = Normalization::none;
    else if (v == "per_query_minmax")
      cfg.dataset.normalization = Normalization::per_query_minmax;
    else
      throw ConfigError(
          "[dataset] normalization: expected none or per_query_minmax");
  });
  read(raw, "dataset", "feature_dim", [&](const std::string& v) {
    cfg.dataset.feature_dim = static_cast<int>(parse_int("dataset", "feature_dim", v));
  });
  read(raw, "dataset", "n_train", [&](const std::string& v) {
    cfg.dataset.n_train = static_cast<int>(parse_int("dataset", "n_train", v));
  });
  read(raw, "dataset", "n_validation", [&](const std::string& v) {
    cfg.dataset.n_validation =
        static_cast<int>(parse_int("dataset", "n_validation", v));
  });
  read(raw, "dataset", "n_test", [&](const std::string& v) {
    cfg.dataset.n_test = static_cast<int>(parse_int("dataset", "n_test", v));
  });
  read(raw, "dataset", "docs_per_query", [&](const std::string& v) {
    cfg.dataset.docs_per_query =
        static_cast<int>(parse_int("dataset", "docs_per_query", v));
  });
  read(raw, "dataset", "synthetic_seed", [&](const std::string& v) {
    cfg.dataset.synthetic_seed =
        static_cast<std::uint64_t>(parse_int("dataset", "synthetic_seed", v));
  });

  read(raw, "simulation", "click_profile",
       [&](const std::string& v) { cfg.simulation.click_profile = v; });
  read(raw, "simulation", "custom_clicks", [&](const std::string& v) {
    cfg.simulation.custom_clicks.clear();
    for (const auto& tok : split_list(v))
      cfg.simulation.custom_clicks.push_back(
          parse_double("simulation", "custom_clicks", tok));
  });
  read(raw, "simulation", "lookahead", [&](const std::string& v) {
    cfg.simulation.lookahead =
        static_cast<int>(parse_int("simulation", "lookahead", v));
  });
  read(raw, "simulation", "rounds", [&](const std::string& v) {
    cfg.simulation.rounds = static_cast<int>(parse_int("simulation", "rounds", v));
  });
  read(raw, "simulation", "eval_interval", [&](const std::string& v) {
    cfg.simulation.eval_interval =
        static_cast<int>(parse_int("simulation", "eval_interval", v));
  });
  read(raw, "simulation", "gamma", [&](const std::string& v) {
    cfg.simulation.gamma = parse_double("simulation", "gamma", v);
  });

  read(raw, "algorithm", "name", [&](const std::string& v) {
    cfg.algorithm.name = algorithm_from_string(v);
  });
  read(raw, "algorithm", "members", [&](const std::string& v) {
    cfg.algorithm.members = static_cast<int>(parse_int("algorithm", "members", v));
  });
  read(raw, "algorithm", "nu2", [&](const std::string& v) {
    cfg.algorithm.nu2 = parse_double("algorithm", "nu2", v);
  });
  read(raw, "algorithm", "perturb_params", [&](const std::string& v) {
    cfg.algorithm.perturb_params = parse_bool("algorithm", "perturb_params", v);
  });
  read(raw, "algorithm", "epsilon", [&](const std::string& v) {
    cfg.algorithm.epsilon = parse_double("algorithm", "epsilon", v);
  });
  read(raw, "algorithm", "alpha_mode", [&](const std::string& v) {
    if (v == "constant") cfg.algorithm.alpha_mode = AlphaMode::constant;
    else if (v == "schedule") cfg.algorithm.alpha_mode = AlphaMode::schedule;
    else throw ConfigError("[algorithm] alpha_mode: expected constant or schedule");
  });
  read(raw, "algorithm", "alpha", [&](const std::string& v) {
    cfg.algorithm.alpha = parse_double("algorithm", "alpha", v);
  });
  read(raw, "algorithm", "alpha_multiplier", [&](const std::string& v) {
    cfg.algorithm.alpha_multiplier =
        parse_double("algorithm", "alpha_multiplier", v);
  });
  read(raw, "algorithm", "alpha_noise_scale", [&](const std::string& v) {
    cfg.algorithm.alpha_noise_scale =
        parse_double("algorithm", "alpha_noise_scale", v);
  });
  read(raw, "algorithm", "alpha_delta", [&](const std::string& v) {
    cfg.algorithm.alpha_delta = parse_double("algorithm", "alpha_delta", v);
  });
  read(raw, "algorithm", "grad_features", [&](const std::string& v) {
    if (v == "current") cfg.algorithm.grad_features = GradFeatures::current;
    else if (v == "initial") cfg.algorithm.grad_features = GradFeatures::initial;
    else throw ConfigError("[algorithm] grad_features: expected current or initial");
  });
  read(raw, "algorithm", "member_seeds", [&](const std::string& v) {
    cfg.algorithm.member_seeds.clear();
    for (const auto& tok : split_list(v))
      cfg.algorithm.member_seeds.push_back(
          static_cast<std::uint64_t>(parse_int("algorithm", "member_seeds", tok)));
  });

  read(raw, "training", "lambda", [&](const std::string& v) {
    cfg.training.lambda = parse_double("training", "lambda", v);
  });
  read(raw, "training", "learning_rate", [&](const std::string& v) {
    cfg.training.learning_rate = parse_double("training", "learning_rate", v);
  });
  read(raw, "training", "epochs", [&](const std::string& v) {
    cfg.training.epochs = static_cast<int>(parse_int("training", "epochs", v));
  });
  read(raw, "training", "batch_size", [&](const std::string& v) {
    cfg.training.batch_size =
        static_cast<int>(parse_int("training", "batch_size", v));
  });
  read(raw, "training", "warm_start", [&](const std::string& v) {
    cfg.training.warm_start = parse_bool("training", "warm_start", v);
  });
  read(raw, "training", "history_window", [&](const std::string& v) {
    cfg.training.history_window =
        static_cast<int>(parse_int("training", "history_window", v));
  });

  read(raw, "network", "width", [&](const std::string& v) {
    cfg.network.width = static_cast<int>(parse_int("network", "width", v));
  });
  read(raw, "network", "depth", [&](const std::string& v) {
    cfg.network.depth = static_cast<int>(parse_int("network", "depth", v));
  });
  read(raw, "network", "init", [&](const std::string& v) {
    if (v == "gaussian_ntk") cfg.network.init = NeuralInit::gaussian_ntk;
    else if (v == "antisymmetric") cfg.network.init = NeuralInit::antisymmetric;
    else throw ConfigError("[network] init: expected gaussian_ntk or antisymmetric");
  });
  read(raw, "network", "scale_output", [&](const std::string& v) {
    cfg.network.scale_output = parse_bool("network", "scale_output", v);
  });

  read(raw, "run", "seeds", [&](const std::string& v) {
    cfg.run.seeds.clear();
    for (const auto& tok : split_list(v))
      cfg.run.seeds.push_back(
          static_cast<std::uint64_t>(parse_int("run", "seeds", tok)));
  });
  read(raw, "run", "out_dir",
       [&](const std::string& v) { cfg.run.out_dir = v; });
  read(raw, "run", "emit_timings", [&](const std::string& v) {
    cfg.run.emit_timings = parse_bool("run", "emit_timings", v);
  });
  read(raw, "run", "checkpoint_interval", [&](const std::string& v) {
    cfg.run.checkpoint_interval =
        static_cast<int>(parse_int("run", "checkpoint_interval", v));
  });
  read(raw, "run", "offline_scoring", [&](const std::string& v) {
    if (v == "mean") cfg.run.offline_scoring = OfflineScoring::mean;
    else if (v == "member0") cfg.run.offline_scoring = OfflineScoring::member0;
    else throw ConfigError("[run] offline_scoring: expected mean or member0");
  });

  auto read_grid_doubles = [&](const std::string& key,
                               std::vector<double>& out) {
    read(raw, "sweep", key, [&](const std::string& v) {
      out.clear();
      for (const auto& tok : split_list(v))
        out.push_back(parse_double("sweep", key, tok));
    });
  };
  read_grid_doubles("lambda", cfg.sweep.lambda_grid);
  read_grid_doubles("learning_rate", cfg.sweep.learning_rate_grid);
  read_grid_doubles("nu2", cfg.sweep.nu2_grid);
  read_grid_doubles("alpha", cfg.sweep.alpha_grid);
  read_grid_doubles("epsilon", cfg.sweep.epsilon_grid);
  read(raw, "sweep", "members", [&](const std::string& v) {
    cfg.sweep.members_grid.clear();
    for (const auto& tok : split_list(v))
      cfg.sweep.members_grid.push_back(
          static_cast<int>(parse_int("sweep", "members", tok)));
  });

  // The bench section is consumed by the bench runner; mark its keys used
  // so a combined config file passes the unknown-key check here.
  if (raw.sections.count("bench"))
    for (const auto& [key, value] : raw.sections.at("bench")) {
      (void)value;
      (void)raw.get("bench", key);
    }

  raw.check_all_used();
  validate(cfg);
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void validate(const ExperimentConfig& cfg) {
  const auto& d = cfg.dataset;
  if (d.feature_dim <= 0) throw ConfigError("feature_dim must be positive");
  if (d.source == DataSource::synthetic) {
    if (d.n_train <= 0 || d.docs_per_query <= 0)
      throw ConfigError("synthetic dataset sizes must be positive");
    if (d.n_validation < 0 || d.n_test < 0)
      throw ConfigError("synthetic split sizes must be non-negative");
  } else if (d.train_path.empty()) {
    throw ConfigError("[dataset] train_path is required for letor source");
  }

  const auto& s = cfg.simulation;
  if (s.rounds < 1) throw ConfigError("rounds must be >= 1");
  if (s.eval_interval < 1) throw ConfigError("eval_interval must be >= 1");
  if (s.lookahead < 0) throw ConfigError("lookahead must be >= 0");
  if (!(s.gamma > 0.0) || s.gamma > 1.0)
    throw ConfigError("gamma must lie in (0, 1]");
  if (s.click_profile == "custom" && s.custom_clicks.size() != 10)
    throw ConfigError("custom click profile needs exactly 10 probabilities");
  if (s.click_profile != "custom") (void)ClickProfile::by_name(s.click_profile);

  const auto& a = cfg.algorithm;
  if (a.members < 1) throw ConfigError("members must be >= 1");
  if (a.nu2 < 0.0) throw ConfigError("nu2 must be >= 0");
  if (a.epsilon < 0.0 || a.epsilon > 1.0)
    throw ConfigError("epsilon must lie in [0, 1]");
  if (!(a.alpha_delta > 0.0) || a.alpha_delta > 1.0)
    throw ConfigError("alpha_delta must lie in (0, 1]");

  const auto& t = cfg.training;
  if (!(t.lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (!(t.learning_rate > 0.0))
    throw ConfigError("learning_rate must be positive");
  if (t.epochs < 0) throw ConfigError("epochs must be >= 0 (0 = auto)");
  if (t.batch_size < 0) throw ConfigError("batch_size must be >= 0");
  if (t.history_window < 0) throw ConfigError("history_window must be >= 0");

  const auto& n = cfg.network;
  if (algorithm_is_neural(a.name)) {
    if (n.width < 1 || n.depth < 2)
      throw ConfigError("network needs width >= 1 and depth >= 2");
    if (n.init == NeuralInit::antisymmetric && n.width % 2 != 0)
      throw ConfigError("antisymmetric init needs an even width");
    if (a.name == Algorithm::ci_neural_full) {
      const int p = neural_param_count(d.feature_dim, n.width, n.depth);
      if (p > kFullCovarianceGate)
        throw GateError("ci_neural_full refused: " + std::to_string(p) +
                        " parameters exceed the full-covariance gate of " +
                        std::to_string(kFullCovarianceGate));
    }
  }
  if (a.name == Algorithm::ci_linear && d.feature_dim > kFullCovarianceGate)
    throw GateError("ci_linear refused: feature_dim exceeds the gate");

  if (cfg.run.seeds.empty()) throw ConfigError("seeds must be non-empty");
  if (cfg.run.checkpoint_interval < 0)
    throw ConfigError("checkpoint_interval must be >= 0");
}

namespace {

std::string fmt(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_same_v<T, double>)
      out += fmt(v[i]);
    else
      out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace

std::string canonical_text(const ExperimentConfig& cfg) {
  std::ostringstream os;
  const auto& d = cfg.dataset;
  os << "[dataset]\n";
  os << "source = " << (d.source == DataSource::synthetic ? "synthetic" : "letor") << '\n';
  os << "train_path = " << d.train_path << '\n';
  os << "validation_path = " << d.validation_path << '\n';
  os << "test_path = " << d.test_path << '\n';
  os << "synthetic_meta_path = " << d.synthetic_meta_path << '\n';
  os << "normalization = "
     << (d.normalization == Normalization::none ? "none" : "per_query_minmax")
     << '\n';
  os << "feature_dim = " << d.feature_dim << '\n';
  os << "n_train = " << d.n_train << '\n';
  os << "n_validation = " << d.n_validation << '\n';
  os << "n_test = " << d.n_test << '\n';
  os << "docs_per_query = " << d.docs_per_query << '\n';
  os << "synthetic_seed = " << d.synthetic_seed << '\n';

  const auto& s = cfg.simulation;
  os << "[simulation]\n";
  os << "click_profile = " << s.click_profile << '\n';
  os << "custom_clicks = " << join(s.custom_clicks) << '\n';
  os << "lookahead = " << s.lookahead << '\n';
  os << "rounds = " << s.rounds << '\n';
  os << "eval_interval = " << s.eval_interval << '\n';
  os << "gamma = " << fmt(s.gamma) << '\n';

  const auto& a = cfg.algorithm;
  os << "[algorithm]\n";
  os << "name = " << to_string(a.name) << '\n';
  os << "members = " << a.members << '\n';
  os << "nu2 = " << fmt(a.nu2) << '\n';
  os << "perturb_params = " << (a.perturb_params ? "true" : "false") << '\n';
  os << "epsilon = " << fmt(a.epsilon) << '\n';
  os << "alpha_mode = "
     << (a.alpha_mode == AlphaMode::constant ? "constant" : "schedule") << '\n';
  os << "alpha = " << fmt(a.alpha) << '\n';
  os << "alpha_multiplier = " << fmt(a.alpha_multiplier) << '\n';
  os << "alpha_noise_scale = " << fmt(a.alpha_noise_scale) << '\n';
  os << "alpha_delta = " << fmt(a.alpha_delta) << '\n';
  os << "grad_features = "
     << (a.grad_features == GradFeatures::current ? "current" : "initial")
     << '\n';
  os << "member_seeds = " << join(a.member_seeds) << '\n';

  const auto& t = cfg.training;
  os << "[training]\n";
  os << "lambda = " << fmt(t.lambda) << '\n';
  os << "learning_rate = " << fmt(t.learning_rate) << '\n';
  os << "epochs = " << t.epochs << '\n';
  os << "batch_size = " << t.batch_size << '\n';
  os << "warm_start = " << (t.warm_start ? "true" : "false") << '\n';
  os << "history_window = " << t.history_window << '\n';

  const auto& n = cfg.network;
  os << "[network]\n";
  os << "width = " << n.width << '\n';
  os << "depth = " << n.depth << '\n';
  os << "init = "
     << (n.init == NeuralInit::gaussian_ntk ? "gaussian_ntk" : "antisymmetric")
     << '\n';
  os << "scale_output = " << (n.scale_output ? "true" : "false") << '\n';

  // Output-only settings (out_dir, emit_timings, checkpoint_interval) and
  // the seed list stay out: they never influence a run's trajectory, and
  // a checkpoint records its own seed.
  os << "[run]\n";
  os << "offline_scoring = "
     << (cfg.run.offline_scoring == OfflineScoring::mean ? "mean" : "member0")
     << '\n';
  return os.str();
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  return fnv1a_hash(canonical_text(cfg));
}

std::vector<ExperimentConfig> expand_grid(const ExperimentConfig& base) {
  const SweepGrids& g = base.sweep;
  const bool uses_nu = base.algorithm.name == Algorithm::p2_linear ||
                       base.algorithm.name == Algorithm::p2_neural;
  const bool uses_alpha = base.algorithm.name == Algorithm::ci_linear ||
                          base.algorithm.name == Algorithm::ci_neural_full ||
                          base.algorithm.name == Algorithm::ci_neural_diag;
  const bool uses_epsilon =
      base.algorithm.name == Algorithm::epsilon_greedy_linear ||
      base.algorithm.name == Algorithm::epsilon_greedy_neural;
  if (!uses_nu && (!g.nu2_grid.empty() || !g.members_grid.empty()))
    throw ConfigError("sweep grids nu2/members apply only to p2 algorithms");
  if (!uses_alpha && !g.alpha_grid.empty())
    throw ConfigError("sweep grid alpha applies only to ci algorithms");
  if (!uses_epsilon && !g.epsilon_grid.empty())
    throw ConfigError("sweep grid epsilon applies only to epsilon_greedy");

  auto one_or = [](auto grid, auto base_value) {
    if (grid.empty()) grid.push_back(base_value);
    return grid;
  };
  const auto lambdas = one_or(g.lambda_grid, base.training.lambda);
  const auto lrs = one_or(g.learning_rate_grid, base.training.learning_rate);
  const auto members = one_or(g.members_grid, base.algorithm.members);
  const auto nu2s = one_or(g.nu2_grid, base.algorithm.nu2);
  const auto alphas = one_or(g.alpha_grid, base.algorithm.alpha);
  const auto epsilons = one_or(g.epsilon_grid, base.algorithm.epsilon);

  std::vector<ExperimentConfig> out;
  for (double lambda : lambdas)
    for (double lr : lrs)
      for (int n : members)
        for (double nu2 : nu2s)
          for (double alpha : alphas)
            for (double epsilon : epsilons) {
              ExperimentConfig c = base;
              c.sweep = SweepGrids{};
              c.training.lambda = lambda;
              c.training.learning_rate = lr;
              c.algorithm.members = n;
              c.algorithm.nu2 = nu2;
              c.algorithm.alpha = alpha;
              c.algorithm.epsilon = epsilon;
              validate(c);
              out.push_back(std::move(c));
            }
  return out;
}

std::vector<std::pair<std::string, std::string>> config_section(
    const std::string& text, const std::string& section) {
  RawConfig raw = tokenize(text);
  std::vector<std::pair<std::string, std::string>> out;
  auto it = raw.sections.find(section);
  if (it == raw.sections.end()) return out;
  for (const auto& [key, value] : it->second) out.emplace_back(key, value);
  return out;
}

std::string sample_config() {
  return R"(# Every key with its default. Unknown keys are rejected.

[dataset]
source = synthetic            # synthetic | letor
# letor source:
#train_path = Fold1/train.txt
#validation_path = Fold1/vali.txt
#test_path = Fold1/test.txt
#synthetic_meta_path =        # sidecar with hidden weights, if any
normalization = per_query_minmax   # none | per_query_minmax
feature_dim = 10
# synthetic source:
n_train = 200
n_validation = 0
n_test = 100
docs_per_query = 10
synthetic_seed = 7

[simulation]
click_profile = perfect       # perfect | navigational | informational | custom
#custom_clicks = 0,0.2,0.4,0.8,1,0,0,0,0,0   # five click then five stop probs
lookahead = 1                 # unclicked documents after the last click treated as examined
rounds = 5000
eval_interval = 50
gamma = 0.9995

[algorithm]
name = p2_linear              # p2_linear | p2_neural | ci_linear |
                              # ci_neural_full | ci_neural_diag |
                              # epsilon_greedy_linear | epsilon_greedy_neural
members = 2                   # ensemble size N
nu2 = 0.1                     # pseudo-noise variance
perturb_params = false        # also perturb the regularization center
epsilon = 0.1                 # epsilon_greedy only
alpha_mode = constant         # constant | schedule
alpha = 0.1
alpha_multiplier = 1.0        # schedule mode
alpha_noise_scale = 0.5
alpha_delta = 1.0
grad_features = current       # current | initial (neural ci feature vectors)
#member_seeds = 11,12         # optional per-member noise seed pins

[training]
lambda = 0.1
learning_rate = 0.01
epochs = 0                    # 0 = auto: 30 neural, 100 linear
batch_size = 0                # 0 = full batch
warm_start = true
history_window = 0            # rounds kept for training; 0 = unlimited

[network]
width = 100
depth = 2
init = gaussian_ntk           # gaussian_ntk | antisymmetric
scale_output = true

[run]
seeds = 1
out_dir = .
emit_timings = false          # timing columns break byte-reproducibility
checkpoint_interval = 0       # rounds; 0 = off
offline_scoring = mean        # mean | member0

[sweep]                       # read by the sweep command only
#lambda = 0.1,0.01,0.001,0.0001
#learning_rate = 0.1,0.01,0.001
#members = 2,5,10
#nu2 = 0.1,0.01
#alpha = 0.1,0.01,0.001,0.0001
#epsilon = 0.05,0.1,0.2
)";
}

}  // namespace ol2r
