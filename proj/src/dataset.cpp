#include "ol2r/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "ol2r/errors.hpp"

namespace ol2r {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

[[noreturn]] void line_error(const std::string& path, std::size_t line_no,
                             const std::string& what) {
  throw DataError(path + ":" + std::to_string(line_no) + ": " + what);
}

}  // namespace

std::vector<int> Query::labels() const {
  std::vector<int> out;
  out.reserve(documents.size());
  for (const auto& d : documents) out.push_back(d.relevance);
  return out;
}

std::vector<Query> load_letor(const std::string& path, int feature_dim) {
  if (feature_dim <= 0) throw DataError("load_letor: feature_dim must be positive");
  std::ifstream in(path);
  if (!in) throw DataError("load_letor: cannot open " + path);

  std::vector<Query> split;
  std::unordered_map<std::string, std::size_t> qid_index;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.resize(hash);
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;  // blank line

    int label = 0;
    try {
      std::size_t pos = 0;
      label = std::stoi(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      line_error(path, line_no, "bad relevance label '" + tok + "'");
    }
    if (label < kMinRelevance || label > kMaxRelevance)
      line_error(path, line_no,
                 "relevance label " + std::to_string(label) + " outside [0,4]");

    if (!(ls >> tok) || tok.rfind("qid:", 0) != 0)
      line_error(path, line_no, "expected qid:<id> after the label");
    std::string qid = tok.substr(4);
    if (qid.empty()) line_error(path, line_no, "empty qid");

    Document doc;
    doc.relevance = label;
    doc.features.assign(static_cast<std::size_t>(feature_dim), 0.0);
    while (ls >> tok) {
      auto colon = tok.find(':');
      if (colon == std::string::npos)
        line_error(path, line_no, "bad feature token '" + tok + "'");
      int idx = 0;
      double value = 0.0;
      try {
        idx = std::stoi(tok.substr(0, colon));
        value = std::stod(tok.substr(colon + 1));
      } catch (const std::exception&) {
        line_error(path, line_no, "bad feature token '" + tok + "'");
      }
      if (idx < 1 || idx > feature_dim)
        line_error(path, line_no,
                   "feature index " + std::to_string(idx) +
                       " outside 1.." + std::to_string(feature_dim));
      if (!std::isfinite(value))
        line_error(path, line_no, "non-finite feature value");
      doc.features[static_cast<std::size_t>(idx - 1)] = value;
    }

    auto [it, inserted] = qid_index.try_emplace(qid, split.size());
    if (inserted) split.push_back(Query{qid, {}});
    Query& q = split[it->second];
    doc.doc_index = q.size();
    q.documents.push_back(std::move(doc));
  }
  return split;
}

void save_letor(const std::vector<Query>& split, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("save_letor: cannot open " + path);
  for (const auto& q : split) {
    for (const auto& d : q.documents) {
      out << d.relevance << " qid:" << q.query_id;
      for (std::size_t j = 0; j < d.features.size(); ++j)
        out << ' ' << (j + 1) << ':' << format_double(d.features[j]);
      out << '\n';
    }
  }
  if (!out) throw DataError("save_letor: write failed for " + path);
}

Query normalize_per_query(const Query& q) {
  Query out = q;
  if (q.documents.empty()) return out;
  const std::size_t d = q.documents.front().features.size();
  for (std::size_t j = 0; j < d; ++j) {
    double lo = q.documents.front().features[j];
    double hi = lo;
    for (const auto& doc : q.documents) {
      lo = std::min(lo, doc.features[j]);
      hi = std::max(hi, doc.features[j]);
    }
    const double range = hi - lo;
    for (std::size_t i = 0; i < q.documents.size(); ++i) {
      double v = q.documents[i].features[j];
      out.documents[i].features[j] = range > 0.0 ? (v - lo) / range : 0.0;
    }
  }
  return out;
}

void normalize_split(std::vector<Query>& split) {
  for (auto& q : split) q = normalize_per_query(q);
}

const Query& sample_query(const std::vector<Query>& split, RandomStream& rng) {
  if (split.empty()) throw DataError("sample_query: empty split");
  return split[rng.uniform_index(split.size())];
}

Dataset make_synthetic(int n_train, int n_validation, int n_test,
                       int docs_per_query, int feature_dim,
                       std::uint64_t seed) {
  if (docs_per_query <= 0 || feature_dim <= 0)
    throw DataError("make_synthetic: sizes must be positive");
  if (n_train < 0 || n_validation < 0 || n_test < 0)
    throw DataError("make_synthetic: split sizes must be non-negative");
  if (n_train + n_validation + n_test <= 0)
    throw DataError("make_synthetic: at least one split must be non-empty");

  RandomStream weight_rng(derive_seed(seed, "synthetic_weights"));
  RandomStream feature_rng(derive_seed(seed, "synthetic_features"));

  Dataset ds;
  ds.feature_dim = feature_dim;
  ds.normalization = Normalization::none;
  ds.synthetic.present = true;
  ds.synthetic.seed = seed;
  ds.synthetic.hidden_weights.resize(static_cast<std::size_t>(feature_dim));
  for (auto& w : ds.synthetic.hidden_weights) w = weight_rng.normal();

  auto gen_split = [&](std::vector<Query>& split, int count,
                       const char* prefix) {
    split.reserve(static_cast<std::size_t>(count));
    for (int qi = 0; qi < count; ++qi) {
      Query q;
      q.query_id = std::string(prefix) + std::to_string(qi);
      q.documents.resize(static_cast<std::size_t>(docs_per_query));
      for (int di = 0; di < docs_per_query; ++di) {
        Document& doc = q.documents[static_cast<std::size_t>(di)];
        doc.doc_index = di;
        doc.features.resize(static_cast<std::size_t>(feature_dim));
        for (auto& f : doc.features) f = feature_rng.uniform01();
      }
      split.push_back(std::move(q));
    }
  };
  gen_split(ds.train, n_train, "train");
  gen_split(ds.validation, n_validation, "val");
  gen_split(ds.test, n_test, "test");

  // Dataset-wide quintiles of sigmoid(x . w*) give near-uniform grades.
  std::vector<double> scores;
  auto score_of = [&](const Document& d) {
    double z = 0.0;
    for (std::size_t j = 0; j < d.features.size(); ++j)
      z += d.features[j] * ds.synthetic.hidden_weights[j];
    return sigmoid(z);
  };
  for (const auto* split : {&ds.train, &ds.validation, &ds.test})
    for (const auto& q : *split)
      for (const auto& d : q.documents) scores.push_back(score_of(d));
  std::sort(scores.begin(), scores.end());
  for (int g = 0; g < 4; ++g) {
    std::size_t idx = scores.size() * static_cast<std::size_t>(g + 1) / 5;
    idx = std::min(idx, scores.size() - 1);
    ds.synthetic.grade_edges[static_cast<std::size_t>(g)] = scores[idx];
  }
  auto grade_of = [&](double s) {
    int g = 0;
    for (double edge : ds.synthetic.grade_edges)
      if (s >= edge) ++g;
    return std::min(g, kMaxRelevance);
  };
  for (auto* split : {&ds.train, &ds.validation, &ds.test})
    for (auto& q : *split)
      for (auto& d : q.documents) d.relevance = grade_of(score_of(d));

  return ds;
}

void save_synthetic_meta(const SyntheticMeta& meta, const std::string& path) {
  nlohmann::json j;
  j["seed"] = meta.seed;
  j["hidden_weights"] = meta.hidden_weights;
  j["grade_edges"] = meta.grade_edges;
  std::ofstream out(path);
  if (!out) throw DataError("save_synthetic_meta: cannot open " + path);
  out << j.dump(2) << '\n';
}

SyntheticMeta load_synthetic_meta(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("load_synthetic_meta: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("load_synthetic_meta: " + std::string(e.what()));
  }
  SyntheticMeta meta;
  meta.present = true;
  meta.seed = j.at("seed").get<std::uint64_t>();
  meta.hidden_weights = j.at("hidden_weights").get<std::vector<double>>();
  auto edges = j.at("grade_edges").get<std::vector<double>>();
  if (edges.size() != meta.grade_edges.size())
    throw DataError("load_synthetic_meta: expected 4 grade edges");
  std::copy(edges.begin(), edges.end(), meta.grade_edges.begin());
  return meta;
}

}  // namespace ol2r
