#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ol2r/click.hpp"
#include "ol2r/config.hpp"
#include "ol2r/dataset.hpp"
#include "ol2r/experiment.hpp"
#include "ol2r/exploration.hpp"
#include "ol2r/metrics.hpp"

namespace py = pybind11;

namespace {

// Thin value wrapper so results stay alive independently of the module.
struct RunResult {
  ol2r::RunRecord record;
};

py::list rows_to_list(const ol2r::RunRecord& rec) {
  py::list rows;
  for (const auto& row : rec.rows) {
    py::dict r;
    r["round"] = row.round;
    r["query_id"] = row.query_id;
    r["online_ndcg"] = row.online_ndcg;
    r["discounted_online"] = row.discounted_online;
    r["cum_online_ndcg"] = row.cum_online_ndcg;
    r["regret_pairs"] = row.regret_pairs;
    r["cum_regret"] = row.cum_regret;
    if (row.offline_ndcg10.has_value())
      r["offline_ndcg10"] = *row.offline_ndcg10;
    else
      r["offline_ndcg10"] = py::none();
    r["n_uncertain"] = row.n_uncertain;
    rows.append(r);
  }
  return rows;
}

py::dict summary_to_dict(const ol2r::RunRecord& rec) {
  py::dict summary;
  summary["cumulative_ndcg"] = rec.summary.cumulative_ndcg;
  summary["total_regret"] = rec.summary.total_regret;
  summary["mean_offline_ndcg_last10"] = rec.summary.mean_offline_ndcg_last10;
  summary["failed"] = rec.summary.failed;
  if (!rec.summary.error.empty()) summary["error"] = rec.summary.error;
  return summary;
}

py::dict record_to_dict(const ol2r::RunRecord& rec) {
  py::dict out;
  out["config_hash"] = rec.config_hash;
  out["seed"] = rec.seed;
  out["rows"] = rows_to_list(rec);
  out["summary"] = summary_to_dict(rec);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Online learning-to-rank simulation core";

  m.def("ndcg_at_k",
        [](const std::vector<int>& ranking, const std::vector<int>& labels,
           int k) { return ol2r::ndcg_at_k(ranking, labels, k); },
        py::arg("ranking"), py::arg("labels"), py::arg("k") = 10,
        "NDCG@k of a served ranking against graded labels");

  m.def("pairwise_regret",
        [](const std::vector<int>& ranking, const std::vector<int>& labels) {
          return ol2r::pairwise_regret(ranking, labels);
        },
        py::arg("ranking"), py::arg("labels"),
        "Number of label-distinct pairs served in the wrong order");

  m.def("cumulative_ndcg",
        [](const std::vector<double>& series, double gamma) {
          return ol2r::cumulative_ndcg(series, gamma);
        },
        py::arg("series"), py::arg("gamma") = 0.9995,
        "Discounted sum of per-round NDCG values");

  m.def("topo_rank",
        [](int n_docs, const std::vector<std::pair<int, int>>& certain,
           std::uint64_t seed) {
          ol2r::CertaintyPartition partition;
          partition.n_docs = n_docs;
          for (const auto& [above, below] : certain)
            partition.certain.push_back({above, below, 1.0});
          ol2r::RandomStream rng(seed);
          return ol2r::topo_rank(partition, n_docs, rng);
        },
        py::arg("n_docs"), py::arg("certain_edges"), py::arg("seed") = 0,
        "Random topological order respecting the given certain edges");

  m.def("make_synthetic_files",
        [](const std::string& out_dir, int n_train, int n_validation,
           int n_test, int docs_per_query, int dim, std::uint64_t seed) {
          const auto ds = ol2r::make_synthetic(n_train, n_validation, n_test,
                                               docs_per_query, dim, seed);
          ol2r::save_letor(ds.train, out_dir + "/train.txt");
          ol2r::save_letor(ds.validation, out_dir + "/validation.txt");
          ol2r::save_letor(ds.test, out_dir + "/test.txt");
          ol2r::save_synthetic_meta(ds.synthetic, out_dir + "/meta.json");
        },
        py::arg("out_dir"), py::arg("n_train") = 200,
        py::arg("n_validation") = 0, py::arg("n_test") = 100,
        py::arg("docs_per_query") = 10, py::arg("dim") = 10,
        py::arg("seed") = 7,
        "Write a synthetic dataset in LETOR format plus its metadata sidecar");

  py::class_<RunResult>(m, "RunResult")
      .def_property_readonly(
          "rows", [](const RunResult& r) { return rows_to_list(r.record); })
      .def_property_readonly(
          "summary",
          [](const RunResult& r) { return summary_to_dict(r.record); })
      .def("as_dict", [](const RunResult& r) { return record_to_dict(r.record); })
      .def("write_csv",
           [](const RunResult& r, const std::string& path, bool emit_timings) {
             ol2r::emit_csv(r.record, path, emit_timings);
           },
           py::arg("path"), py::arg("emit_timings") = false);

  m.def("run_experiment",
        [](const std::string& config_text, std::uint64_t seed) {
          const auto cfg = ol2r::parse_config_text(config_text);
          return RunResult{ol2r::run_experiment(cfg, seed)};
        },
        py::arg("config_text"), py::arg("seed") = 1,
        "Run the full interaction loop; returns a RunResult");

  m.def("default_config", []() { return ol2r::sample_config(); },
        "Commented sample configuration text");

  py::class_<ol2r::Dataset>(m, "Dataset")
      .def_static(
          "synthetic",
          [](int n_train, int n_validation, int n_test, int docs_per_query,
             int dim, std::uint64_t seed) {
            return ol2r::make_synthetic(n_train, n_validation, n_test,
                                        docs_per_query, dim, seed);
          },
          py::arg("n_train") = 200, py::arg("n_validation") = 0,
          py::arg("n_test") = 100, py::arg("docs_per_query") = 10,
          py::arg("dim") = 10, py::arg("seed") = 7)
      .def_property_readonly(
          "n_train",
          [](const ol2r::Dataset& d) { return d.train.size(); })
      .def_property_readonly(
          "n_test", [](const ol2r::Dataset& d) { return d.test.size(); })
      .def_property_readonly(
          "feature_dim", [](const ol2r::Dataset& d) { return d.feature_dim; });

  py::class_<ol2r::ClickProfile>(m, "ClickSim")
      .def_static("by_name", &ol2r::ClickProfile::by_name, py::arg("name"))
      .def_property_readonly("name",
                             [](const ol2r::ClickProfile& p) { return p.name; })
      .def_property_readonly(
          "click_prob",
          [](const ol2r::ClickProfile& p) {
            return std::vector<double>(p.click_prob.begin(), p.click_prob.end());
          })
      .def_property_readonly("stop_prob", [](const ol2r::ClickProfile& p) {
        return std::vector<double>(p.stop_prob.begin(), p.stop_prob.end());
      });
}
