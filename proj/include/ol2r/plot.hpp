#pragma once

#include <string>
#include <vector>

namespace ol2r {

/// One curve: CSVs from the same configuration under different seeds,
/// averaged per round.
struct PlotSeries {
  std::string label;
  std::vector<std::string> csv_paths;
};

/// Renders <prefix>_offline_ndcg.svg (offline NDCG@10 at evaluation
/// rounds) and <prefix>_cumulative_ndcg.svg (running discounted online
/// NDCG), one polyline per series. Returns the two file paths.
std::vector<std::string> emit_plots(const std::vector<PlotSeries>& series,
                                    const std::string& out_prefix);

}  // namespace ol2r
