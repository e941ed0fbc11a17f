#include "ol2r/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "ol2r/errors.hpp"
#include "ol2r/experiment.hpp"

namespace ol2r {

namespace {

struct CsvColumns {
  std::vector<int> rounds;
  std::vector<double> cum_online;
  std::vector<std::pair<int, double>> offline;  // (round, value) eval rounds
};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

CsvColumns read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("plot: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("plot: empty csv " + path);
  if (line != kCsvHeader)
    throw DataError("plot: unexpected csv header in " + path);
  CsvColumns cols;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 13) throw DataError("plot: malformed row in " + path);
    const int round = std::stoi(f[0]);
    cols.rounds.push_back(round);
    cols.cum_online.push_back(std::stod(f[4]));
    if (!f[7].empty()) cols.offline.emplace_back(round, std::stod(f[7]));
  }
  return cols;
}

struct Curve {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

// Means across files at matching rounds (rows present in every file).
Curve average_offline(const PlotSeries& s) {
  Curve c;
  c.label = s.label;
  std::map<int, std::pair<double, int>> acc;
  for (const auto& path : s.csv_paths)
    for (const auto& [round, value] : read_csv(path).offline) {
      acc[round].first += value;
      acc[round].second += 1;
    }
  const int n_files = static_cast<int>(s.csv_paths.size());
  for (const auto& [round, pair] : acc)
    if (pair.second == n_files)
      c.points.emplace_back(round, pair.first / n_files);
  return c;
}

Curve average_cumulative(const PlotSeries& s) {
  Curve c;
  c.label = s.label;
  std::vector<CsvColumns> all;
  std::size_t min_rows = SIZE_MAX;
  for (const auto& path : s.csv_paths) {
    all.push_back(read_csv(path));
    min_rows = std::min(min_rows, all.back().rounds.size());
  }
  if (all.empty() || min_rows == SIZE_MAX) return c;
  // Thin long runs so the polyline stays manageable.
  const std::size_t stride = std::max<std::size_t>(1, min_rows / 1000);
  for (std::size_t i = 0; i < min_rows; i += stride) {
    double sum = 0.0;
    for (const auto& cols : all) sum += cols.cum_online[i];
    c.points.emplace_back(all.front().rounds[i],
                          sum / static_cast<double>(all.size()));
  }
  return c;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string render_svg(const std::vector<Curve>& curves,
                       const std::string& title, const std::string& y_label) {
  constexpr int width = 860, height = 520;
  constexpr int ml = 70, mr = 30, mt = 40, mb = 50;

  double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  bool any = false;
  for (const auto& c : curves)
    for (const auto& [x, y] : c.points) {
      if (!any) {
        xmin = xmax = x;
        ymin = ymax = y;
        any = true;
      }
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  auto px = [&](double x) {
    return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr);
  };
  auto py = [&](double y) {
    return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb);
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
     << "\" height=\"" << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"16\">"
     << title << "</text>\n";

  // Axes with a handful of ticks.
  os << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\""
     << width - mr << "\" y2=\"" << height - mb
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
     << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double xv = xmin + (xmax - xmin) * k / 5.0;
    const double yv = ymin + (ymax - ymin) * k / 5.0;
    os << "<text x=\"" << px(xv) << "\" y=\"" << height - mb + 18
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"11\">"
       << static_cast<long long>(std::llround(xv)) << "</text>\n";
    std::ostringstream yv_text;
    yv_text.precision(3);
    yv_text << yv;
    os << "<text x=\"" << ml - 8 << "\" y=\"" << py(yv) + 4
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
          "font-size=\"11\">"
       << yv_text.str() << "</text>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << py(yv) << "\" x2=\""
       << width - mr << "\" y2=\"" << py(yv)
       << "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
  }
  os << "<text x=\"16\" y=\"" << height / 2
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"12\" transform=\"rotate(-90 16 "
     << height / 2 << ")\">" << y_label << "</text>\n";
  os << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"12\">round</text>\n";

  for (std::size_t ci = 0; ci < curves.size(); ++ci) {
    const auto& c = curves[ci];
    const char* color = kPalette[ci % (sizeof(kPalette) / sizeof(char*))];
    os << "<polyline fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : c.points) os << px(x) << ',' << py(y) << ' ';
    os << "\"/>\n";
    const int ly = mt + 18 * static_cast<int>(ci);
    os << "<line x1=\"" << width - mr - 150 << "\" y1=\"" << ly << "\" x2=\""
       << width - mr - 120 << "\" y2=\"" << ly << "\" stroke=\"" << color
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << width - mr - 114 << "\" y=\"" << ly + 4
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << c.label
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("plot: cannot open " + path);
  out << content;
  if (!out) throw DataError("plot: write failed for " + path);
}

}  // namespace

std::vector<std::string> emit_plots(const std::vector<PlotSeries>& series,
                                    const std::string& out_prefix) {
  if (series.empty()) throw DataError("plot: no input series");
  std::vector<Curve> offline, cumulative;
  for (const auto& s : series) {
    if (s.csv_paths.empty())
      throw DataError("plot: series '" + s.label + "' has no csv files");
    offline.push_back(average_offline(s));
    cumulative.push_back(average_cumulative(s));
  }
  const std::string offline_path = out_prefix + "_offline_ndcg.svg";
  const std::string cum_path = out_prefix + "_cumulative_ndcg.svg";
  write_file(offline_path,
             render_svg(offline, "Offline NDCG@10", "mean NDCG@10"));
  write_file(cum_path, render_svg(cumulative, "Cumulative discounted NDCG",
                                  "cumulative NDCG"));
  return {offline_path, cum_path};
}

}  // namespace ol2r
