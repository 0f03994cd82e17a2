#pragma once

// Plot descriptions for result CSVs: a JSON file naming columns, axes and
// series, plus an equivalent gnuplot script. No plotting happens here.

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "action_rdc/cli/config.hpp"

namespace action_rdc::cli {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  bool has(const std::string& c) const { return std::find(header.begin(), header.end(), c) != header.end(); }
};

inline CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : s) {
      if (c == ',') {
        cells.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur += c;
      }
    }
    cells.push_back(cur);
    return cells;
  };
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    if (t.header.empty()) {
      t.header = split(line);
    } else {
      t.rows.push_back(split(line));
    }
  }
  return t;
}

struct FigureSpec {
  json plot;
  std::string gnuplot;
};

namespace detail {

struct Series {
  std::string column;
  std::string label;
  std::string style;  // "solid" or "dashed"
};

inline std::string gp_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "''";
    else out += c;
  }
  return out + "'";
}

inline FigureSpec line_figure(const std::string& csv_name, const std::string& title, const std::string& x,
                              const std::string& xlabel, const std::string& ylabel, const std::vector<Series>& series) {
  FigureSpec f;
  f.plot = {{"kind", "line"},
            {"source", csv_name},
            {"title", title},
            {"x", {{"column", x}, {"label", xlabel}}},
            {"y", {{"label", ylabel}}}};
  f.plot["series"] = json::array();
  for (const auto& s : series) f.plot["series"].push_back({{"column", s.column}, {"label", s.label}, {"style", s.style}});
  std::ostringstream gp;
  gp << "set datafile separator ','\n"
     << "set key autotitle columnhead\n"
     << "set title " << gp_quote(title) << "\n"
     << "set xlabel " << gp_quote(xlabel) << "\n"
     << "set ylabel " << gp_quote(ylabel) << "\n"
     << "plot ";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    if (i) gp << ", \\\n     ";
    gp << (i ? "''" : gp_quote(csv_name)) << " using (column(" << gp_quote(x) << ")):(column(" << gp_quote(s.column)
       << ")) with lines dt " << (s.style == "dashed" ? 2 : 1) << " lw 2 title " << gp_quote(s.label);
  }
  gp << "\n";
  f.gnuplot = gp.str();
  return f;
}

}  // namespace detail

/// Chooses the figure from the CSV columns: rate versus cost (C, R_opt,
/// R_indep), rate over a distortion grid (D1, D2, R), or rate against the
/// first column of any other sweep.
inline FigureSpec figure_for(const std::string& csv_text, const std::string& csv_name) {
  const auto t = parse_csv(csv_text);
  if (t.header.empty() || t.rows.empty()) throw ConfigError("csv", "no data rows in " + csv_name);
  if (t.has("C") && t.has("R_opt") && t.has("R_indep")) {
    return detail::line_figure(csv_name, "Rate versus cost", "C", "cost budget C", "rate (bits/symbol)",
                               {{"R_opt", "optimized actions", "solid"},
                                {"R_indep", "actions independent of the source", "dashed"}});
  }
  if (t.has("D1") && t.has("D2") && t.has("R")) {
    std::size_t n2 = 0;
    for (const auto& r : t.rows) {
      if (r.front() == t.rows.front().front()) ++n2;
    }
    FigureSpec f;
    f.plot = {{"kind", "surface"},
              {"source", csv_name},
              {"title", "Rate versus distortions"},
              {"x", {{"column", "D1"}, {"label", "D1"}}},
              {"y", {{"column", "D2"}, {"label", "D2"}}},
              {"z", {{"column", "R"}, {"label", "rate (bits/symbol)"}}},
              {"grid", {{"rows", t.rows.size() / std::max<std::size_t>(n2, 1)}, {"cols", n2}}}};
    std::ostringstream gp;
    gp << "set datafile separator ','\n"
       << "set title 'Rate versus distortions'\n"
       << "set xlabel 'D1'\nset ylabel 'D2'\nset zlabel 'rate (bits/symbol)'\n"
       << "set dgrid3d " << t.rows.size() / std::max<std::size_t>(n2, 1) << "," << n2 << "\n"
       << "set pm3d\nset hidden3d\n"
       << "splot " << detail::gp_quote(csv_name)
       << " using (column('D1')):(column('D2')):(column('R')) with lines notitle\n";
    f.gnuplot = gp.str();
    return f;
  }
  const std::string x = t.header.front();
  if (t.has("rate") && x != "rate") {
    std::vector<detail::Series> s{{"rate", "rate", "solid"}};
    if (t.has("sum_rate") && !t.rows.front().empty()) {
      const auto col = std::find(t.header.begin(), t.header.end(), "sum_rate") - t.header.begin();
      if (static_cast<std::size_t>(col) < t.rows.front().size() && !t.rows.front()[col].empty()) {
        s.push_back({"sum_rate", "sum rate", "dashed"});
      }
    }
    if (t.has("error_rate")) s = {{"error_rate", "block error rate", "solid"}};
    return detail::line_figure(csv_name, "Sweep over " + x, x, x, s.front().label, s);
  }
  throw ConfigError("csv", "missing columns: expected (C, R_opt, R_indep), (D1, D2, R) or a swept 'rate' column");
}

}  // namespace action_rdc::cli
