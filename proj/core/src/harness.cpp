#include "pwcvx/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "pwcvx/formulation.hpp"

namespace pwcvx {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

const char* formulation_word(FormulationKind k) {
  switch (k) {
    case FormulationKind::IM: return "im";
    case FormulationKind::MCM: return "mcm";
    default: return "ccm";
  }
}

void describe_instance(const ProblemInstance& inst, TableRow& row) {
  if (const auto* nck = std::get_if<NckInstance>(&inst)) {
    row.family = nck->family == NckFamily::Trig ? "nck-trig" : "nck-logistic";
    row.size = std::to_string(nck->n);
    row.type = 0;
    row.seed = nck->seed;
  } else {
    const auto& u = std::get<UflInstance>(inst);
    row.family = "ufl";
    row.size = std::to_string(u.K) + "x" + std::to_string(u.T);
    row.type = u.type;
    row.seed = u.seed;
  }
}

}  // namespace

std::vector<TableRow> run_experiment(const ExperimentSpec& spec) {
  std::vector<ExperimentCombo> combos = spec.combos;
  if (combos.empty())
    combos = {{FormulationKind::IM, true},
              {FormulationKind::IM, false},
              {FormulationKind::MCM, true},
              {FormulationKind::CCM, true}};

  std::vector<TableRow> rows;
  for (const ProblemInstance& inst : spec.instances) {
    SeparableProblem prob = to_separable(inst);
    size_t first_row = rows.size();
    double best_incumbent = std::numeric_limits<double>::infinity();
    for (const ExperimentCombo& combo : combos) {
      Model m = build_model(prob, combo.kind, combo.strengthened);
      SolveConfig cfg = spec.config;
      if (spec.use_repair_hook)
        cfg.primal_hook = [&inst](const std::vector<double>& x) {
          return std::optional<std::vector<double>>(
              evaluate_and_repair(inst, x).point);
        };
      SolveReport rep = branch_and_cut(m, cfg);

      TableRow row;
      describe_instance(inst, row);
      row.formulation = formulation_word(combo.kind);
      row.strengthened = combo.strengthened;
      row.status = to_string(rep.status);
      row.root_bound = rep.root_bound;
      row.final_bound = rep.final_bound;
      row.incumbent = rep.incumbent_value;
      row.root_cuts = rep.root_cuts;
      row.total_cuts = rep.total_cuts;
      row.nodes = rep.nodes;
      row.root_time_s = rep.root_seconds;
      row.total_time_s = rep.total_seconds;
      rows.push_back(std::move(row));
      if (std::isfinite(rep.incumbent_value))
        best_incumbent = std::min(best_incumbent, rep.incumbent_value);
    }
    double best_solved = std::numeric_limits<double>::infinity();
    for (size_t i = first_row; i < rows.size(); ++i)
      if (rows[i].status == std::string("optimal") &&
          std::isfinite(rows[i].incumbent))
        best_solved = std::min(best_solved, rows[i].incumbent);
    for (size_t i = first_row; i < rows.size(); ++i) {
      rows[i].root_gap_pct = mip_gap_percent(best_incumbent, rows[i].root_bound);
      rows[i].final_gap_pct =
          mip_gap_percent(best_incumbent, rows[i].final_bound);
      // Formulations share the integer feasible set, so solved runs must
      // agree on the optimum; a run that does not is marked, not dropped.
      rows[i].flagged = rows[i].status == std::string("optimal") &&
                        std::isfinite(rows[i].incumbent) &&
                        std::abs(rows[i].incumbent - best_solved) >
                            1e-5 * (1 + std::abs(best_solved));
    }
  }
  return rows;
}

std::string rows_to_csv(const std::vector<TableRow>& rows) {
  std::string out =
      "family,size,type,seed,formulation,strengthened,status,root_bound,"
      "final_bound,incumbent,root_gap_pct,final_gap_pct,root_cuts,total_cuts,"
      "nodes,root_time_s,total_time_s,flagged\n";
  for (const TableRow& r : rows) {
    out += r.family + "," + r.size + "," + std::to_string(r.type) + "," +
           std::to_string(r.seed) + "," + r.formulation + "," +
           (r.strengthened ? "1" : "0") + "," + r.status + "," +
           fmt("%.10g", r.root_bound) + "," + fmt("%.10g", r.final_bound) +
           "," + fmt("%.10g", r.incumbent) + "," +
           fmt("%.6g", r.root_gap_pct) + "," + fmt("%.6g", r.final_gap_pct) +
           "," + std::to_string(r.root_cuts) + "," +
           std::to_string(r.total_cuts) + "," + std::to_string(r.nodes) + "," +
           fmt("%.3f", r.root_time_s) + "," + fmt("%.3f", r.total_time_s) +
           "," + (r.flagged ? "1" : "0") + "\n";
  }
  return out;
}

void write_csv(const std::vector<TableRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << rows_to_csv(rows);
}

std::vector<AggregateRow> aggregate_rows(const std::vector<TableRow>& rows) {
  std::vector<AggregateRow> out;
  std::vector<std::string> keys;
  std::vector<std::vector<int>> counts;  // per group, per cell
  for (const TableRow& r : rows) {
    std::string key = r.family + "|" + r.size + "|" + std::to_string(r.type);
    std::size_t gi = 0;
    while (gi < keys.size() && keys[gi] != key) ++gi;
    if (gi == keys.size()) {
      keys.push_back(key);
      AggregateRow ar;
      ar.family = r.family;
      ar.size = r.size;
      ar.type = r.type;
      out.push_back(std::move(ar));
      counts.emplace_back();
    }
    AggregateRow& ar = out[gi];
    std::string form = r.formulation + (r.strengthened ? "" : "-plain");
    std::size_t ci = 0;
    while (ci < ar.cells.size() && ar.cells[ci].formulation != form) ++ci;
    if (ci == ar.cells.size()) {
      AggregateCell c;
      c.formulation = form;
      ar.cells.push_back(std::move(c));
      counts[gi].push_back(0);
    }
    AggregateCell& c = ar.cells[ci];
    ++counts[gi][ci];
    c.solved += r.status == "optimal" ? 1 : 0;
    c.mean_root_gap_pct += r.root_gap_pct;
    c.mean_final_gap_pct += r.final_gap_pct;
    c.mean_time_s += r.total_time_s;
    c.mean_root_cuts += r.root_cuts;
    c.mean_nodes += static_cast<double>(r.nodes);
  }
  for (std::size_t gi = 0; gi < out.size(); ++gi) {
    int inst = 0;
    for (std::size_t ci = 0; ci < out[gi].cells.size(); ++ci) {
      int n = counts[gi][ci];
      inst = std::max(inst, n);
      if (n == 0) continue;
      AggregateCell& c = out[gi].cells[ci];
      c.mean_root_gap_pct /= n;
      c.mean_final_gap_pct /= n;
      c.mean_time_s /= n;
      c.mean_root_cuts /= n;
      c.mean_nodes /= n;
    }
    out[gi].instances = inst;
  }
  return out;
}

std::string aggregate_to_csv(const std::vector<AggregateRow>& rows) {
  std::string out = "family,size,type,instances";
  if (!rows.empty()) {
    for (const AggregateCell& c : rows.front().cells) {
      std::string p = c.formulation;
      for (char& ch : p)
        if (ch == '-') ch = '_';
      out += "," + p + "_solved," + p + "_root_gap_pct," + p +
             "_final_gap_pct," + p + "_time_s," + p + "_root_cuts," + p +
             "_nodes";
    }
  }
  out += "\n";
  for (const AggregateRow& r : rows) {
    out += r.family + "," + r.size + "," + std::to_string(r.type) + "," +
           std::to_string(r.instances);
    for (const AggregateCell& c : r.cells)
      out += "," + std::to_string(c.solved) + "," +
             fmt("%.6g", c.mean_root_gap_pct) + "," +
             fmt("%.6g", c.mean_final_gap_pct) + "," +
             fmt("%.3f", c.mean_time_s) + "," + fmt("%.6g", c.mean_root_cuts) +
             "," + fmt("%.6g", c.mean_nodes) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// SVG plotting.
// ---------------------------------------------------------------------------

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                          "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string plot_profiles(const std::vector<double>& xs,
                          const std::vector<PlotSeries>& series,
                          const std::string& title, const std::string& xlabel,
                          const std::string& ylabel) {
  const double W = 760, H = 480;
  const double ML = 72, MR = 24, MT = 44, MB = 52;
  const double PW = W - ML - MR, PH = H - MT - MB;

  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool have = false;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i])) continue;
    for (const auto& s : series) {
      if (i >= s.ys.size() || !std::isfinite(s.ys[i])) continue;
      if (!have) {
        xmin = xmax = xs[i];
        ymin = ymax = s.ys[i];
        have = true;
      } else {
        xmin = std::min(xmin, xs[i]);
        xmax = std::max(xmax, xs[i]);
        ymin = std::min(ymin, s.ys[i]);
        ymax = std::max(ymax, s.ys[i]);
      }
    }
  }
  if (xmax - xmin < 1e-12) xmax = xmin + 1;
  if (ymax - ymin < 1e-12) ymax = ymin + 1;
  double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  auto px = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * PW; };
  auto py = [&](double y) { return MT + (ymax - y) / (ymax - ymin) * PH; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"760\" "
         "height=\"480\" viewBox=\"0 0 760 480\">\n";
  svg += "<rect width=\"760\" height=\"480\" fill=\"white\"/>\n";
  svg += "<text x=\"380\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">" +
         escape_xml(title) + "</text>\n";

  // frame and ticks
  svg += "<rect x=\"" + fmt("%.2f", ML) + "\" y=\"" + fmt("%.2f", MT) +
         "\" width=\"" + fmt("%.2f", PW) + "\" height=\"" + fmt("%.2f", PH) +
         "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    double xv = xmin + (xmax - xmin) * i / 5;
    double yv = ymin + (ymax - ymin) * i / 5;
    svg += "<line x1=\"" + fmt("%.2f", px(xv)) + "\" y1=\"" +
           fmt("%.2f", MT + PH) + "\" x2=\"" + fmt("%.2f", px(xv)) +
           "\" y2=\"" + fmt("%.2f", MT + PH + 5) +
           "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + fmt("%.2f", px(xv)) + "\" y=\"" +
           fmt("%.2f", MT + PH + 20) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">" +
           fmt("%.6g", xv) + "</text>\n";
    svg += "<line x1=\"" + fmt("%.2f", ML - 5) + "\" y1=\"" +
           fmt("%.2f", py(yv)) + "\" x2=\"" + fmt("%.2f", ML) + "\" y2=\"" +
           fmt("%.2f", py(yv)) +
           "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + fmt("%.2f", ML - 9) + "\" y=\"" +
           fmt("%.2f", py(yv) + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">" +
           fmt("%.6g", yv) + "</text>\n";
  }
  svg += "<text x=\"" + fmt("%.2f", ML + PW / 2) + "\" y=\"" +
         fmt("%.2f", H - 12) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">" +
         escape_xml(xlabel) + "</text>\n";
  svg += "<text x=\"18\" y=\"" + fmt("%.2f", MT + PH / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" transform=\"rotate(-90 18 " +
         fmt("%.2f", MT + PH / 2) + ")\">" +
         escape_xml(ylabel) + "</text>\n";

  for (size_t si = 0; si < series.size(); ++si) {
    const char* color = kPalette[si % 6];
    const std::string dash =
        series[si].dashed ? " stroke-dasharray=\"2 4\"" : "";
    std::string points;
    double x_first = 0, x_last = 0;
    auto flush = [&]() {
      if (!points.empty()) {
        if (series[si].fill) {
          // close the run over the top edge: the area above the curve
          svg += "<polygon fill=\"";
          svg += color;
          svg += "\" fill-opacity=\"0.10\" stroke=\"none\" points=\"" +
                 points + " " + fmt("%.6f", x_last) + "," + fmt("%.2f", MT) +
                 " " + fmt("%.6f", x_first) + "," + fmt("%.2f", MT) + "\"/>\n";
        }
        svg += "<polyline fill=\"none\" stroke=\"";
        svg += color;
        svg += "\" stroke-width=\"1.6\"" + dash + " points=\"" + points +
               "\"/>\n";
        points.clear();
      }
    };
    for (size_t i = 0; i < xs.size() && i < series[si].ys.size(); ++i) {
      double y = series[si].ys[i];
      if (!std::isfinite(xs[i]) || !std::isfinite(y)) {
        flush();
        continue;
      }
      if (points.empty()) x_first = px(xs[i]);
      x_last = px(xs[i]);
      if (!points.empty()) points += ' ';
      points += fmt("%.6f", px(xs[i])) + "," + fmt("%.6f", py(y));
    }
    flush();
    double ly = MT + 16 + 18 * static_cast<double>(si);
    svg += "<line x1=\"" + fmt("%.2f", ML + PW - 150) + "\" y1=\"" +
           fmt("%.2f", ly) + "\" x2=\"" + fmt("%.2f", ML + PW - 122) +
           "\" y2=\"" + fmt("%.2f", ly) + "\" stroke=\"";
    svg += color;
    svg += "\" stroke-width=\"1.6\"" + dash + "/>\n";
    svg += "<text x=\"" + fmt("%.2f", ML + PW - 116) + "\" y=\"" +
           fmt("%.2f", ly + 4) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" +
           escape_xml(series[si].label) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::string plot_relaxation_figure(const UnivariateFunction& g, double lo,
                                   double hi, int points,
                                   const std::string& title,
                                   const ProfileOptions& opts) {
  if (points < 2) throw std::invalid_argument("need at least two points");
  std::vector<double> xs(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i)
    xs[static_cast<std::size_t>(i)] =
        i == points - 1 ? hi : lo + (hi - lo) * i / (points - 1);

  Decomposition d = find_breakpoints(g, lo, hi);
  PlotSeries orig, relaxed, pim, pmc;
  orig.label = "g";
  orig.dashed = true;
  relaxed.label = "relaxed g";
  relaxed.fill = true;
  for (double x : xs) {
    orig.ys.push_back(g.eval(x));
    relaxed.ys.push_back(relaxed_eval(g, d, x));
  }
  ProfileOptions io = opts;
  io.kind = FormulationKind::IM;
  ProfileOptions mo = opts;
  mo.kind = FormulationKind::MCM;
  pim.label = "incremental relaxation";
  pim.ys = profile_curve(g, lo, hi, xs, io);
  pmc.label = "multiple-choice relaxation";
  pmc.ys = profile_curve(g, lo, hi, xs, mo);
  return plot_profiles(xs, {orig, relaxed, pim, pmc}, title);
}

}  // namespace pwcvx
