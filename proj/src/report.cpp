#include "fvdae/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace fvdae {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

std::string fixed(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

double axis_value(const StudyResult& r, const RunRecord& rec) { return r.kind == "temporal" ? rec.h : rec.dx; }

const NormPair& field_norm(const RunRecord& rec, std::size_t field) {
  return field == 0 ? rec.u : field == 1 ? rec.ubar : rec.p;
}

}  // namespace

void write_results_csv(std::ostream& out, const StudyResult& result) {
  out << kResultsHeader << '\n';
  for (std::size_t f = 0; f < result.fields.size(); ++f) {
    const std::string slope =
        f < result.orders.size() ? (result.orders[f].valid ? fixed(result.orders[f].slope, 4) : "inf") : "";
    for (const RunRecord& r : result.runs) {
      out << to_string(r.case_id) << ',' << to_string(r.interp) << ',' << r.method << ',' << r.tableau << ','
          << r.n_grid << ',' << r.steps << ',' << num(r.h) << ',' << num(r.h_per_stage) << ',' << num(r.u.l2)
          << ',' << num(r.u.linf) << ',' << num(r.ubar.l2) << ',' << num(r.p.l2) << ',' << num(r.p.linf) << ','
          << result.fields[f] << ',' << slope << '\n';
    }
  }
}

void write_summary(std::ostream& out, const StudyResult& result) {
  const bool temporal = result.kind == "temporal";
  out << (temporal ? "steps" : "grid") << "  " << (temporal ? "h" : "dx");
  for (const std::string& f : result.fields) out << "  " << f << "_l2  " << f << "_linf";
  out << "  max|Dubar-r|\n";
  for (const RunRecord& r : result.runs) {
    out << (temporal ? r.steps : r.n_grid) << "  " << num(axis_value(result, r));
    for (std::size_t f = 0; f < result.fields.size(); ++f)
      out << "  " << num(field_norm(r, f).l2) << "  " << num(field_norm(r, f).linf);
    out << "  " << num(r.max_constraint) << '\n';
  }
  for (const FieldOrder& o : result.orders)
    out << "slope " << o.field << " = " << (o.valid ? fixed(o.slope, 3) : "inf") << '\n';
}

void write_svg(std::ostream& out, const StudyResult& result, const std::string& title) {
  constexpr double W = 640, H = 480, L = 80, R = 150, T = 40, B = 60;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const RunRecord& r : result.runs) {
    const double x = std::log10(axis_value(result, r));
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    for (std::size_t f = 0; f < result.fields.size(); ++f) {
      const double e = field_norm(r, f).l2;
      if (e <= 0.0) continue;
      ymin = std::min(ymin, std::log10(e));
      ymax = std::max(ymax, std::log10(e));
    }
  }
  if (!(xmax > xmin)) xmax = xmin + 1.0;
  if (!(ymax > ymin)) ymax = ymin + 1.0;
  xmin = std::floor(xmin * 2.0) / 2.0;
  xmax = std::ceil(xmax * 2.0) / 2.0;
  ymin = std::floor(ymin) - 0.5;
  ymax = std::ceil(ymax);
  auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double y) { return T + (ymax - y) / (ymax - ymin) * (H - T - B); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  out << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double y = std::ceil(ymin); y <= ymax; y += 1.0)
    out << "<text x=\"" << L - 6 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\" font-size=\"11\">1e"
        << static_cast<int>(y) << "</text>\n";
  for (double x = std::ceil(xmin * 2.0) / 2.0; x <= xmax + 1e-12; x += 0.5)
    out << "<text x=\"" << px(x) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\" font-size=\"11\">"
        << num(std::pow(10.0, x)).substr(0, 4) << num(std::pow(10.0, x)).substr(12) << "</text>\n";
  out << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 16 << "\" text-anchor=\"middle\" font-size=\"12\">"
      << (result.kind == "temporal" ? "time step h" : "grid spacing") << "</text>\n";

  static constexpr std::array<const char*, 3> colours{"#1f77b4", "#d62728", "#2ca02c"};
  for (std::size_t f = 0; f < result.fields.size(); ++f) {
    std::string pts;
    for (const RunRecord& r : result.runs) {
      const double e = field_norm(r, f).l2;
      if (e <= 0.0) continue;
      const double x = px(std::log10(axis_value(result, r))), y = py(std::log10(e));
      pts += fixed(x, 1) + "," + fixed(y, 1) + " ";
      out << "<circle cx=\"" << fixed(x, 1) << "\" cy=\"" << fixed(y, 1) << "\" r=\"3\" fill=\"" << colours[f % 3]
          << "\"/>\n";
    }
    out << "<polyline points=\"" << pts << "\" fill=\"none\" stroke=\"" << colours[f % 3] << "\"/>\n";
    const double ly = T + 20 + 20 * static_cast<double>(f);
    out << "<text x=\"" << W - R + 10 << "\" y=\"" << ly << "\" font-size=\"12\" fill=\"" << colours[f % 3] << "\">"
        << result.fields[f];
    if (f < result.orders.size() && result.orders[f].valid) out << " (" << fixed(result.orders[f].slope, 2) << ")";
    out << "</text>\n";
  }
  // slope guides through the coarsest p point
  if (!result.runs.empty()) {
    const RunRecord& anchor = result.runs.front();
    const double x0 = std::log10(axis_value(result, anchor));
    const double y0 = std::log10(std::max(anchor.p.l2, 1e-300)) - 0.5;
    for (int k = 1; k <= 3; ++k) {
      const double x1 = xmin;
      const double y1 = y0 + k * (x1 - x0);
      out << "<line x1=\"" << fixed(px(x0), 1) << "\" y1=\"" << fixed(py(y0), 1) << "\" x2=\"" << fixed(px(x1), 1)
          << "\" y2=\"" << fixed(py(y1), 1) << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
      out << "<text x=\"" << fixed(px(x1) + 4, 1) << "\" y=\"" << fixed(py(y1), 1)
          << "\" font-size=\"10\" fill=\"gray\">slope " << k << "</text>\n";
    }
  }
  out << "</svg>\n";
}

}  // namespace fvdae
