#include "linkstab/plot.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <sstream>

#include "linkstab/errors.hpp"

namespace linkstab::plot {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 72.0;
constexpr double kRight = 150.0;
constexpr double kTop = 20.0;
constexpr double kBottom = 56.0;

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                  "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f"};

std::string fixed(double v, int decimals) {
  if (v == 0.0) v = 0.0;  // no "-0.00"
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
  std::string s(buf, res.ptr);
  if (s.find_first_not_of("-0.") == std::string::npos) s = decimals > 0 ? "0." + std::string(decimals, '0') : "0";
  return s;
}

std::string coord(double v) { return fixed(v, 2); }

std::string general(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 6);
  return std::string(buf, res.ptr);
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

double parse_cell(const std::string& raw) {
  const auto first = raw.find_first_not_of(" \t\r");
  if (first == std::string::npos) return kNaN;
  const auto last = raw.find_last_not_of(" \t\r");
  const std::string s = raw.substr(first, last - first + 1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw DomainError("csv: non-numeric cell '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(line);
  while (std::getline(ss, item, ',')) out.push_back(item);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

int CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  if (!std::getline(is, line)) throw DomainError("csv: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  t.header = split(line);
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != t.header.size()) throw DomainError("csv: row width differs from header");
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_cell(c));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string axis_label(const std::string& column) {
  if (column == "delta_t") return "Δt [s]";
  if (column == "sqrt_d") return "√D [m/√s]";
  if (column == "tau") return "τ [s]";
  if (column == "r_mi") return "R_MI";
  if (column == "entropy_rate") return "H(L2|L1) [bit/sample]";
  if (column == "marginal_entropy") return "H(L2) [bit]";
  return column;
}

Chart chart_from_table(const CsvTable& table) {
  if (table.header.size() < 2) throw DomainError("plot: need at least two columns");
  const bool grouped = table.header.size() >= 3 && table.header[1] == "sqrt_d" && table.header[0] != "sqrt_d";
  const std::size_t ycol = grouped ? 2 : 1;

  Chart chart;
  chart.x_label = axis_label(table.header[0]);
  chart.y_label = axis_label(table.header[ycol]);
  for (const auto& row : table.rows) {
    if (!std::isfinite(row[0]) || !std::isfinite(row[ycol])) continue;
    const std::string label = grouped ? "√D = " + general(row[1]) : axis_label(table.header[ycol]);
    auto it = std::find_if(chart.series.begin(), chart.series.end(),
                           [&](const Series& s) { return s.label == label; });
    if (it == chart.series.end()) {
      chart.series.push_back({label, {}, {}});
      it = std::prev(chart.series.end());
    }
    it->x.push_back(row[0]);
    it->y.push_back(row[ycol]);
  }
  return chart;
}

Axis nice_axis(double lo, double hi, int target) {
  if (!(std::isfinite(lo) && std::isfinite(hi))) throw DomainError("plot: non-finite axis range");
  if (hi < lo) std::swap(lo, hi);
  if (hi == lo) {
    const double pad = lo == 0.0 ? 1.0 : 0.1 * std::abs(lo);
    lo -= pad;
    hi += pad;
  }
  const double raw = (hi - lo) / std::max(1, target);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double frac = raw / mag;
  const double step = (frac <= 1.0 ? 1.0 : frac <= 2.0 ? 2.0 : frac <= 5.0 ? 5.0 : 10.0) * mag;

  Axis a;
  a.lo = std::floor(lo / step + 1e-9) * step;
  a.hi = std::ceil(hi / step - 1e-9) * step;
  a.decimals = std::max(0, -static_cast<int>(std::floor(std::log10(step) + 1e-9)));
  const int n = static_cast<int>(std::lround((a.hi - a.lo) / step));
  for (int i = 0; i <= n; ++i) a.ticks.push_back(a.lo + i * step);
  return a;
}

std::string render_svg(const Chart& chart) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : chart.series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (!std::isfinite(xmin)) xmin = xmax = ymin = ymax = 0.0;
  const Axis ax = nice_axis(xmin, xmax);
  const Axis ay = nice_axis(ymin, ymax);

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  const auto px = [&](double x) { return kLeft + (x - ax.lo) / (ax.hi - ax.lo) * pw; };
  const auto py = [&](double y) { return kTop + ph - (y - ay.lo) / (ay.hi - ay.lo) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << coord(kWidth) << "\" height=\"" << coord(kHeight)
     << "\" viewBox=\"0 0 " << coord(kWidth) << ' ' << coord(kHeight)
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Grid lines and ticks.
  for (double t : ax.ticks) {
    const double x = px(t);
    os << "<line x1=\"" << coord(x) << "\" y1=\"" << coord(kTop) << "\" x2=\"" << coord(x) << "\" y2=\""
       << coord(kTop + ph) << "\" stroke=\"#e0e0e0\"/>\n";
    os << "<text x=\"" << coord(x) << "\" y=\"" << coord(kTop + ph + 16) << "\" text-anchor=\"middle\">"
       << fixed(t, ax.decimals) << "</text>\n";
  }
  for (double t : ay.ticks) {
    const double y = py(t);
    os << "<line x1=\"" << coord(kLeft) << "\" y1=\"" << coord(y) << "\" x2=\"" << coord(kLeft + pw) << "\" y2=\""
       << coord(y) << "\" stroke=\"#e0e0e0\"/>\n";
    os << "<text x=\"" << coord(kLeft - 6) << "\" y=\"" << coord(y + 4) << "\" text-anchor=\"end\">"
       << fixed(t, ay.decimals) << "</text>\n";
  }
  os << "<rect x=\"" << coord(kLeft) << "\" y=\"" << coord(kTop) << "\" width=\"" << coord(pw) << "\" height=\""
     << coord(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << coord(kLeft + pw / 2) << "\" y=\"" << coord(kHeight - 14)
     << "\" text-anchor=\"middle\">" << escape(chart.x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << coord(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << coord(kTop + ph / 2) << ")\">" << escape(chart.y_label) << "</text>\n";

  for (std::size_t k = 0; k < chart.series.size(); ++k) {
    const Series& s = chart.series[k];
    const char* color = kPalette[k % kPalette.size()];
    if (s.x.size() > 1) {
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) os << (i ? " " : "") << coord(px(s.x[i])) << ',' << coord(py(s.y[i]));
      os << "\"/>\n";
    }
    for (std::size_t i = 0; i < s.x.size(); ++i)
      os << "<circle cx=\"" << coord(px(s.x[i])) << "\" cy=\"" << coord(py(s.y[i])) << "\" r=\"2.5\" fill=\""
         << color << "\"/>\n";

    const double ly = kTop + 14 + 18 * static_cast<double>(k);
    const double lx = kLeft + pw + 12;
    os << "<line x1=\"" << coord(lx) << "\" y1=\"" << coord(ly - 4) << "\" x2=\"" << coord(lx + 20) << "\" y2=\""
       << coord(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    os << "<text x=\"" << coord(lx + 26) << "\" y=\"" << coord(ly) << "\">" << escape(s.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace linkstab::plot
