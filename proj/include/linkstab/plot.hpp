#pragma once

// Static SVG line charts of the sweep CSV files.

#include <iosfwd>
#include <string>
#include <vector>

namespace linkstab::plot {

// Numeric CSV with a header row. Empty cells are NaN.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;  // -1 if absent
};

CsvTable read_csv(std::istream& is);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Chart {
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

/// x is the first column. When the second column is sqrt_d and the first
/// is not, it selects the curve and y is the third column; otherwise y is
/// the second column. Rows with an empty y cell are skipped.
Chart chart_from_table(const CsvTable& table);

/// Axis label with units for a CSV column name (the name itself if unknown).
std::string axis_label(const std::string& column);

struct Axis {
  double lo;
  double hi;
  std::vector<double> ticks;
  int decimals;  // for tick labels
};

/// Round-number axis covering [lo, hi] with about `target` ticks.
Axis nice_axis(double lo, double hi, int target = 5);

/// Deterministic SVG: the same chart always yields the same bytes.
std::string render_svg(const Chart& chart);

}  // namespace linkstab::plot
