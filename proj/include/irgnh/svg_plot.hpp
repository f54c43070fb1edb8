#pragma once

#include <string>
#include <vector>

namespace irgnh::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = true;
  bool line = false;
};

struct Axes {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
};

/// Standalone SVG document with axes, decade ticks on log axes, a legend and
/// one polyline/marker set per series. Non-positive values are skipped on log
/// axes.
std::string plot(const Axes& axes, const std::vector<Series>& series);

/// Log-log scatter of (x, y) with the fitted line exp(intercept) x^slope.
std::string loglog_fit(const Axes& axes, const std::vector<double>& x, const std::vector<double>& y,
                       double slope, double intercept);

struct TableRow {
  std::string label;
  std::string value;
  bool pass = true;
};

/// Two-column table, rows shaded by pass/fail.
std::string table(const std::string& title, const std::vector<TableRow>& rows);

}  // namespace irgnh::svg
