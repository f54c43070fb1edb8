#include "irgnh/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace irgnh::svg {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

std::string escape(const std::string& text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

struct Scale {
  bool log = false;
  double lo = 0.0;
  double hi = 1.0;

  double transform(double v) const { return log ? std::log10(v) : v; }
  bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
};

Scale fit_scale(bool log, const std::vector<Series>& series, bool use_x) {
  Scale s;
  s.log = log;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& ser : series) {
    const auto& vals = use_x ? ser.x : ser.y;
    for (double v : vals) {
      if (!s.usable(v)) continue;
      lo = std::min(lo, s.transform(v));
      hi = std::max(hi, s.transform(v));
    }
  }
  if (!std::isfinite(lo)) {
    lo = 0.0;
    hi = 1.0;
  }
  if (log) {
    lo = std::floor(lo);
    hi = std::ceil(hi);
  }
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  if (!log) {
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  s.lo = lo;
  s.hi = hi;
  return s;
}

std::string format_tick(double v, bool log) {
  std::ostringstream os;
  if (log) {
    os << "1e" << static_cast<int>(std::lround(v));
  } else {
    os.precision(3);
    os << v;
  }
  return os.str();
}

}  // namespace

std::string plot(const Axes& axes, const std::vector<Series>& series) {
  const Scale sx = fit_scale(axes.log_x, series, true);
  const Scale sy = fit_scale(axes.log_y, series, false);
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + (sx.transform(v) - sx.lo) / (sx.hi - sx.lo) * pw; };
  auto py = [&](double v) { return kTop + ph - (sy.transform(v) - sy.lo) / (sy.hi - sy.lo) * ph; };

  std::ostringstream os;
  os.precision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << escape(axes.title) << "</text>\n";
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";

  auto ticks = [](const Scale& s) {
    std::vector<double> t;
    if (s.log) {
      const int step = std::max(1, static_cast<int>(std::ceil((s.hi - s.lo) / 8.0)));
      for (double v = s.lo; v <= s.hi + 1e-9; v += step) t.push_back(v);
    } else {
      for (int k = 0; k <= 5; ++k) t.push_back(s.lo + k * (s.hi - s.lo) / 5.0);
    }
    return t;
  };
  for (double t : ticks(sx)) {
    const double x = kLeft + (t - sx.lo) / (sx.hi - sx.lo) * pw;
    os << "<line x1=\"" << x << "\" y1=\"" << kTop << "\" x2=\"" << x << "\" y2=\"" << kTop + ph
       << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << x << "\" y=\"" << kTop + ph + 16 << "\" text-anchor=\"middle\">"
       << format_tick(t, sx.log) << "</text>\n";
  }
  for (double t : ticks(sy)) {
    const double y = kTop + ph - (t - sy.lo) / (sy.hi - sy.lo) * ph;
    os << "<line x1=\"" << kLeft << "\" y1=\"" << y << "\" x2=\"" << kLeft + pw << "\" y2=\"" << y
       << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">"
       << format_tick(t, sy.log) << "</text>\n";
  }
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 18 << "\" text-anchor=\"middle\">"
     << escape(axes.x_label) << "</text>\n";
  os << "<text transform=\"translate(20," << kTop + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
     << escape(axes.y_label) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& ser = series[s];
    const char* color = kPalette[s % std::size(kPalette)];
    std::ostringstream pts;
    pts.precision(6);
    const std::size_t n = std::min(ser.x.size(), ser.y.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (!sx.usable(ser.x[i]) || !sy.usable(ser.y[i])) continue;
      const double x = px(ser.x[i]);
      const double y = py(ser.y[i]);
      pts << x << ',' << y << ' ';
      if (ser.markers)
        os << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"3.5\" fill=\"" << color << "\"/>\n";
    }
    if (ser.line)
      os << "<polyline points=\"" << pts.str() << "\" fill=\"none\" stroke=\"" << color
         << "\" stroke-width=\"1.5\"/>\n";
    const double ly = kTop + 16 + 18 * static_cast<double>(s);
    os << "<rect x=\"" << kLeft + pw + 12 << "\" y=\"" << ly - 9 << "\" width=\"10\" height=\"10\" fill=\""
       << color << "\"/>\n";
    os << "<text x=\"" << kLeft + pw + 28 << "\" y=\"" << ly << "\">" << escape(ser.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string loglog_fit(const Axes& axes, const std::vector<double>& x, const std::vector<double>& y,
                       double slope, double intercept) {
  Series data{"final error", x, y, true, false};
  Series fit{"fit, slope " + std::to_string(slope).substr(0, 6), {}, {}, false, true};
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (double v : x) {
    if (v > 0.0) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (hi > 0.0) {
    for (double v : {lo, hi}) {
      fit.x.push_back(v);
      fit.y.push_back(std::exp(intercept) * std::pow(v, slope));
    }
  }
  Axes a = axes;
  a.log_x = a.log_y = true;
  return plot(a, {data, fit});
}

std::string table(const std::string& title, const std::vector<TableRow>& rows) {
  const double row_h = 22.0;
  const double width = 620.0;
  const double height = 50.0 + row_h * static_cast<double>(rows.size());
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"monospace\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"10\" y=\"22\" font-family=\"sans-serif\" font-size=\"14\">" << escape(title) << "</text>\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double y = 34.0 + row_h * static_cast<double>(i);
    os << "<rect x=\"6\" y=\"" << y << "\" width=\"" << width - 12 << "\" height=\"" << row_h - 2
       << "\" fill=\"" << (rows[i].pass ? "#e8f5e9" : "#ffebee") << "\"/>\n";
    os << "<text x=\"12\" y=\"" << y + 15 << "\">" << escape(rows[i].label) << "</text>\n";
    os << "<text x=\"" << width - 14 << "\" y=\"" << y + 15 << "\" text-anchor=\"end\">"
       << escape(rows[i].value) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace irgnh::svg
