#include "rom/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rom {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.6f", value);
  return buffer;
}

std::string fmt_tick(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.4g", value);
  return buffer;
}

}  // namespace

std::string render_line_chart(const std::vector<SvgSeries>& series,
                              const SvgChartOptions& options) {
  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -std::numeric_limits<double>::infinity();
  double y_min = std::numeric_limits<double>::infinity();
  double y_max = -std::numeric_limits<double>::infinity();
  double y_positive_min = std::numeric_limits<double>::infinity();

  for (const SvgSeries& s : series) {
    if (s.x.size() != s.y.size()) throw std::invalid_argument("svg series x/y length mismatch");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x_min = std::min(x_min, s.x[i]);
      x_max = std::max(x_max, s.x[i]);
      y_min = std::min(y_min, s.y[i]);
      y_max = std::max(y_max, s.y[i]);
      if (s.y[i] > 0.0) y_positive_min = std::min(y_positive_min, s.y[i]);
    }
  }
  if (options.horizontal_line) {
    y_min = std::min(y_min, *options.horizontal_line);
    y_max = std::max(y_max, *options.horizontal_line);
    if (*options.horizontal_line > 0.0) {
      y_positive_min = std::min(y_positive_min, *options.horizontal_line);
    }
  }
  if (!std::isfinite(x_min) || !std::isfinite(y_min)) {
    x_min = 0.0; x_max = 1.0; y_min = 0.0; y_max = 1.0;
  }

  // Log charts clamp non-positive samples three decades below the smallest
  // positive one instead of dropping points.
  double floor = 0.0;
  if (options.log_y) {
    if (!std::isfinite(y_positive_min)) y_positive_min = 1.0;
    floor = y_positive_min * 1e-3;
    y_min = std::log10(floor);
    y_max = std::log10(std::max(y_max, y_positive_min));
  }
  if (x_max == x_min) x_max = x_min + 1.0;
  if (y_max == y_min) y_max = y_min + 1.0;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto x_pixel = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  auto y_value = [&](double y) { return options.log_y ? std::log10(std::max(y, floor)) : y; };
  auto y_pixel = [&](double y) {
    return kTop + (1.0 - (y_value(y) - y_min) / (y_max - y_min)) * plot_h;
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  out << "  <rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n";
  if (!options.title.empty()) {
    out << "  <text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << options.title << "</text>\n";
  }

  // Axes and ticks.
  out << "  <line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kTop + plot_h << "\" stroke=\"black\"/>\n";
  out << "  <line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w
      << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";
  constexpr int kTicks = 5;
  for (int i = 0; i <= kTicks; ++i) {
    const double fraction = static_cast<double>(i) / kTicks;
    const double px = kLeft + fraction * plot_w;
    const double tick_x = x_min + fraction * (x_max - x_min);
    out << "  <line x1=\"" << fmt(px) << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << fmt(px)
        << "\" y2=\"" << kTop + plot_h + 5 << "\" stroke=\"black\"/>\n";
    out << "  <text x=\"" << fmt(px) << "\" y=\"" << kTop + plot_h + 20
        << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt_tick(tick_x) << "</text>\n";

    const double py = kTop + (1.0 - fraction) * plot_h;
    const double tick_value = y_min + fraction * (y_max - y_min);
    const double tick_label = options.log_y ? std::pow(10.0, tick_value) : tick_value;
    out << "  <line x1=\"" << kLeft - 5 << "\" y1=\"" << fmt(py) << "\" x2=\"" << kLeft
        << "\" y2=\"" << fmt(py) << "\" stroke=\"black\"/>\n";
    out << "  <text x=\"" << kLeft - 8 << "\" y=\"" << fmt(py + 4)
        << "\" text-anchor=\"end\" font-size=\"11\">" << fmt_tick(tick_label) << "</text>\n";
  }
  if (!options.x_label.empty()) {
    out << "  <text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\" font-size=\"13\">" << options.x_label << "</text>\n";
  }
  if (!options.y_label.empty()) {
    out << "  <text x=\"18\" y=\"" << kTop + plot_h / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
        << kTop + plot_h / 2 << ")\">" << options.y_label << "</text>\n";
  }

  if (options.horizontal_line) {
    const double py = y_pixel(*options.horizontal_line);
    out << "  <line x1=\"" << kLeft << "\" y1=\"" << fmt(py) << "\" x2=\"" << kLeft + plot_w
        << "\" y2=\"" << fmt(py)
        << "\" stroke=\"red\" stroke-dasharray=\"6,3\" class=\"threshold\"/>\n";
  }
  if (options.vertical_line) {
    const double px = x_pixel(*options.vertical_line);
    out << "  <line x1=\"" << fmt(px) << "\" y1=\"" << kTop << "\" x2=\"" << fmt(px) << "\" y2=\""
        << kTop + plot_h << "\" stroke=\"gray\" stroke-dasharray=\"6,3\" class=\"divider\"/>\n";
  }

  for (std::size_t k = 0; k < series.size(); ++k) {
    const SvgSeries& s = series[k];
    if (s.x.empty()) continue;
    const char* color = kPalette[k % (sizeof(kPalette) / sizeof(kPalette[0]))];
    out << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (i > 0) out << " ";
      out << fmt(x_pixel(s.x[i])) << "," << fmt(y_pixel(s.y[i]));
    }
    out << "\"/>\n";
    if (!s.label.empty()) {
      out << "  <text x=\"" << kLeft + plot_w - 6 << "\" y=\"" << kTop + 16 + 16 * static_cast<double>(k)
          << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << color << "\">" << s.label
          << "</text>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace rom
