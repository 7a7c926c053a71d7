#pragma once

#include <optional>
#include <string>
#include <vector>

namespace rom {

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct SvgChartOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  std::optional<double> horizontal_line;  // e.g. a PSD threshold
  std::optional<double> vertical_line;    // e.g. a train/validation divider
};

/// Dependency-free line chart. Output is deterministic; polyline coordinates
/// are printed with six decimal places so structural comparisons are stable.
std::string render_line_chart(const std::vector<SvgSeries>& series, const SvgChartOptions& options);

}  // namespace rom
