#ifndef REBLUR_CLI_PLOT_H_
#define REBLUR_CLI_PLOT_H_

#include <filesystem>
#include <string>
#include <vector>

namespace reblur::cli {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

// Renders the chart as an 8-bit RGB PNG: axes with labelled ticks, one
// polyline with point markers per series, and a legend. Non-finite points
// are skipped.
void WriteLineChart(const std::filesystem::path& path, const LineChart& chart,
                    int width = 640, int height = 420);

}  // namespace reblur::cli

#endif  // REBLUR_CLI_PLOT_H_
