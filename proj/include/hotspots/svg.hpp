#pragma once

#include <string>
#include <vector>

#include "hotspots/metrics.hpp"
#include "hotspots/simulation.hpp"

namespace hotspots {

struct SvgLine {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
  std::string color = "#1f4e79";
};

/// Shaded region between lo and hi over x.
struct SvgBand {
  std::string name;
  std::vector<double> x;
  std::vector<double> lo;
  std::vector<double> hi;
  std::string color = "#9ecae1";
};

struct SvgFigure {
  std::string title;
  std::string x_label;  ///< include the unit, e.g. "radius (m)"
  std::string y_label;
  std::vector<SvgBand> bands;
  std::vector<SvgLine> lines;
  bool diagonal = false;  ///< draw y = x
};

/// Plot geometry, exposed so a reader can map pixel coordinates back to data.
struct SvgFrame {
  double width = 640, height = 420;
  double left = 72, right = 170, top = 40, bottom = 56;
};

/// Self-contained SVG. The root element carries data-x-min/max and
/// data-y-min/max; band polygons list the hi edge left to right, then the lo
/// edge right to left. Throws InputError naming an empty or ragged curve.
std::string render_svg(const SvgFigure& figure, const SvgFrame& frame = {});

/// Figures for every level pair of a report: knn, coverage and one inhibit
/// figure per d_count. Pairs of (file stem, svg text).
std::vector<std::pair<std::string, std::string>> pattern_report_svgs(const PatternReport& report);

struct RmseSeries {
  std::string mechanism;
  int level = 0;
  std::vector<double> d_rmse;
  QuantileBand band;
};

/// One figure per simulated level with a median line and band per mechanism.
std::vector<std::pair<std::string, std::string>> rmse_svgs(const std::vector<RmseSeries>& series);

}  // namespace hotspots
