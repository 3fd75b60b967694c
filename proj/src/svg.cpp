#include "hotspots/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "hotspots/error.hpp"
#include "hotspots/io.hpp"

namespace hotspots {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!(lo <= hi)) lo = 0.0, hi = 1.0;
    if (lo == hi) {
      const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.5;
      lo -= pad;
      hi += pad;
    }
  }
};

// a "nice" step for about n ticks
double tick_step(double span, int n) {
  const double raw = span / n;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (const double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) return m * mag;
  return 10.0 * mag;
}

std::string num(double v) { return format_number(v); }

class Plot {
 public:
  Plot(const SvgFrame& f, Range x, Range y) : f_(f), x_(x), y_(y) {}
  double px(double x) const { return f_.left + (x - x_.lo) / (x_.hi - x_.lo) * plot_w(); }
  double py(double y) const { return f_.top + (y_.hi - y) / (y_.hi - y_.lo) * plot_h(); }
  double plot_w() const { return f_.width - f_.left - f_.right; }
  double plot_h() const { return f_.height - f_.top - f_.bottom; }

 private:
  SvgFrame f_;
  Range x_, y_;
};

void check_curve(const std::string& kind, const std::string& name, std::size_t nx,
                 std::initializer_list<std::size_t> ny) {
  if (nx == 0) throw InputError("svg: " + kind + " '" + name + "' is empty");
  for (const auto n : ny)
    if (n != nx) throw InputError("svg: " + kind + " '" + name + "' has mismatched x/y lengths");
}

}  // namespace

std::string render_svg(const SvgFigure& fig, const SvgFrame& f) {
  if (fig.lines.empty() && fig.bands.empty()) throw InputError("svg: figure '" + fig.title + "' has no curves");
  Range xr, yr;
  for (const auto& b : fig.bands) {
    check_curve("band", b.name, b.x.size(), {b.lo.size(), b.hi.size()});
    for (std::size_t i = 0; i < b.x.size(); ++i) {
      xr.add(b.x[i]);
      yr.add(b.lo[i]);
      yr.add(b.hi[i]);
    }
  }
  for (const auto& l : fig.lines) {
    check_curve("curve", l.name, l.x.size(), {l.y.size()});
    for (std::size_t i = 0; i < l.x.size(); ++i) {
      xr.add(l.x[i]);
      yr.add(l.y[i]);
    }
  }
  xr.finish();
  yr.finish();
  const Plot p(f, xr, yr);

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(f.width) + "\" height=\"" + num(f.height) +
       "\" viewBox=\"0 0 " + num(f.width) + " " + num(f.height) + "\" data-x-min=\"" + num(xr.lo) + "\" data-x-max=\"" +
       num(xr.hi) + "\" data-y-min=\"" + num(yr.lo) + "\" data-y-max=\"" + num(yr.hi) + "\" data-left=\"" + num(f.left) +
       "\" data-top=\"" + num(f.top) + "\" data-plot-width=\"" + num(p.plot_w()) + "\" data-plot-height=\"" +
       num(p.plot_h()) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(f.width / 2) + "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" +
       escape(fig.title) + "</text>\n";

  // axes and ticks
  const double x0 = f.left, x1 = f.left + p.plot_w(), y0 = f.top + p.plot_h(), y1 = f.top;
  s += "<g stroke=\"#333\" stroke-width=\"1\" fill=\"none\"><rect x=\"" + num(x0) + "\" y=\"" + num(y1) +
       "\" width=\"" + num(p.plot_w()) + "\" height=\"" + num(p.plot_h()) + "\"/></g>\n";
  s += "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
  const double xs = tick_step(xr.hi - xr.lo, 6);
  for (double t = std::ceil(xr.lo / xs) * xs; t <= xr.hi + 1e-9 * xs; t += xs) {
    const double tx = p.px(t);
    const double tv = std::abs(t) < 1e-12 * xs ? 0.0 : t;
    s += "<line x1=\"" + num(tx) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(tx) + "\" y2=\"" + num(y0 + 4) +
         "\" stroke=\"#333\"/><text x=\"" + num(tx) + "\" y=\"" + num(y0 + 16) + "\" text-anchor=\"middle\">" +
         num(tv) + "</text>\n";
  }
  const double ys = tick_step(yr.hi - yr.lo, 5);
  for (double t = std::ceil(yr.lo / ys) * ys; t <= yr.hi + 1e-9 * ys; t += ys) {
    const double ty = p.py(t);
    const double tv = std::abs(t) < 1e-12 * ys ? 0.0 : t;
    s += "<line x1=\"" + num(x0 - 4) + "\" y1=\"" + num(ty) + "\" x2=\"" + num(x0) + "\" y2=\"" + num(ty) +
         "\" stroke=\"#333\"/><text x=\"" + num(x0 - 6) + "\" y=\"" + num(ty + 4) + "\" text-anchor=\"end\">" +
         num(tv) + "</text>\n";
  }
  s += "<text class=\"x-label\" x=\"" + num((x0 + x1) / 2) + "\" y=\"" + num(f.height - 14) +
       "\" text-anchor=\"middle\" font-size=\"13\">" + escape(fig.x_label) + "</text>\n";
  s += "<text class=\"y-label\" transform=\"translate(18," + num((y0 + y1) / 2) +
       ") rotate(-90)\" text-anchor=\"middle\" font-size=\"13\">" + escape(fig.y_label) + "</text>\n";
  s += "</g>\n";

  if (fig.diagonal) {
    const double lo = std::max(xr.lo, yr.lo), hi = std::min(xr.hi, yr.hi);
    if (lo < hi)
      s += "<line class=\"diagonal\" x1=\"" + num(p.px(lo)) + "\" y1=\"" + num(p.py(lo)) + "\" x2=\"" + num(p.px(hi)) +
           "\" y2=\"" + num(p.py(hi)) + "\" stroke=\"#999\" stroke-dasharray=\"2 3\"/>\n";
  }

  for (const auto& b : fig.bands) {
    std::string pts;
    for (std::size_t i = 0; i < b.x.size(); ++i) pts += num(p.px(b.x[i])) + "," + num(p.py(b.hi[i])) + " ";
    for (std::size_t i = b.x.size(); i-- > 0;) pts += num(p.px(b.x[i])) + "," + num(p.py(b.lo[i])) + " ";
    pts.pop_back();
    s += "<polygon class=\"band\" data-name=\"" + escape(b.name) + "\" points=\"" + pts + "\" fill=\"" + b.color +
         "\" fill-opacity=\"0.35\" stroke=\"none\"/>\n";
  }
  for (const auto& l : fig.lines) {
    const std::string dash = l.dashed ? " stroke-dasharray=\"6 4\"" : "";
    if (l.x.size() == 1) {
      s += "<circle class=\"point\" data-name=\"" + escape(l.name) + "\" cx=\"" + num(p.px(l.x[0])) + "\" cy=\"" +
           num(p.py(l.y[0])) + "\" r=\"3.5\" fill=\"" + l.color + "\"/>\n";
      continue;
    }
    std::string pts;
    for (std::size_t i = 0; i < l.x.size(); ++i) pts += num(p.px(l.x[i])) + "," + num(p.py(l.y[i])) + " ";
    pts.pop_back();
    s += "<polyline class=\"line\" data-name=\"" + escape(l.name) + "\" points=\"" + pts + "\" fill=\"none\" stroke=\"" +
         l.color + "\" stroke-width=\"1.8\"" + dash + "/>\n";
  }

  // legend
  double ly = f.top + 8;
  const double lx = x1 + 14;
  s += "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (const auto& l : fig.lines) {
    const std::string dash = l.dashed ? " stroke-dasharray=\"6 4\"" : "";
    s += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(lx + 22) + "\" y2=\"" + num(ly) +
         "\" stroke=\"" + l.color + "\" stroke-width=\"1.8\"" + dash + "/><text x=\"" + num(lx + 28) + "\" y=\"" +
         num(ly + 4) + "\">" + escape(l.name) + "</text>\n";
    ly += 18;
  }
  for (const auto& b : fig.bands) {
    s += "<rect x=\"" + num(lx) + "\" y=\"" + num(ly - 6) + "\" width=\"22\" height=\"12\" fill=\"" + b.color +
         "\" fill-opacity=\"0.35\"/><text x=\"" + num(lx + 28) + "\" y=\"" + num(ly + 4) + "\">" + escape(b.name) +
         "</text>\n";
    ly += 18;
  }
  s += "</g>\n</svg>\n";
  return s;
}

std::vector<std::pair<std::string, std::string>> pattern_report_svgs(const PatternReport& report) {
  std::vector<std::pair<std::string, std::string>> out;
  const std::string c1 = "#d95f02", c2 = "#7570b3";
  for (const auto& p : report.pairs) {
    const std::string a = "level " + std::to_string(p.upper_level), b = "level " + std::to_string(p.upper_level + 1);
    const std::string tag = "L" + std::to_string(p.upper_level) + "_L" + std::to_string(p.upper_level + 1);

    SvgFigure knn{"Mean KNN distance, " + a + " to " + b, "k (neighbors)", "mean distance (m)", {}, {}, false};
    std::vector<double> ks(p.knn.ks.begin(), p.knn.ks.end());
    knn.bands.push_back({"random 1, 10-90%", ks, p.knn_random1.band.q10, p.knn_random1.band.q90, "#fdae6b"});
    knn.bands.push_back({"random 2, 10-90%", ks, p.knn_random2.band.q10, p.knn_random2.band.q90, "#bcbddc"});
    knn.lines.push_back({"observed", ks, p.knn.values, false, "#1f4e79"});
    knn.lines.push_back({"random 1 median", ks, p.knn_random1.band.q50, true, c1});
    knn.lines.push_back({"random 2 median", ks, p.knn_random2.band.q50, true, c2});
    out.emplace_back("knn_" + tag, render_svg(knn));

    SvgFigure cov{"Coverage ratio, " + a + " over " + b, "radius (m)", "coverage ratio (fraction)", {}, {}, false};
    const auto& r = p.coverage.radii;
    cov.bands.push_back({"random 1, 10-90%", r, p.coverage_random1.band.q10, p.coverage_random1.band.q90, "#fdae6b"});
    cov.bands.push_back({"random 2, 10-90%", r, p.coverage_random2.band.q10, p.coverage_random2.band.q90, "#bcbddc"});
    cov.lines.push_back({"observed", r, p.coverage.values, false, "#1f4e79"});
    cov.lines.push_back({"random 1 median", r, p.coverage_random1.band.q50, true, c1});
    cov.lines.push_back({"random 2 median", r, p.coverage_random2.band.q50, true, c2});
    out.emplace_back("coverage_" + tag, render_svg(cov));

    for (const auto& ir : p.inhibit) {
      SvgFigure inh{"Normalized density, " + a + " vs " + b + ", d = " + format_number(ir.d_count) + " m",
                    "same-level density (normalized)", "next-level density (normalized)", {}, {}, true};
      SvgLine line{"mean next-level density", {}, {}, false, "#1f4e79"};
      for (const auto& pt : ir.curve) {
        line.x.push_back(pt.x);
        line.y.push_back(pt.y);
      }
      inh.lines.push_back(std::move(line));
      out.emplace_back("inhibit_" + tag + "_d" + format_number(ir.d_count), render_svg(inh));
    }
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> rmse_svgs(const std::vector<RmseSeries>& series) {
  static const std::map<std::string, std::pair<std::string, std::string>> colors{
      {"knn", {"#1f4e79", "#9ecae1"}}, {"global", {"#d95f02", "#fdae6b"}}, {"random", {"#7570b3", "#bcbddc"}}};
  std::map<int, SvgFigure> figs;
  for (const auto& s : series) {
    auto& fig = figs[s.level];
    if (fig.title.empty()) {
      fig.title = "RMSE of simulated level " + std::to_string(s.level);
      fig.x_label = "d_rmse (m)";
      fig.y_label = "RMSE (hotspot count)";
    }
    if (s.band.n_runs == 0) continue;
    const auto it = colors.find(s.mechanism);
    const auto [line, fill] = it == colors.end() ? std::pair<std::string, std::string>{"#333", "#ccc"} : it->second;
    fig.bands.push_back({s.mechanism + ", 10-90%", s.d_rmse, s.band.q10, s.band.q90, fill});
    fig.lines.push_back({s.mechanism + " median", s.d_rmse, s.band.q50, true, line});
  }
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [level, fig] : figs) out.emplace_back("rmse_L" + std::to_string(level), render_svg(fig));
  return out;
}

}  // namespace hotspots
