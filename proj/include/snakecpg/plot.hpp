// SVG figures: head paths coloured by per-step reward, learning curves, and
// event-window traces. Each figure is drawn from the same records that the
// data tables carry.

#ifndef SNAKECPG_PLOT_HPP_
#define SNAKECPG_PLOT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "snakecpg/curve.hpp"
#include "snakecpg/export.hpp"

namespace snakecpg::plot {

class Svg {
 public:
  Svg(double w, double h) : w_(w), h_(h) {}

  void line(double x1, double y1, double x2, double y2, const std::string& color,
            double width = 1.0) {
    body_ += tag("line", "x1=\"" + n(x1) + "\" y1=\"" + n(y1) + "\" x2=\"" + n(x2) +
                             "\" y2=\"" + n(y2) + "\" stroke=\"" + color +
                             "\" stroke-width=\"" + n(width) + "\"");
  }
  void circle(double cx, double cy, double r, const std::string& fill,
              const std::string& stroke = "none") {
    body_ += tag("circle", "cx=\"" + n(cx) + "\" cy=\"" + n(cy) + "\" r=\"" + n(r) +
                               "\" fill=\"" + fill + "\" stroke=\"" + stroke + "\"");
  }
  void rect(double x, double y, double w, double h, const std::string& fill,
            double opacity = 1.0) {
    body_ += tag("rect", "x=\"" + n(x) + "\" y=\"" + n(y) + "\" width=\"" + n(w) +
                             "\" height=\"" + n(h) + "\" fill=\"" + fill +
                             "\" fill-opacity=\"" + n(opacity) + "\"");
  }
  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color,
                double width = 1.0) {
    std::string p;
    for (const auto& [x, y] : pts) p += n(x) + "," + n(y) + " ";
    body_ += tag("polyline", "points=\"" + p + "\" fill=\"none\" stroke=\"" + color +
                                 "\" stroke-width=\"" + n(width) + "\"");
  }
  void text(double x, double y, const std::string& s, double size = 12,
            const std::string& anchor = "start") {
    body_ += "<text x=\"" + n(x) + "\" y=\"" + n(y) + "\" font-size=\"" + n(size) +
             "\" font-family=\"sans-serif\" text-anchor=\"" + anchor + "\">" + s + "</text>\n";
  }

  std::string str() const {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + n(w_) + "\" height=\"" +
           n(h_) + "\" viewBox=\"0 0 " + n(w_) + " " + n(h_) + "\">\n<rect width=\"100%\" "
           "height=\"100%\" fill=\"white\"/>\n" + body_ + "</svg>\n";
  }

 private:
  static std::string n(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
  }
  static std::string tag(const char* name, const std::string& attrs) {
    return std::string("<") + name + " " + attrs + "/>\n";
  }
  double w_, h_;
  std::string body_;
};

// Blue (low) to red (high).
inline std::string colormap(double t) {
  t = std::clamp(t, 0.0, 1.0);
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(255 * t),
                static_cast<int>(80 * (1.0 - std::abs(2.0 * t - 1.0))),
                static_cast<int>(255 * (1.0 - t)));
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(hi > lo)) {
      lo -= 1.0;
      hi += 1.0;
    }
  }
  double unit(double v) const { return (v - lo) / (hi - lo); }
};

// Per-step potential-flow reward, attract plus repulse. The goal term is left
// out so the arrival step does not wash out the scale.
inline double shaping(const env::StepRecord& s) { return s.reward.attract + s.reward.repulse; }

// Colour scale clipped to the 5th-95th percentile band.
inline std::string path_figure(const std::vector<io::TrajectoryDump>& dumps) {
  Range x, y;
  std::vector<double> r;
  for (const auto& d : dumps) {
    for (const auto& s : d.steps) {
      x.add(s.head.position.x);
      y.add(s.head.position.y);
      r.push_back(shaping(s));
    }
    const auto& g = d.episode.at("goal");
    x.add(g[0].get<double>());
    y.add(g[1].get<double>());
    for (const auto& ob : d.episode.at("obstacles")) {
      x.add(ob[0].get<double>());
      y.add(ob[1].get<double>());
    }
  }
  x.add(0.0);
  y.add(0.0);
  x.pad();
  y.pad();
  std::sort(r.begin(), r.end());
  const double rlo = r.empty() ? 0.0 : r[r.size() / 20];
  const double rhi = r.empty() ? 1.0 : r[r.size() - 1 - r.size() / 20];
  const double margin = 40.0, scale = 500.0 / std::max(x.hi - x.lo, y.hi - y.lo);
  const double W = (x.hi - x.lo) * scale + 2 * margin, H = (y.hi - y.lo) * scale + 2 * margin;
  Svg svg(W, H + 20);
  auto px = [&](double v) { return margin + (v - x.lo) * scale; };
  auto py = [&](double v) { return H - margin - (v - y.lo) * scale; };
  for (const auto& d : dumps) {
    for (const auto& ob : d.episode.at("obstacles"))
      svg.circle(px(ob[0].get<double>()), py(ob[1].get<double>()),
                 ob[2].get<double>() * scale, "#888888");
    const auto& g = d.episode.at("goal");
    svg.circle(px(g[0].get<double>()), py(g[1].get<double>()),
               d.episode.at("accept_radius").get<double>() * scale, "none", "#2a9d2a");
    for (std::size_t k = 1; k < d.steps.size(); ++k) {
      const auto& a = d.steps[k - 1].head.position;
      const auto& b = d.steps[k].head.position;
      const double v = shaping(d.steps[k]);
      svg.line(px(a.x), py(a.y), px(b.x), py(b.y),
               colormap(rhi > rlo ? (v - rlo) / (rhi - rlo) : 0.5), 2.0);
    }
  }
  svg.text(margin, H + 10, "head path, colour = per-step potential reward (blue low, red high)");
  return svg.str();
}

inline std::string learning_curve_figure(const std::vector<game::EpisodeLog>& log) {
  const double W = 800, H = 360, m = 50;
  Range r;
  for (const auto& l : log) r.add(l.reward);
  r.pad();
  Svg svg(W, H);
  const double n = std::max<double>(1.0, static_cast<double>(log.size()));
  auto px = [&](double k) { return m + k / n * (W - 2 * m); };
  auto py = [&](double v) { return H - m - r.unit(v) * (H - 2 * m); };
  // Phase bands.
  std::size_t start = 0;
  for (std::size_t k = 1; k <= log.size(); ++k) {
    if (k < log.size() && log[k].phase == log[start].phase && log[k].macro == log[start].macro)
      continue;
    const std::string& ph = log[start].phase;
    const std::string color = ph == "R" ? "#f4a261" : ph == "C" ? "#2a9df4" : "#cccccc";
    svg.rect(px(static_cast<double>(start)), m, px(static_cast<double>(k)) - px(static_cast<double>(start)),
             H - 2 * m, color, 0.2);
    svg.text(px(static_cast<double>(start)) + 2, m - 4, ph, 10);
    start = k;
  }
  std::vector<std::pair<double, double>> pts;
  for (std::size_t k = 0; k < log.size(); ++k)
    pts.emplace_back(px(static_cast<double>(k)), py(log[k].reward));
  svg.polyline(pts, "#333333", 1.0);
  svg.line(m, H - m, W - m, H - m, "black");
  svg.line(m, m, m, H - m, "black");
  svg.text(W / 2, H - 15, "episode", 12, "middle");
  svg.text(m, H - m + 15, io::fmt(r.lo, 0), 10);
  svg.text(m, m + 10, io::fmt(r.hi, 0), 10);
  return svg.str();
}

// Stacked traces of the tonic imbalance of link 1, K_f^(-1/2), kappa_1 and
// f_1, with the event-active steps shaded.
inline std::string event_figure(const io::TrajectoryDump& d) {
  const double W = 800, panel = 120, m = 50;
  const double H = 4 * panel + 2 * m;
  Svg svg(W, H);
  if (d.steps.empty()) return svg.str();
  const double t0 = 0.0, t1 = d.steps.back().time;
  auto px = [&](double t) { return m + (t - t0) / std::max(1e-9, t1 - t0) * (W - 2 * m); };
  const double dt = d.steps.size() > 1 ? d.steps[1].time - d.steps[0].time : 0.05;
  for (const auto& s : d.steps)
    if (s.event) svg.rect(px(s.time - dt), m, px(s.time) - px(s.time - dt), 4 * panel, "#f4a261", 0.25);
  struct Series {
    const char* name;
    double (*get)(const env::StepRecord&);
  };
  const Series series[4] = {
      {"u (link 1)", [](const env::StepRecord& s) { return s.tonic_imbalance[0]; }},
      {"K_f^-1/2", [](const env::StepRecord& s) { return 1.0 / std::sqrt(s.k_f); }},
      {"kappa_1", [](const env::StepRecord& s) { return s.kappa[0]; }},
      {"f_1", [](const env::StepRecord& s) { return s.f[0]; }}};
  for (int k = 0; k < 4; ++k) {
    Range r;
    for (const auto& s : d.steps) r.add(series[k].get(s));
    r.pad();
    const double top = m + k * panel;
    std::vector<std::pair<double, double>> pts;
    for (const auto& s : d.steps)
      pts.emplace_back(px(s.time), top + panel - 10 - r.unit(series[k].get(s)) * (panel - 20));
    svg.polyline(pts, "#1d3557", 1.2);
    svg.line(m, top + panel, W - m, top + panel, "#999999");
    svg.text(5, top + 15, series[k].name, 11);
  }
  svg.text(W / 2, H - 15, "time (s)", 12, "middle");
  return svg.str();
}

}  // namespace snakecpg::plot

#endif  // SNAKECPG_PLOT_HPP_
