#include "fastslow/app/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace fastslow::app {

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 55;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  if (std::abs(v) < 1e-12) v = 0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::pair<double, double> data_range(const Plot& plot, bool want_x) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : plot.series) {
    for (auto [x, y] : s.points) {
      const double v = want_x ? x : y;
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!std::isfinite(lo)) return {0, 1};
  if (hi - lo < 1e-300) {
    const double pad = std::max(std::abs(lo) * 0.1, 1e-3);
    return {lo - pad, hi + pad};
  }
  return {lo, hi};
}

}  // namespace

std::vector<double> nice_ticks(double lo, double hi, int target) {
  if (!(hi > lo) || target < 1) return {lo};
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) ticks.push_back(t);
  return ticks;
}

std::string render_svg(const Plot& plot) {
  const auto [x0, x1] = plot.x_range.value_or(data_range(plot, true));
  const auto [y0, y1] = plot.y_range.value_or(data_range(plot, false));
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return kTop + ph - (y - y0) / (y1 - y0) * ph; };
  auto inside = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && x >= x0 && x <= x1 && y >= y0 && y <= y1;
  };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
    << escape(plot.title) << "</text>\n";
  o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (double t : nice_ticks(x0, x1)) {
    const double px = sx(t);
    o << "<line x1=\"" << fmt(px) << "\" y1=\"" << fmt(kTop + ph) << "\" x2=\"" << fmt(px) << "\" y2=\""
      << fmt(kTop + ph + 5) << "\" stroke=\"black\"/>";
    o << "<text x=\"" << fmt(px) << "\" y=\"" << fmt(kTop + ph + 18) << "\" text-anchor=\"middle\">"
      << tick_label(t) << "</text>\n";
  }
  for (double t : nice_ticks(y0, y1)) {
    const double py = sy(t);
    o << "<line x1=\"" << fmt(kLeft - 5) << "\" y1=\"" << fmt(py) << "\" x2=\"" << fmt(kLeft) << "\" y2=\""
      << fmt(py) << "\" stroke=\"black\"/>";
    o << "<text x=\"" << fmt(kLeft - 8) << "\" y=\"" << fmt(py + 4) << "\" text-anchor=\"end\">"
      << tick_label(t) << "</text>\n";
  }
  o << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"" << fmt(kHeight - 12) << "\" text-anchor=\"middle\">"
    << escape(plot.x_label) << "</text>\n";
  o << "<text transform=\"translate(16," << fmt(kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(plot.y_label) << "</text>\n";

  for (const auto& m : plot.vlines) {
    if (m.at < x0 || m.at > x1) continue;
    o << "<line x1=\"" << fmt(sx(m.at)) << "\" y1=\"" << kTop << "\" x2=\"" << fmt(sx(m.at)) << "\" y2=\""
      << fmt(kTop + ph) << "\" stroke=\"gray\" stroke-dasharray=\"2,3\"/>";
    o << "<text x=\"" << fmt(sx(m.at) + 3) << "\" y=\"" << fmt(kTop + 12) << "\" fill=\"gray\">"
      << escape(m.label) << "</text>\n";
  }
  for (const auto& m : plot.hlines) {
    if (m.at < y0 || m.at > y1) continue;
    o << "<line x1=\"" << kLeft << "\" y1=\"" << fmt(sy(m.at)) << "\" x2=\"" << fmt(kLeft + pw) << "\" y2=\""
      << fmt(sy(m.at)) << "\" stroke=\"gray\" stroke-dasharray=\"2,3\"/>";
    o << "<text x=\"" << fmt(kLeft + 4) << "\" y=\"" << fmt(sy(m.at) - 4) << "\" fill=\"gray\">"
      << escape(m.label) << "</text>\n";
  }

  o << "<g>\n";
  for (const auto& s : plot.series) {
    std::vector<std::string> runs;
    std::string cur;
    std::size_t count = 0;
    auto flush = [&] {
      if (count >= 2) runs.push_back(cur);
      cur.clear();
      count = 0;
    };
    for (auto [x, y] : s.points) {
      if (!inside(x, y)) {
        flush();
        continue;
      }
      if (count) cur += ' ';
      cur += fmt(sx(x)) + "," + fmt(sy(y));
      ++count;
    }
    flush();
    for (const auto& r : runs) {
      o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
      if (s.dashed) o << " stroke-dasharray=\"6,4\"";
      o << " points=\"" << r << "\"/>\n";
    }
  }
  o << "</g>\n";

  double ly = kTop + 10;
  for (const auto& s : plot.series) {
    const double lx = kLeft + pw + 12;
    o << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(lx + 22) << "\" y2=\"" << fmt(ly)
      << "\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"" << (s.dashed ? " stroke-dasharray=\"6,4\"" : "")
      << "/>";
    o << "<text x=\"" << fmt(lx + 27) << "\" y=\"" << fmt(ly + 4) << "\">" << escape(s.name) << "</text>\n";
    ly += 18;
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace fastslow::app
