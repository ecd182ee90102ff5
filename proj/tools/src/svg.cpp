#include "svarkit/app/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace svarkit::app::svg {

namespace {

constexpr double kCellW = 340, kCellH = 230, kPadL = 52, kPadR = 12, kPadT = 26, kPadB = 28;

std::string num(double v, const char* fmt = "%.1f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (std::isfinite(v)) lo = std::min(lo, v), hi = std::max(hi, v);
  }
  void add(const std::vector<double>& v) {
    for (double x : v) add(x);
  }
  void settle() {
    if (!std::isfinite(lo)) lo = 0, hi = 1;
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) lo -= 0.5, hi += 0.5;
  }
};

void draw_chart(std::ostringstream& o, const Chart& c, double ox, double oy) {
  Range xr, yr;
  xr.add(c.x);
  for (const auto& b : c.bands) yr.add(b.lo), yr.add(b.hi);
  for (const auto& l : c.lines) yr.add(l.y);
  if (c.reference) yr.add(*c.reference);
  xr.settle();
  yr.settle();
  const double w = kCellW - kPadL - kPadR, h = kCellH - kPadT - kPadB;
  auto px = [&](double x) { return ox + kPadL + (x - xr.lo) / (xr.hi - xr.lo) * w; };
  auto py = [&](double y) { return oy + kPadT + (yr.hi - y) / (yr.hi - yr.lo) * h; };

  o << "<g>\n<text x=\"" << num(ox + kPadL) << "\" y=\"" << num(oy + 16)
    << "\" font-size=\"12\" font-family=\"sans-serif\">" << escape(c.title) << "</text>\n";
  o << "<rect x=\"" << num(ox + kPadL) << "\" y=\"" << num(oy + kPadT) << "\" width=\"" << num(w) << "\" height=\""
    << num(h) << "\" fill=\"none\" stroke=\"#888888\" stroke-width=\"0.5\"/>\n";

  for (const auto& b : c.bands) {
    std::string pts;
    for (std::size_t i = 0; i < c.x.size() && i < b.hi.size(); ++i) {
      if (std::isfinite(b.hi[i])) pts += num(px(c.x[i])) + "," + num(py(b.hi[i])) + " ";
    }
    for (std::size_t i = std::min(c.x.size(), b.lo.size()); i-- > 0;) {
      if (std::isfinite(b.lo[i])) pts += num(px(c.x[i])) + "," + num(py(b.lo[i])) + " ";
    }
    o << "<polygon points=\"" << pts << "\" fill=\"" << b.color << "\" fill-opacity=\"0.5\" stroke=\"none\"/>\n";
  }
  if (c.reference && *c.reference >= yr.lo && *c.reference <= yr.hi) {
    o << "<line x1=\"" << num(px(xr.lo)) << "\" x2=\"" << num(px(xr.hi)) << "\" y1=\"" << num(py(*c.reference))
      << "\" y2=\"" << num(py(*c.reference)) << "\" stroke=\"#cc0000\" stroke-width=\"0.7\"/>\n";
  }
  for (const auto& l : c.lines) {
    std::string pts;
    for (std::size_t i = 0; i < c.x.size() && i < l.y.size(); ++i) {
      if (std::isfinite(l.y[i])) pts += num(px(c.x[i])) + "," + num(py(l.y[i])) + " ";
    }
    o << "<polyline points=\"" << pts << "\" fill=\"none\" stroke=\"" << l.color << "\" stroke-width=\"1.2\""
      << (l.dashed ? " stroke-dasharray=\"4,3\"" : "") << "/>\n";
  }

  const auto label = [&](double x, double y, const std::string& text, const char* anchor) {
    o << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-size=\"9\" font-family=\"sans-serif\" text-anchor=\""
      << anchor << "\">" << escape(text) << "</text>\n";
  };
  label(ox + kPadL - 4, py(yr.hi) + 8, num(yr.hi, "%.4g"), "end");
  label(ox + kPadL - 4, py(yr.lo), num(yr.lo, "%.4g"), "end");
  label(px(xr.lo), oy + kCellH - kPadB + 12, num(xr.lo, "%.6g"), "start");
  label(px(xr.hi), oy + kCellH - kPadB + 12, num(xr.hi, "%.6g"), "end");
  o << "</g>\n";
}

}  // namespace

std::string render(std::span<const Chart> charts, int columns, const std::string& title) {
  columns = std::max(1, std::min<int>(columns, static_cast<int>(std::max<std::size_t>(charts.size(), 1))));
  const int rows = static_cast<int>((charts.size() + static_cast<std::size_t>(columns) - 1) / static_cast<std::size_t>(columns));
  const double width = columns * kCellW, height = 30 + std::max(rows, 1) * kCellH;
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width, "%.0f") << "\" height=\""
    << num(height, "%.0f") << "\" viewBox=\"0 0 " << num(width, "%.0f") << " " << num(height, "%.0f") << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  o << "<text x=\"10\" y=\"20\" font-size=\"14\" font-family=\"sans-serif\">" << escape(title) << "</text>\n";
  for (std::size_t k = 0; k < charts.size(); ++k) {
    const auto r = static_cast<double>(k / static_cast<std::size_t>(columns));
    const auto c = static_cast<double>(k % static_cast<std::size_t>(columns));
    draw_chart(o, charts[k], c * kCellW, 30 + r * kCellH);
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace svarkit::app::svg
