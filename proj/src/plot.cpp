#include "treedpp/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace treedpp {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 520.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 70.0;

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s = buf;
  return s == "-0.00" ? "0.00" : s;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string header(const PlotLabels& labels) {
  std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(kWidth, 0) + "\" height=\"" +
       fixed(kHeight, 0) + "\" viewBox=\"0 0 " + fixed(kWidth, 0) + " " + fixed(kHeight, 0) + "\">\n";
  s += "<desc>" + escape(labels.description) + "</desc>\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + fixed(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"15\">" + escape(labels.title) + "</text>\n";
  return s;
}

std::string text(double x, double y, const std::string& s, const char* anchor = "middle") {
  return "<text x=\"" + fixed(x) + "\" y=\"" + fixed(y) + "\" text-anchor=\"" + anchor +
         "\" font-family=\"sans-serif\" font-size=\"11\">" + escape(s) + "</text>\n";
}

std::string line(double x1, double y1, double x2, double y2, const char* stroke, double width = 1.0) {
  return "<line x1=\"" + fixed(x1) + "\" y1=\"" + fixed(y1) + "\" x2=\"" + fixed(x2) + "\" y2=\"" + fixed(y2) +
         "\" stroke=\"" + stroke + "\" stroke-width=\"" + fixed(width) + "\"/>\n";
}

std::string tickLabel(double v) {
  if (v == std::round(v)) return std::to_string(static_cast<long long>(v));
  return fixed(v);
}

// Roughly five ticks at a 1-2-5 spacing.
std::vector<double> ticks(double lo, double hi) {
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-12 * step; t += step) out.push_back(t == 0.0 ? 0.0 : t);
  return out;
}

}  // namespace

std::string scatterSvg(const std::vector<Point>& points, const Box& frame, const PlotLabels& labels) {
  const double plotW = kWidth - kLeft - kRight;
  const double plotH = kHeight - kTop - kBottom;
  const double side = std::min(plotW, plotH);
  const double x0 = kLeft + (plotW - side) / 2;
  const double y0 = kTop;
  auto px = [&](double x) { return x0 + (x - frame.lo[0]) / frame.width(0) * side; };
  auto py = [&](double y) { return y0 + side - (y - frame.lo[1]) / frame.width(1) * side; };

  std::string s = header(labels);
  s += "<rect x=\"" + fixed(x0) + "\" y=\"" + fixed(y0) + "\" width=\"" + fixed(side) + "\" height=\"" +
       fixed(side) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ticks(frame.lo[0], frame.hi[0])) {
    s += line(px(t), y0 + side, px(t), y0 + side + 5, "black");
    s += text(px(t), y0 + side + 18, tickLabel(t));
  }
  for (double t : ticks(frame.lo[1], frame.hi[1])) {
    s += line(x0 - 5, py(t), x0, py(t), "black");
    s += text(x0 - 8, py(t) + 4, tickLabel(t), "end");
  }
  s += "<g fill=\"#1f5fa8\" fill-opacity=\"0.8\">\n";
  for (const auto& p : points) {
    s += "<circle cx=\"" + fixed(px(p.x)) + "\" cy=\"" + fixed(py(p.y)) + "\" r=\"2.5\"/>\n";
  }
  s += "</g>\n";
  s += text(x0 + side / 2, y0 + side + 40, std::to_string(points.size()) + " points");
  return s + "</svg>\n";
}

std::string histogramSvg(const std::vector<double>& values, std::size_t draws, const std::vector<double>& rug,
                         double lo, double hi, int bins, const std::vector<std::pair<double, double>>& curve,
                         const PlotLabels& labels) {
  const double plotW = kWidth - kLeft - kRight;
  const double plotH = kHeight - kTop - kBottom - 30.0;
  const double binWidth = (hi - lo) / bins;
  std::vector<double> height(std::size_t(bins), 0.0);
  for (double v : values) {
    const auto b = std::clamp<long long>(static_cast<long long>(std::floor((v - lo) / binWidth)), 0, bins - 1);
    height[std::size_t(b)] += 1.0;
  }
  for (auto& h : height) h /= double(std::max<std::size_t>(draws, 1)) * binWidth;
  double top = 0.0;
  for (double h : height) top = std::max(top, h);
  for (const auto& c : curve) top = std::max(top, c.second);
  top = top > 0.0 ? top * 1.1 : 1.0;

  auto px = [&](double x) { return kLeft + (x - lo) / (hi - lo) * plotW; };
  auto py = [&](double y) { return kTop + plotH - y / top * plotH; };

  std::string s = header(labels);
  s += "<g fill=\"#9cbfe3\" stroke=\"#1f5fa8\" stroke-width=\"0.5\">\n";
  for (int b = 0; b < bins; ++b) {
    const double h = height[std::size_t(b)];
    if (h <= 0.0) continue;
    const double xa = px(lo + b * binWidth);
    s += "<rect x=\"" + fixed(xa) + "\" y=\"" + fixed(py(h)) + "\" width=\"" + fixed(px(lo + (b + 1) * binWidth) - xa) +
         "\" height=\"" + fixed(py(0.0) - py(h)) + "\"/>\n";
  }
  s += "</g>\n";
  if (!curve.empty()) {
    s += "<polyline fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < curve.size(); ++k) {
      if (k > 0) s += ' ';
      s += fixed(px(curve[k].first)) + "," + fixed(py(curve[k].second));
    }
    s += "\"/>\n";
  }
  s += line(kLeft, py(0.0), kLeft + plotW, py(0.0), "black");
  s += line(kLeft, kTop, kLeft, py(0.0), "black");
  for (double t : ticks(lo, hi)) {
    s += line(px(t), py(0.0), px(t), py(0.0) + 5, "black");
    s += text(px(t), py(0.0) + 18, tickLabel(t));
  }
  for (double t : ticks(0.0, top)) {
    s += line(kLeft - 5, py(t), kLeft, py(t), "black");
    s += text(kLeft - 8, py(t) + 4, fixed(t), "end");
  }

  const double rugTop = py(0.0) + 28;
  s += "<g stroke=\"black\" stroke-width=\"1\">\n";
  for (double v : rug) s += "<line x1=\"" + fixed(px(v)) + "\" y1=\"" + fixed(rugTop) + "\" x2=\"" + fixed(px(v)) +
                            "\" y2=\"" + fixed(rugTop + 16) + "\"/>\n";
  s += "</g>\n";
  s += text(kLeft + plotW / 2, kHeight - 8,
            "intensity over " + std::to_string(draws) + " draws; rug: draw 0 (" + std::to_string(rug.size()) +
                " points)");
  return s + "</svg>\n";
}

}  // namespace treedpp
