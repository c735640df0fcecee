#pragma once

#include <string>
#include <utility>
#include <vector>

#include "treedpp/geometry.hpp"

namespace treedpp {

struct PlotLabels {
  std::string title;
  std::string description;  // embedded verbatim (escaped) in <desc>
};

// Points of a planar configuration inside `frame`.
std::string scatterSvg(const std::vector<Point>& points, const Box& frame, const PlotLabels& labels);

// Histogram of `values` on [lo, hi) scaled to an intensity (points per unit
// length per draw), a rug of one configuration underneath, and an optional
// reference intensity curve.
std::string histogramSvg(const std::vector<double>& values, std::size_t draws, const std::vector<double>& rug,
                         double lo, double hi, int bins, const std::vector<std::pair<double, double>>& curve,
                         const PlotLabels& labels);

}  // namespace treedpp
