#pragma once

#include <span>
#include <vector>

#include "treedpp/geometry.hpp"
#include "treedpp/kernels.hpp"
#include "treedpp/measure.hpp"

namespace treedpp {

// n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendreRule gaussLegendre(int n);

// Cells touching the origin of the half line get a quadratic node map.
inline bool isGradedCell(const Box& box, const ReferenceMeasure& measure) {
  return measure.kind() == MeasureKind::LebesgueHalfLine && box.lo[0] == 0.0;
}

// Tensor Gauss-Legendre nodes on a box, weights including the density of m.
struct WeightedNodes {
  std::vector<Point> points;
  std::vector<double> weights;

  void append(const WeightedNodes& other);
};
WeightedNodes boxRule(const Box& box, const ReferenceMeasure& measure, const GaussLegendreRule& rule);

// Composite rule on the depth-`subdivisions` descendants of a dyadic cell.
WeightedNodes cellRule(const CellKey& cell, int subdivisions, const ReferenceMeasure& measure,
                       const GaussLegendreRule& rule);

struct QuadratureOptions {
  int order = 16;         // Gauss-Legendre points per axis
  int subdivisions = 2;   // dyadic splits of each cell before applying the rule
  double tolerance = 1e-8;
};

struct QuadratureResult {
  double value = 0.0;
  double errorEstimate = 0.0;  // |Q(order) - Q(order / 2)|
};

// Integral of det[K(x_p, x_q)] over A_1 x ... x A_m against m^m, m <= 3.
// Finite-rank kernels are subdivided down to their constancy cells, which
// makes the rule exact for them.
QuadratureResult integrateCorrelation(const ContinuousKernel& kernel, std::span<const CellKey> cells,
                                      const QuadratureOptions& options);

}  // namespace treedpp
