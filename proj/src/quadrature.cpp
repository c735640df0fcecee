#include "treedpp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace treedpp {

GaussLegendreRule gaussLegendre(int n) {
  if (n < 1) throw std::invalid_argument("Gauss-Legendre order must be >= 1");
  GaussLegendreRule rule;
  rule.nodes.resize(std::size_t(n));
  rule.weights.resize(std::size_t(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node for the weight.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[std::size_t(i)] = -x;
    rule.nodes[std::size_t(n - 1 - i)] = x;
    rule.weights[std::size_t(i)] = rule.weights[std::size_t(n - 1 - i)] = w;
  }
  if (n % 2 == 1) rule.nodes[std::size_t(n / 2)] = 0.0;
  return rule;
}

void WeightedNodes::append(const WeightedNodes& other) {
  points.insert(points.end(), other.points.begin(), other.points.end());
  weights.insert(weights.end(), other.weights.begin(), other.weights.end());
}

WeightedNodes boxRule(const Box& box, const ReferenceMeasure& measure, const GaussLegendreRule& rule) {
  WeightedNodes out;
  const auto n = rule.nodes.size();
  if (isGradedCell(box, measure)) {
    // x = h t^2 removes the sqrt(x) behaviour of half-line kernels at 0.
    const double h = box.width(0);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = 0.5 * (rule.nodes[i] + 1.0);
      const double x = box.lo[0] + h * t * t;
      out.points.push_back({x, 0.0});
      out.weights.push_back(rule.weights[i] * h * t * measure.axisDensity(x));
    }
    return out;
  }
  auto axis = [&](int a, std::size_t k) {
    const double half = 0.5 * box.width(a);
    return std::pair{box.lo[a] + half * (rule.nodes[k] + 1.0), half * rule.weights[k]};
  };
  for (std::size_t i = 0; i < n; ++i) {
    const auto [x, wx] = axis(0, i);
    if (box.dim == 1) {
      out.points.push_back({x, 0.0});
      out.weights.push_back(wx * measure.axisDensity(x));
      continue;
    }
    for (std::size_t j = 0; j < n; ++j) {
      const auto [y, wy] = axis(1, j);
      out.points.push_back({x, y});
      out.weights.push_back(wx * wy * measure.density({x, y}));
    }
  }
  return out;
}

WeightedNodes cellRule(const CellKey& cell, int subdivisions, const ReferenceMeasure& measure,
                       const GaussLegendreRule& rule) {
  WeightedNodes out;
  const int dim = measure.dimension();
  const std::uint64_t count = std::uint64_t(1) << subdivisions;
  for (std::uint64_t d = 0; d < count; ++d) {
    const CellKey sub{cell.root, (cell.path << subdivisions) | d, cell.depth + subdivisions};
    out.append(boxRule(cellBox(sub, dim), measure, rule));
  }
  return out;
}

namespace {

double correlationSum(const ContinuousKernel& kernel, std::span<const CellKey> cells,
                      int subdivisions, int order) {
  const auto rule = gaussLegendre(order);
  // One node set per distinct cell; the kernel is tabulated on their union.
  std::map<CellKey, std::pair<std::size_t, std::size_t>> ranges;
  WeightedNodes all;
  for (const auto& c : cells) {
    if (ranges.contains(c)) continue;
    int s = subdivisions;
    if (auto depth = kernel.constancyDepth()) s = std::max(s, *depth - c.depth);
    const auto nodes = cellRule(c, s, kernel.measure(), rule);
    ranges[c] = {all.points.size(), all.points.size() + nodes.points.size()};
    all.append(nodes);
  }
  const std::size_t n = all.points.size();
  if (n > 8192) {
    throw std::invalid_argument("correlation quadrature needs " + std::to_string(n) +
                                " nodes; lower the order or subdivisions");
  }
  const auto nk = kernel.onNodes(all.points);
  Eigen::MatrixXcd table(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      table(Eigen::Index(i), Eigen::Index(j)) = nk(i, j);
      table(Eigen::Index(j), Eigen::Index(i)) = std::conj(table(Eigen::Index(i), Eigen::Index(j)));
    }
  }
  const auto& w = all.weights;
  auto K = [&](std::size_t i, std::size_t j) { return table(Eigen::Index(i), Eigen::Index(j)); };

  double sum = 0.0;
  if (cells.size() == 1) {
    const auto [a0, a1] = ranges[cells[0]];
    for (auto i = a0; i < a1; ++i) sum += w[i] * K(i, i).real();
  } else if (cells.size() == 2) {
    const auto [a0, a1] = ranges[cells[0]];
    const auto [b0, b1] = ranges[cells[1]];
    for (auto i = a0; i < a1; ++i) {
      double inner = 0.0;
      for (auto j = b0; j < b1; ++j) {
        inner += w[j] * (K(i, i).real() * K(j, j).real() - std::norm(K(i, j)));
      }
      sum += w[i] * inner;
    }
  } else {
    const auto [a0, a1] = ranges[cells[0]];
    const auto [b0, b1] = ranges[cells[1]];
    const auto [c0, c1] = ranges[cells[2]];
    for (auto i = a0; i < a1; ++i) {
      for (auto j = b0; j < b1; ++j) {
        const Complex kij = K(i, j), kji = K(j, i);
        const double kii = K(i, i).real(), kjj = K(j, j).real();
        double inner = 0.0;
        for (auto k = c0; k < c1; ++k) {
          const Complex kik = K(i, k), kki = K(k, i), kjk = K(j, k), kkj = K(k, j);
          const double kkk = K(k, k).real();
          const Complex det = kii * (kjj * kkk - kjk * kkj) - kij * (kji * kkk - kjk * kki) +
                              kik * (kji * kkj - kjj * kki);
          inner += w[k] * det.real();
        }
        sum += w[i] * w[j] * inner;
      }
    }
  }
  return sum;
}

}  // namespace

QuadratureResult integrateCorrelation(const ContinuousKernel& kernel, std::span<const CellKey> cells,
                                      const QuadratureOptions& options) {
  if (cells.empty() || cells.size() > 3) {
    throw std::invalid_argument("correlation integrals are supported for 1 <= m <= 3");
  }
  QuadratureResult r;
  r.value = correlationSum(kernel, cells, options.subdivisions, options.order);
  const double coarse =
      correlationSum(kernel, cells, options.subdivisions, std::max(1, options.order / 2));
  r.errorEstimate = std::abs(r.value - coarse);
  return r;
}

}  // namespace treedpp
