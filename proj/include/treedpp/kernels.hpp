#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "treedpp/basis.hpp"
#include "treedpp/geometry.hpp"
#include "treedpp/measure.hpp"
#include "treedpp/tree_index.hpp"

namespace treedpp {

using Complex = std::complex<double>;

// Pointwise kernels. Diagonal values are the continuity limits.
double evalSine(double x, double y);
double evalAiry(double x, double y);
double evalBessel(double alpha, double x, double y);
Complex evalGinibre(const Point& x, const Point& y);

// Ginibre evaluation refuses Re(x conj(y)) beyond this (exp overflow guard).
inline constexpr double kGinibreExponentLimit = 700.0;

enum class KernelKind { Sine, Airy, Bessel, Ginibre, FiniteRank };

class NodeKernel;

// A continuous determinantal kernel K(x, y) together with its reference
// measure and the compact window on which it may be evaluated.
class ContinuousKernel {
 public:
  static ContinuousKernel sine(double bound = 8.0);
  static ContinuousKernel airy(double bound = 8.0);
  static ContinuousKernel bessel(double alpha, double bound = 8.0);
  static ContinuousKernel ginibre(double bound = 4.0);

  KernelKind kind() const { return kind_; }
  std::string name() const;
  double alpha() const { return alpha_; }
  // Evaluation window: |x| <= bound in 1D (x >= 0 for Bessel), sup norm in 2D.
  double bound() const { return bound_; }
  int dimension() const { return measure_.dimension(); }
  const ReferenceMeasure& measure() const { return measure_; }
  bool isReal() const { return kind_ != KernelKind::Ginibre; }

  Complex evaluate(const Point& x, const Point& y) const;

  // Caches per-node special-function values for repeated evaluation.
  NodeKernel onNodes(std::vector<Point> nodes) const;

  // Exact double integral of K over a cell pair (finite-rank kernels only).
  std::optional<Complex> exactCellPairIntegral(const CellKey& a, const CellKey& b) const;
  // Depth of cells on which a finite-rank kernel is constant.
  std::optional<int> constancyDepth() const;
  const std::vector<BasisFunction>& finiteRankElements() const { return elements_; }
  int finiteRankLevel() const { return fixtureLevel_; }

 private:
  friend ContinuousKernel buildFiniteRankKernel(const std::vector<TreeIndex>&, int,
                                                const ReferenceMeasure&);
  ContinuousKernel(KernelKind kind, ReferenceMeasure measure, double bound, double alpha = 0.0)
      : kind_(kind), measure_(measure), bound_(bound), alpha_(alpha) {}
  void checkWindow(const Point& p) const;

  KernelKind kind_;
  ReferenceMeasure measure_;
  double bound_;
  double alpha_;
  std::vector<BasisFunction> elements_;
  int fixtureLevel_ = 0;
};

// Projection kernel onto the span of the given level-l basis elements:
// K(x, y) = sum_k f_k(x) conj(f_k(y)). Duplicate indices are rejected.
ContinuousKernel buildFiniteRankKernel(const std::vector<TreeIndex>& elements, int level,
                                       const ReferenceMeasure& measure);

// Kernel restricted to a fixed node set, with special-function values
// computed once per node.
class NodeKernel {
 public:
  Complex operator()(std::size_t i, std::size_t j) const;
  std::size_t size() const { return nodes_.size(); }
  const Point& node(std::size_t i) const { return nodes_[i]; }

 private:
  friend class ContinuousKernel;
  const ContinuousKernel* kernel_ = nullptr;
  std::vector<Point> nodes_;
  std::vector<double> f_, g_;
};

}  // namespace treedpp
