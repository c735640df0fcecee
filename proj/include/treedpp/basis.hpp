#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>

#include "treedpp/geometry.hpp"
#include "treedpp/measure.hpp"
#include "treedpp/partition.hpp"
#include "treedpp/tree_index.hpp"

namespace treedpp {

struct BasisPiece {
  CellKey cell;
  Box box;
  double coefficient = 0.0;
  double mass = 0.0;  // m(cell)
};

// Piecewise-constant basis element f_{l,i}: a normalised indicator at rank 1,
// a mean-zero two-piece Haar function a 1_{C0} - b 1_{C1} at rank >= 2.
class BasisFunction {
 public:
  BasisFunction(TreeIndex index, CellKey support, std::vector<BasisPiece> pieces)
      : index_(index), support_(support), pieces_(std::move(pieces)) {}

  const TreeIndex& index() const { return index_; }
  const CellKey& support() const { return support_; }
  const std::vector<BasisPiece>& pieces() const { return pieces_; }
  int finestDepth() const { return pieces_.back().cell.depth; }

  double value(const Point& p) const;
  double value(const CellKey& finerCell) const;  // value on a cell inside one piece

 private:
  TreeIndex index_;
  CellKey support_;
  std::vector<BasisPiece> pieces_;
};

// Generalised Haar coefficients for child masses m0, m1: the unique (a, b)
// with a m0 = b m1 and a^2 m0 + b^2 m1 = 1.
std::pair<double, double> haarCoefficients(double m0, double m1);

// Throws std::invalid_argument if the index is not in the basis index set and
// PartitionError if a child cell has zero mass.
BasisFunction buildBasisFunction(const TreeIndex& index, const ReferenceMeasure& measure);

// Exact integral of f g dm (piecewise-constant integrand on nested cells).
double innerProduct(const BasisFunction& f, const BasisFunction& g);

// Exact integral of f g dm over a dyadic cell.
double innerProductOver(const BasisFunction& f, const BasisFunction& g, const CellKey& region,
                        const ReferenceMeasure& measure);

// Exact integral of f dm over a dyadic cell.
double integralOver(const BasisFunction& f, const CellKey& region, const ReferenceMeasure& measure);

// |f|^2 dm as a probability on the pieces of f; within a piece the
// distribution is m restricted and normalised.
struct MarkPiece {
  Box box;
  double probability = 0.0;
  double density = 0.0;  // |f|^2 w.r.t. m on this piece
};
std::vector<MarkPiece> markDensity(const BasisFunction& f);

// The truncated level-l basis {f_{l,i} : rank(i) <= R} on a window, together
// with its representation on the finest partition Delta(l + R - 1).
class TruncatedBasis {
 public:
  TruncatedBasis(int level, int rankMax, const Window& window, const ReferenceMeasure& measure);

  int level() const { return level_; }
  int rankMax() const { return rankMax_; }
  const Window& window() const { return finest_.window(); }
  const ReferenceMeasure& measure() const { return finest_.measure(); }
  int dimension() const { return finest_.window().dim; }

  const std::vector<BasisFunction>& functions() const { return functions_; }
  const BasisFunction& operator[](std::size_t k) const { return functions_[k]; }
  std::size_t size() const { return functions_.size(); }
  std::vector<TreeIndex> indices() const;
  std::optional<std::size_t> position(const TreeIndex& index) const;

  const Partition& finestPartition() const { return finest_; }
  // Column k holds the values of f_k on the finest cells.
  const Eigen::SparseMatrix<double>& finestCoefficients() const { return coefficients_; }
  // (function position, value) for every function nonzero on a finest cell.
  std::span<const std::pair<std::size_t, double>> functionsOnCell(std::size_t cell) const {
    return onCell_[cell];
  }

  // Positions of the functions whose support lies inside a dyadic cell of
  // level >= l (the set of indices supported in A).
  std::vector<std::size_t> supportedIn(const CellKey& region) const;

 private:
  int level_;
  int rankMax_;
  Partition finest_;
  std::vector<BasisFunction> functions_;
  Eigen::SparseMatrix<double> coefficients_;
  std::vector<std::vector<std::pair<std::size_t, double>>> onCell_;
};

struct SigmaFieldReport {
  std::size_t functionCount = 0;
  std::size_t cellCount = 0;
  double conditionNumber = 0.0;
  bool spansEqual = false;
};

// Checks span{f_{l,i} : rank <= r} = span{indicators of Delta(l + r - 1)} on
// the window: equal dimension and an invertible change of basis.
SigmaFieldReport sigmaFieldCheck(int level, int rank, const Window& window,
                                 const ReferenceMeasure& measure);

}  // namespace treedpp
