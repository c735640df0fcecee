#include "treedpp/basis.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include <Eigen/Dense>

#include "treedpp/errors.hpp"

namespace treedpp {

double BasisFunction::value(const Point& p) const {
  for (const auto& piece : pieces_) {
    if (piece.box.contains(p)) return piece.coefficient;
  }
  return 0.0;
}

double BasisFunction::value(const CellKey& finerCell) const {
  for (const auto& piece : pieces_) {
    if (finerCell.isWithin(piece.cell)) return piece.coefficient;
  }
  return 0.0;
}

std::pair<double, double> haarCoefficients(double m0, double m1) {
  if (!(m0 > 0.0) || !(m1 > 0.0)) throw PartitionError("Haar split of a zero-mass cell");
  const double total = m0 + m1;
  return {std::sqrt(m1 / (m0 * total)), std::sqrt(m0 / (m1 * total))};
}

BasisFunction buildBasisFunction(const TreeIndex& index, const ReferenceMeasure& measure) {
  if (!index.inBasisSet()) {
    throw std::invalid_argument("index " + index.label(measure.dimension()) +
                                " is not in the basis index set (last bit must be 0)");
  }
  const int dim = measure.dimension();
  const CellKey support = index.supportCell();
  auto makePiece = [&](const CellKey& cell) {
    BasisPiece p;
    p.cell = cell;
    p.box = cellBox(cell, dim);
    p.mass = measure.cellMass(p.box);
    if (!(p.mass > 0.0)) throw PartitionError("basis cell with zero reference mass");
    return p;
  };
  std::vector<BasisPiece> pieces;
  if (index.rank() == 1) {
    pieces.push_back(makePiece(support));
    pieces[0].coefficient = 1.0 / std::sqrt(pieces[0].mass);
  } else {
    pieces.push_back(makePiece(support.child(0)));
    pieces.push_back(makePiece(support.child(1)));
    const auto [a, b] = haarCoefficients(pieces[0].mass, pieces[1].mass);
    pieces[0].coefficient = a;
    pieces[1].coefficient = -b;
  }
  return BasisFunction(index, support, std::move(pieces));
}

double innerProduct(const BasisFunction& f, const BasisFunction& g) {
  double sum = 0.0;
  for (const auto& p : f.pieces()) {
    for (const auto& q : g.pieces()) {
      if (p.cell.isWithin(q.cell)) {
        sum += p.coefficient * q.coefficient * p.mass;
      } else if (q.cell.isWithin(p.cell)) {
        sum += p.coefficient * q.coefficient * q.mass;
      }
    }
  }
  return sum;
}

double innerProductOver(const BasisFunction& f, const BasisFunction& g, const CellKey& region,
                        const ReferenceMeasure& measure) {
  double sum = 0.0;
  for (const auto& p : f.pieces()) {
    for (const auto& q : g.pieces()) {
      const auto pq = intersect(p.cell, q.cell);
      if (!pq) continue;
      const auto cell = intersect(*pq, region);
      if (!cell) continue;
      const double mass = (*cell == p.cell)   ? p.mass
                          : (*cell == q.cell) ? q.mass
                                              : measure.cellMass(cellBox(*cell, measure.dimension()));
      sum += p.coefficient * q.coefficient * mass;
    }
  }
  return sum;
}

double integralOver(const BasisFunction& f, const CellKey& region, const ReferenceMeasure& measure) {
  double sum = 0.0;
  for (const auto& p : f.pieces()) {
    if (p.cell.isWithin(region)) {
      sum += p.coefficient * p.mass;
    } else if (region.isWithin(p.cell)) {
      sum += p.coefficient * measure.cellMass(cellBox(region, measure.dimension()));
    }
  }
  return sum;
}

std::vector<MarkPiece> markDensity(const BasisFunction& f) {
  std::vector<MarkPiece> out;
  for (const auto& p : f.pieces()) {
    const double d = p.coefficient * p.coefficient;
    out.push_back({p.box, d * p.mass, d});
  }
  return out;
}

TruncatedBasis::TruncatedBasis(int level, int rankMax, const Window& window,
                               const ReferenceMeasure& measure)
    : level_(level),
      rankMax_(rankMax),
      finest_(Partition::atLevel(window, measure, level + rankMax - 1)) {
  const auto idx = truncatedIndexSet(level, rankMax, window);
  functions_.reserve(idx.size());
  for (const auto& i : idx) functions_.push_back(buildBasisFunction(i, measure));

  const int finestDepth = finest_.level() - 1;
  onCell_.assign(finest_.size(), {});
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t k = 0; k < functions_.size(); ++k) {
    for (const auto& piece : functions_[k].pieces()) {
      const int spread = finestDepth - piece.cell.depth;
      const std::size_t first = finest_.position(
          CellKey{piece.cell.root, piece.cell.path << spread, finestDepth});
      for (std::size_t a = first; a < first + (std::size_t(1) << spread); ++a) {
        triplets.emplace_back(int(a), int(k), piece.coefficient);
        onCell_[a].emplace_back(k, piece.coefficient);
      }
    }
  }
  coefficients_.resize(Eigen::Index(finest_.size()), Eigen::Index(functions_.size()));
  coefficients_.setFromTriplets(triplets.begin(), triplets.end());
}

std::vector<TreeIndex> TruncatedBasis::indices() const {
  std::vector<TreeIndex> out;
  out.reserve(functions_.size());
  for (const auto& f : functions_) out.push_back(f.index());
  return out;
}

std::optional<std::size_t> TruncatedBasis::position(const TreeIndex& index) const {
  if (index.level() != level_) return std::nullopt;
  // Functions are stored in canonical order.
  auto it = std::lower_bound(functions_.begin(), functions_.end(), index,
                             [](const BasisFunction& f, const TreeIndex& i) {
                               return canonicalCompare(f.index(), i) < 0;
                             });
  if (it == functions_.end() || !(it->index() == index)) return std::nullopt;
  return std::size_t(it - functions_.begin());
}

std::vector<std::size_t> TruncatedBasis::supportedIn(const CellKey& region) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < functions_.size(); ++k) {
    if (functions_[k].support().isWithin(region)) out.push_back(k);
  }
  return out;
}

SigmaFieldReport sigmaFieldCheck(int level, int rank, const Window& window,
                                 const ReferenceMeasure& measure) {
  const TruncatedBasis basis(level, rank, window, measure);
  SigmaFieldReport report;
  report.functionCount = basis.size();
  report.cellCount = basis.finestPartition().size();
  if (report.functionCount != report.cellCount) return report;
  const Eigen::MatrixXd change = Eigen::MatrixXd(basis.finestCoefficients());
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(change);
  const auto& s = svd.singularValues();
  report.conditionNumber = s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1)
                                                 : std::numeric_limits<double>::infinity();
  report.spansEqual = std::isfinite(report.conditionNumber);
  return report;
}

}  // namespace treedpp
