#include <cmath>

#include <gtest/gtest.h>

#include "treedpp/basis.hpp"
#include "treedpp/errors.hpp"
#include "treedpp/lift.hpp"
#include "treedpp/verify.hpp"

using namespace treedpp;

namespace {

struct Setting {
  const char* window;
  MeasureKind measure;
};

const Setting kSettings[] = {
    {"-2..2", MeasureKind::Lebesgue1D},
    {"0..3", MeasureKind::LebesgueHalfLine},
    {"-1..1,-1..1", MeasureKind::GaussianPlane},
};

}  // namespace

TEST(Haar, CoefficientsAreMeanZeroAndUnitNorm) {
  for (auto [m0, m1] : {std::pair{0.5, 0.5}, std::pair{0.1, 0.7}, std::pair{1e-6, 0.3}}) {
    const auto [a, b] = haarCoefficients(m0, m1);
    EXPECT_NEAR(a * m0, b * m1, 1e-15 * (a * m0));
    EXPECT_NEAR(a * a * m0 + b * b * m1, 1.0, 1e-14);
  }
  EXPECT_THROW(haarCoefficients(0.0, 1.0), PartitionError);
}

TEST(BasisFunction, RankOneIsANormalisedIndicator) {
  const ReferenceMeasure m(MeasureKind::GaussianPlane);
  const auto f = buildBasisFunction(parseTreeIndex("0,-1:1", 2, 2), m);
  ASSERT_EQ(f.pieces().size(), 1U);
  const auto& piece = f.pieces().front();
  EXPECT_NEAR(piece.coefficient * piece.coefficient * piece.mass, 1.0, 1e-14);
  EXPECT_DOUBLE_EQ(f.value(Point{0.75, -0.5}), piece.coefficient);
  EXPECT_DOUBLE_EQ(f.value(Point{0.25, -0.5}), 0.0);
}

TEST(BasisFunction, RejectsIndicesOutsideTheBasisSet) {
  EXPECT_THROW(buildBasisFunction(parseTreeIndex("0:01", 1, 1), ReferenceMeasure()), std::invalid_argument);
}

TEST(BasisFunction, InnerProductsAreExact) {
  for (const auto& s : kSettings) {
    const ReferenceMeasure m(s.measure);
    const TruncatedBasis basis(2, 4, parseWindow(s.window), m);
    for (std::size_t i = 0; i < basis.size(); ++i) {
      for (std::size_t j = 0; j < basis.size(); ++j) {
        EXPECT_NEAR(innerProduct(basis[i], basis[j]), i == j ? 1.0 : 0.0, 1e-12)
            << basis[i].index().label(m.dimension()) << " vs " << basis[j].index().label(m.dimension());
      }
    }
  }
}

TEST(TruncatedBasis, FinestCoefficientsReproduceFunctionValues) {
  const ReferenceMeasure m(MeasureKind::LebesgueHalfLine);
  const TruncatedBasis basis(2, 3, parseWindow("0..2"), m);
  const auto& u = basis.finestCoefficients();
  const auto& cells = basis.finestPartition();
  ASSERT_EQ(std::size_t(u.cols()), basis.size());
  ASSERT_EQ(std::size_t(u.rows()), cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& box = cells.cells()[c].box;
    const Point mid{0.5 * (box.lo[0] + box.hi[0]), 0.0};
    for (std::size_t k = 0; k < basis.size(); ++k) {
      EXPECT_DOUBLE_EQ(u.coeff(Eigen::Index(c), Eigen::Index(k)), basis[k].value(mid));
    }
  }
  // U^T diag(m) U = I.
  Eigen::VectorXd mass(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) mass(Eigen::Index(c)) = cells.cells()[c].mass;
  const Eigen::MatrixXd gram = Eigen::MatrixXd(u).transpose() * mass.asDiagonal() * Eigen::MatrixXd(u);
  EXPECT_LT((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(TruncatedBasis, SupportedInCollectsTheCellSubtree) {
  const TruncatedBasis basis(2, 3, parseWindow("0..2"), ReferenceMeasure());
  const auto cell = parseTreeIndex("1:0", 2, 1).key();
  const auto inside = basis.supportedIn(cell);
  EXPECT_EQ(inside.size(), 4U);  // rank 1, one rank 2, two rank 3
  for (auto k : inside) EXPECT_TRUE(basis[k].support().isWithin(cell));
  EXPECT_EQ(basis.position(basis[inside.front()].index()), inside.front());
}

TEST(SigmaField, TruncatedSpanEqualsFinestIndicators) {
  for (const auto& s : kSettings) {
    const ReferenceMeasure m(s.measure);
    for (int level = 1; level <= 2; ++level) {
      for (int rank = 1; rank <= 3; ++rank) {
        const auto r = sigmaFieldCheck(level, rank, parseWindow(s.window), m);
        EXPECT_TRUE(r.spansEqual) << s.window << " level " << level << " rank " << rank;
        EXPECT_EQ(r.functionCount, r.cellCount);
        EXPECT_LT(r.conditionNumber, 1e6);
      }
    }
  }
}

TEST(Orthogonality, SweepReturnsOnlyZeroAndOne) {
  for (const auto& s : kSettings) {
    const ReferenceMeasure m(s.measure);
    const auto sweep = orthogonalitySweep(2, 3, parseWindow(s.window), m);
    EXPECT_EQ(sweep.mismatches, 0U) << s.window;
    EXPECT_LT(sweep.maxError, 1e-12);
    EXPECT_GT(sweep.triples, 0U);
  }
}

TEST(Orthogonality, SingleTripleFollowsTheSupportCondition) {
  const ReferenceMeasure m;
  const int level = 2;
  const auto i = parseTreeIndex("0:100", level, 1);
  const auto j = parseTreeIndex("0:10", level, 1);
  const auto inside = parseTreeIndex("0:1", level, 1).key();
  const auto outside = parseTreeIndex("0:0", level, 1).key();
  EXPECT_NEAR(orthogonalityIntegral(level, i, i, inside, m), 1.0, 1e-15);
  EXPECT_NEAR(orthogonalityIntegral(level, i, i, outside, m), 0.0, 1e-15);
  EXPECT_NEAR(orthogonalityIntegral(level, i, j, inside, m), 0.0, 1e-15);
  EXPECT_THROW(orthogonalityIntegral(level, i, i, parseTreeIndex("0:10", 3, 1).key(), m), std::invalid_argument);
}

TEST(MarkDensity, IsAProbabilityOnThePieces) {
  const ReferenceMeasure m(MeasureKind::GaussianPlane);
  const auto f = buildBasisFunction(parseTreeIndex("1,0:0110", 2, 2), m);
  const auto pieces = markDensity(f);
  ASSERT_EQ(pieces.size(), 2U);
  double total = 0.0;
  for (const auto& p : pieces) {
    total += p.probability;
    EXPECT_NEAR(p.probability, p.density * m.cellMass(p.box), 1e-14);
  }
  EXPECT_NEAR(total, 1.0, 1e-14);
}

TEST(MarkDensity, SampledMarksFollowThePieceProbabilities) {
  const ReferenceMeasure m(MeasureKind::LebesgueHalfLine);
  const auto f = buildBasisFunction(parseTreeIndex("0:0", 1, 1), m);
  const auto pieces = markDensity(f);
  Pcg32 rng(11);
  const int n = 40000;
  int first = 0;
  for (int k = 0; k < n; ++k) {
    const Point p = sampleMark(f, m, rng);
    ASSERT_TRUE(cellBox(f.support(), 1).contains(p));
    if (pieces[0].box.contains(p)) ++first;
  }
  const double p0 = pieces[0].probability;
  EXPECT_NEAR(double(first) / n, p0, 4.0 * std::sqrt(p0 * (1 - p0) / n));
}
