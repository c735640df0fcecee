#include <cmath>
#include <set>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "treedpp/errors.hpp"
#include "treedpp/partition.hpp"
#include "treedpp/rng.hpp"

using namespace treedpp;

TEST(Window, ParsesOneAndTwoDimensions) {
  const auto w = parseWindow("-1..3");
  EXPECT_EQ(w.dim, 1);
  EXPECT_EQ(w.x0, -1);
  EXPECT_EQ(w.x1, 3);
  EXPECT_EQ(w.rootCount(), 4);
  EXPECT_EQ(w.toString(), "-1..3");

  const auto w2 = parseWindow("-2..2,0..1");
  EXPECT_EQ(w2.dim, 2);
  EXPECT_EQ(w2.rootCount(), 4);
  EXPECT_EQ(w2.toString(), "-2..2,0..1");
}

TEST(Window, RejectsMalformedText) {
  EXPECT_THROW(parseWindow("1..1"), std::invalid_argument);
  EXPECT_THROW(parseWindow("a..b"), std::invalid_argument);
  EXPECT_THROW(parseWindow("0..1,2"), std::invalid_argument);
  EXPECT_THROW(parseWindow(""), std::invalid_argument);
}

TEST(CellKey, BoxesHalveAlongAlternatingAxes) {
  const CellKey root{{0, 0}, 0, 0};
  const Box b1 = cellBox(root.child(1), 2);
  EXPECT_DOUBLE_EQ(b1.lo[0], 0.5);
  EXPECT_DOUBLE_EQ(b1.hi[0], 1.0);
  EXPECT_DOUBLE_EQ(b1.lo[1], 0.0);
  EXPECT_DOUBLE_EQ(b1.hi[1], 1.0);
  const Box b2 = cellBox(root.child(1).child(0), 2);
  EXPECT_DOUBLE_EQ(b2.lo[1], 0.0);
  EXPECT_DOUBLE_EQ(b2.hi[1], 0.5);

  const Box one = cellBox(CellKey{{-2, 0}, 0b011, 3}, 1);
  EXPECT_DOUBLE_EQ(one.lo[0], -2.0 + 3.0 / 8.0);
  EXPECT_DOUBLE_EQ(one.hi[0], -2.0 + 4.0 / 8.0);
}

TEST(CellKey, IntersectionIsTheFinerCellOrEmpty) {
  const CellKey a{{0, 0}, 0b1, 1};
  const CellKey b{{0, 0}, 0b101, 3};
  const CellKey c{{0, 0}, 0b001, 3};
  EXPECT_EQ(intersect(a, b), b);
  EXPECT_EQ(intersect(b, a), b);
  EXPECT_FALSE(intersect(a, c).has_value());
  EXPECT_FALSE(intersect(a, CellKey{{1, 0}, 0b1, 1}).has_value());
}

TEST(TreeIndex, LabelsRoundTrip) {
  for (const std::string label : {"0:", "-3:0110", "2:1"}) {
    const auto i = parseTreeIndex(label, 1, 1);
    EXPECT_EQ(i.label(1), label);
  }
  const auto j = parseTreeIndex("-1,2:10", 2, 2);
  EXPECT_EQ(j.label(2), "-1,2:10");
  EXPECT_EQ(j.rank(), 2);
  EXPECT_THROW(parseTreeIndex("0:12", 1, 1), std::invalid_argument);
  EXPECT_THROW(parseTreeIndex("0:1", 3, 1), std::invalid_argument);
}

TEST(TreeIndex, RankSupportAndBasisMembership) {
  const auto cell = parseTreeIndex("0:01", 3, 1);
  EXPECT_EQ(cell.rank(), 1);
  EXPECT_TRUE(cell.inBasisSet());
  EXPECT_EQ(cell.supportCell(), cell.key());

  const auto haar = parseTreeIndex("0:0110", 3, 1);
  EXPECT_EQ(haar.rank(), 3);
  EXPECT_TRUE(haar.inBasisSet());
  EXPECT_EQ(haar.supportCell(), parseTreeIndex("0:011", 3, 1).key());
  EXPECT_EQ(haar.rootBlock(), cell.key());
  EXPECT_FALSE(parseTreeIndex("0:0111", 3, 1).inBasisSet());
}

TEST(TreeIndex, ShiftIsInvertible) {
  const auto i = parseTreeIndex("1:01100", 1, 1);
  ASSERT_GE(i.rank(), 3);
  const auto shifted = shiftIndex(i, 3);
  EXPECT_EQ(shifted.level(), 3);
  EXPECT_EQ(shifted.key(), i.key());
  EXPECT_EQ(shifted.rank(), i.rank() - 2);
  EXPECT_EQ(shiftIndexInverse(shifted), i);
}

TEST(TreeIndex, CanonicalOrderGroupsByLevelCellThenRank) {
  const auto a = parseTreeIndex("0:0", 2, 1);     // rank 1
  const auto b = parseTreeIndex("0:00", 2, 1);    // rank 2 in the same block
  const auto c = parseTreeIndex("0:010", 2, 1);   // rank 3 in the same block
  const auto d = parseTreeIndex("0:1", 2, 1);     // next block
  const auto e = parseTreeIndex("1:0", 2, 1);     // next root
  EXPECT_TRUE(canonicalCompare(a, b) < 0);
  EXPECT_TRUE(canonicalCompare(b, c) < 0);
  EXPECT_TRUE(canonicalCompare(c, d) < 0);
  EXPECT_TRUE(canonicalCompare(d, e) < 0);
}

TEST(Partition, LevelThreeOnTwoUnitsHasEightCells) {
  const auto p = Partition::atLevel(parseWindow("-1..1"), ReferenceMeasure(), 3);
  ASSERT_EQ(p.size(), 8U);
  double total = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    EXPECT_DOUBLE_EQ(p.cells()[k].mass, 0.25);
    EXPECT_DOUBLE_EQ(p.cells()[k].box.lo[0], -1.0 + 0.25 * double(k));
    total += p.cells()[k].mass;
  }
  EXPECT_DOUBLE_EQ(total, 2.0);
}

TEST(Partition, RefinementSplitsEveryCellInTwo) {
  const auto w = parseWindow("0..2,-1..1");
  const ReferenceMeasure m(MeasureKind::GaussianPlane);
  const auto coarse = Partition::atLevel(w, m, 2);
  const auto fine = refine(coarse);
  ASSERT_EQ(fine.size(), 2 * coarse.size());
  for (std::size_t k = 0; k < coarse.size(); ++k) {
    const auto& parent = coarse.cells()[k];
    double children = 0.0;
    for (const auto& c : fine.cells()) {
      if (c.key.isWithin(parent.key)) children += c.mass;
    }
    EXPECT_NEAR(children, parent.mass, 1e-15);
  }
}

TEST(Partition, LocateFindsTheContainingCell) {
  const auto p = Partition::atLevel(parseWindow("-2..2,-2..2"), ReferenceMeasure(MeasureKind::GaussianPlane), 3);
  Pcg32 rng(5);
  for (int k = 0; k < 200; ++k) {
    const Point x{-2.0 + 4.0 * rng.uniform(), -2.0 + 4.0 * rng.uniform()};
    const auto pos = p.locate(x);
    ASSERT_TRUE(pos.has_value());
    EXPECT_TRUE(p.cells()[*pos].box.contains(x));
  }
  EXPECT_FALSE(p.locate({2.0, 0.0}).has_value());
  EXPECT_EQ(p.position(p.cells()[17].key), 17U);
}

TEST(Partition, GaussianCellMassesMatchAdaptiveQuadrature) {
  const ReferenceMeasure m(MeasureKind::GaussianPlane);
  const auto p = Partition::atLevel(parseWindow("-2..2,-2..2"), m, 4);
  auto axis = [](double lo, double hi) {
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [](double t) { return std::exp(-t * t) / std::sqrt(M_PI); }, lo, hi, 10, 1e-14);
  };
  double total = 0.0;
  for (const auto& c : p.cells()) {
    const double expected = axis(c.box.lo[0], c.box.hi[0]) * axis(c.box.lo[1], c.box.hi[1]);
    EXPECT_NEAR(c.mass, expected, 1e-14 + 1e-12 * expected);
    total += c.mass;
  }
  EXPECT_NEAR(total, std::erf(2.0) * std::erf(2.0), 1e-13);
}

TEST(Partition, ZeroMassCellIsAnError) {
  // The Gaussian axis mass of [40, 41) underflows to zero.
  const Window far{2, 40, 41, 0, 1};
  EXPECT_THROW(Partition::atLevel(far, ReferenceMeasure(MeasureKind::GaussianPlane), 1), PartitionError);
}

TEST(Partition, HalfLineRejectsNegativeWindows) {
  EXPECT_THROW(Partition::atLevel(parseWindow("-1..1"), ReferenceMeasure(MeasureKind::LebesgueHalfLine), 1),
               PartitionError);
  EXPECT_THROW(Partition::atLevel(parseWindow("0..1"), ReferenceMeasure(MeasureKind::GaussianPlane), 1),
               std::invalid_argument);
}

TEST(TruncatedIndexSet, SizeIsCellsTimesTwoToTheRankMinusOne) {
  for (int level = 1; level <= 3; ++level) {
    for (int r = 1; r <= 5; ++r) {
      const auto set = truncatedIndexSet(level, r, parseWindow("-2..2"));
      EXPECT_EQ(set.size(), std::size_t(4) << (level - 1 + r - 1));
      std::set<std::string> labels;
      for (const auto& i : set) {
        EXPECT_TRUE(i.inBasisSet());
        EXPECT_LE(i.rank(), r);
        labels.insert(i.label(1));
      }
      EXPECT_EQ(labels.size(), set.size());
      for (std::size_t k = 1; k < set.size(); ++k) EXPECT_TRUE(canonicalCompare(set[k - 1], set[k]) < 0);
    }
  }
}
