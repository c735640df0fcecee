#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "treedpp/errors.hpp"
#include "treedpp/lift.hpp"
#include "treedpp/verify.hpp"

using namespace treedpp;

namespace {

ContinuousKernel fixture() {
  return buildFiniteRankKernel({parseTreeIndex("0:0", 1, 1), parseTreeIndex("0:00", 1, 1)}, 1, ReferenceMeasure());
}

}  // namespace

TEST(TreeRepresentation, MarksLieInTheirSupportCells) {
  const auto k = ContinuousKernel::sine();
  const TreeRepresentation rep(k, 2, 3, parseWindow("-1..1"), {});
  std::size_t points = 0;
  for (const auto& s : rep.sampleMany(3, 300, 2)) {
    for (const auto& p : s.pairs) {
      EXPECT_EQ(rep.basis()[p.position].index(), p.index);
      EXPECT_TRUE(cellBox(p.index.supportCell(), 1).contains(p.point));
      ++points;
    }
  }
  EXPECT_GT(points, 0U);
}

TEST(TreeRepresentation, GinibreMarksStayInTheWindow) {
  const auto k = ContinuousKernel::ginibre();
  const TreeRepresentation rep(k, 1, 2, parseWindow("-1..1,-1..1"), {});
  const auto cells = Partition::atLevel(parseWindow("-1..1,-1..1"), k.measure(), 1);
  for (const auto& s : rep.sampleMany(1, 100, 1)) EXPECT_NO_THROW(cellCounts(unlabel(s), cells));
}

TEST(TreeRepresentation, SampleSizeHasTheProjectedTraceAsMean) {
  const auto k = ContinuousKernel::sine();
  const TreeRepresentation rep(k, 1, 4, parseWindow("0..4"), {});
  const std::size_t draws = 4000;
  double sum = 0.0, sq = 0.0;
  for (const auto& s : rep.sampleMany(12, draws, 1)) {
    sum += double(s.pairs.size());
    sq += double(s.pairs.size() * s.pairs.size());
  }
  const double mean = sum / double(draws);
  const double sd = std::sqrt(sq / double(draws) - mean * mean);
  EXPECT_NEAR(mean, rep.projected().matrix.trace().real(), 4.0 * sd / std::sqrt(double(draws)));
}

TEST(CellCounts, CountsAndCoarsens) {
  const auto w = parseWindow("0..2");
  const ReferenceMeasure m;
  const auto fine = Partition::atLevel(w, m, 3);
  const auto coarse = Partition::atLevel(w, m, 1);
  const PointConfiguration config = {{0.1, 0}, {0.2, 0}, {0.9, 0}, {1.6, 0}, {1.6, 0}};
  const auto counts = cellCounts(config, fine);
  EXPECT_EQ(counts, (CountVector{2, 0, 0, 1, 0, 0, 2, 0}));
  EXPECT_EQ(coarsenCounts(counts, fine, coarse), (CountVector{3, 2}));
  EXPECT_THROW(cellCounts({{2.5, 0}}, fine), std::out_of_range);
  EXPECT_THROW(coarsenCounts(counts, coarse, fine), std::invalid_argument);
}

TEST(ChiSquare, IdenticalSamplesGiveNoEvidence) {
  const auto r = twoSampleChiSquare({{400, 400}, {300, 300}, {300, 300}});
  EXPECT_EQ(r.degreesOfFreedom, 2);
  EXPECT_NEAR(r.statistic, 0.0, 1e-12);
  EXPECT_NEAR(r.pValue, 1.0, 1e-12);
  const auto far = twoSampleChiSquare({{900, 100}, {100, 900}});
  EXPECT_LT(far.pValue, 1e-10);
}

TEST(ExactCountLaw, FixtureLawIsAProbabilityOnTwoPoints) {
  const auto k = fixture();
  const TreeRepresentation rep(k, 2, 3, parseWindow("0..1"), {});
  const auto law = exactCountLaw(rep);
  double total = 0.0;
  for (const auto& [counts, p] : law) {
    total += p;
    // The kernel is a rank-two projection: every configuration has two points.
    if (p > 1e-12) EXPECT_EQ(std::accumulate(counts.begin(), counts.end(), 0), 2);
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Consistency, FixtureAgreesAcrossLevels) {
  ConsistencyOptions o;
  o.level = 2;
  o.otherLevel = 3;
  o.rankMax = 3;
  o.window = parseWindow("0..1");
  o.draws = 20000;
  o.seed = 5;
  const auto r = consistencyExperiment(fixture(), o);
  EXPECT_TRUE(r.exactAvailable);
  EXPECT_NEAR(r.traceA, 2.0, 1e-12);
  EXPECT_NEAR(r.traceB, 2.0, 1e-12);
  EXPECT_TRUE(consistencyPasses(r)) << toJson(r).dump(2);
  const auto csv = outcomeTableCsv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "counts,count_a,count_b,freq_a,freq_b,sigma,within_band,exact,within_exact");
}

TEST(Consistency, RejectsNonIncreasingLevels) {
  ConsistencyOptions o;
  o.level = 2;
  o.otherLevel = 2;
  o.window = parseWindow("0..1");
  EXPECT_THROW(consistencyExperiment(fixture(), o), std::invalid_argument);
}
