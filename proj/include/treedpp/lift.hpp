#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "treedpp/basis.hpp"
#include "treedpp/dpp.hpp"
#include "treedpp/kernels.hpp"
#include "treedpp/projection.hpp"
#include "treedpp/rng.hpp"

namespace treedpp {

struct LiftedPoint {
  std::size_t position = 0;  // into the truncated index set
  TreeIndex index;
  Point point;
};

// A configuration on the lift space: one mark per selected index, the mark
// lying in the index's support cell.
struct LiftedSample {
  std::vector<LiftedPoint> pairs;
};

// Multiset of points of S.
using PointConfiguration = std::vector<Point>;

// Draws a point from |f|^2 dm: a piece with its probability, then m
// restricted to the piece by per-axis inverse CDF.
Point sampleMark(const BasisFunction& f, const ReferenceMeasure& measure, Pcg32& rng);

// The level-l tree representation: truncated basis, projected kernel and its
// discrete DPP.
class TreeRepresentation {
 public:
  TreeRepresentation(const ContinuousKernel& kernel, int level, int rankMax, const Window& window,
                     const ProjectionOptions& options);
  TreeRepresentation(TruncatedBasis basis, ProjectedKernel projected);

  const TruncatedBasis& basis() const { return basis_; }
  const ProjectedKernel& projected() const { return projected_; }
  const DiscreteDPP& dpp() const { return dpp_; }
  int level() const { return basis_.level(); }

  LiftedSample sample(Pcg32& rng) const;
  // Draw r uses Pcg32(seed, streamOffset + r).
  std::vector<LiftedSample> sampleMany(std::uint64_t seed, std::size_t draws, int threads,
                                       std::uint64_t streamOffset = 0) const;

 private:
  TruncatedBasis basis_;
  ProjectedKernel projected_;
  DiscreteDPP dpp_;
};

PointConfiguration unlabel(const LiftedSample& sample);

// Points per cell of the partition; a point outside the window is an error.
CountVector cellCounts(const PointConfiguration& config, const Partition& partition);

// Level-l counts as a function of level-l' counts (l <= l'): children are
// summed along the nesting map.
CountVector coarsenCounts(const CountVector& fine, const Partition& finePartition,
                          const Partition& coarsePartition);

struct ConsistencyOptions {
  int level = 1;
  int otherLevel = 2;
  int rankMax = 4;
  Window window;
  std::size_t draws = 100000;
  std::uint64_t seed = 1;
  ProjectionOptions projection;
  int threads = 1;
};

struct OutcomeRow {
  CountVector counts;
  std::size_t countA = 0, countB = 0;
  double freqA = 0.0, freqB = 0.0;
  double sigma = 0.0;  // pooled binomial sd of freqA - freqB
  bool withinBand = true;
  std::optional<double> exact;
  bool withinExact = true;  // both frequencies within 3 sd of the exact value
};

struct ConsistencyReport {
  int level = 1, otherLevel = 2, rankMax = 1;
  std::size_t draws = 0;
  std::vector<OutcomeRow> outcomes;
  double chiSquare = 0.0;
  int degreesOfFreedom = 0;
  double pValue = 1.0;
  std::size_t bandViolations = 0;
  bool exactAvailable = false;
  std::size_t exactViolations = 0;
  // Truncation budget: expected point counts of the two projected kernels.
  double traceA = 0.0, traceB = 0.0;
  double quadratureErrorA = 0.0, quadratureErrorB = 0.0;
};

// Samples the lift at `level` and at `otherLevel`, compares the level-`level`
// cell-count laws, and for finite-rank kernels with a small index set also
// compares both against the exact law of the projected DPP.
ConsistencyReport consistencyExperiment(const ContinuousKernel& kernel, const ConsistencyOptions& options);

// Two-sample chi-square over shared outcomes, merging outcomes whose pooled
// expected count is below 5 into one bin. Returns (statistic, df, p-value).
struct ChiSquareResult {
  double statistic = 0.0;
  int degreesOfFreedom = 0;
  double pValue = 1.0;
};
ChiSquareResult twoSampleChiSquare(const std::vector<std::pair<std::size_t, std::size_t>>& counts);

// Exact law of the per-cell counts of the level-l representation, from the
// enumeration oracle; requires at most 20 indices.
std::map<CountVector, double> exactCountLaw(const TreeRepresentation& rep);

}  // namespace treedpp
