#include "treedpp/lift.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

#include "treedpp/errors.hpp"
#include "treedpp/parallel.hpp"

namespace treedpp {

Point sampleMark(const BasisFunction& f, const ReferenceMeasure& measure, Pcg32& rng) {
  const auto pieces = markDensity(f);
  std::size_t k = 0;
  if (pieces.size() == 2 && rng.uniform() >= pieces[0].probability) k = 1;
  const Box& box = pieces[k].box;
  Point p;
  p.x = measure.axisQuantile(box.lo[0], box.hi[0], rng.uniform());
  if (box.dim == 2) p.y = measure.axisQuantile(box.lo[1], box.hi[1], rng.uniform());
  return p;
}

TreeRepresentation::TreeRepresentation(const ContinuousKernel& kernel, int level, int rankMax,
                                       const Window& window, const ProjectionOptions& options)
    : basis_(level, rankMax, window, kernel.measure()),
      projected_(projectKernel(kernel, basis_, options)),
      dpp_(projected_) {}

namespace {
const ProjectedKernel& checkedSizes(const TruncatedBasis& basis, const ProjectedKernel& projected) {
  if (projected.size() != basis.size()) {
    throw std::invalid_argument("projected kernel has " + std::to_string(projected.size()) +
                                " indices, basis has " + std::to_string(basis.size()));
  }
  return projected;
}
}  // namespace

TreeRepresentation::TreeRepresentation(TruncatedBasis basis, ProjectedKernel projected)
    : basis_(std::move(basis)), projected_(std::move(projected)), dpp_(checkedSizes(basis_, projected_)) {}

LiftedSample TreeRepresentation::sample(Pcg32& rng) const {
  LiftedSample out;
  for (auto k : dpp_.sample(rng)) {
    const auto& f = basis_[k];
    const Point p = sampleMark(f, basis_.measure(), rng);
    if (!cellBox(f.support(), basis_.dimension()).contains(p)) {
      throw NumericError("mark for " + f.index().label(basis_.dimension()) + " left its support cell");
    }
    out.pairs.push_back({k, f.index(), p});
  }
  return out;
}

std::vector<LiftedSample> TreeRepresentation::sampleMany(std::uint64_t seed, std::size_t draws,
                                                         int threads, std::uint64_t streamOffset) const {
  std::vector<LiftedSample> out(draws);
  parallelFor(draws, threads, [&](std::size_t r) {
    Pcg32 rng(seed, streamOffset + r);
    out[r] = sample(rng);
  });
  return out;
}

PointConfiguration unlabel(const LiftedSample& sample) {
  PointConfiguration out;
  out.reserve(sample.pairs.size());
  for (const auto& p : sample.pairs) out.push_back(p.point);
  return out;
}

CountVector cellCounts(const PointConfiguration& config, const Partition& partition) {
  CountVector counts(partition.size(), 0);
  for (const auto& p : config) {
    const auto cell = partition.locate(p);
    if (!cell) {
      throw std::out_of_range("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                              ") lies outside the window " + partition.window().toString());
    }
    ++counts[*cell];
  }
  return counts;
}

CountVector coarsenCounts(const CountVector& fine, const Partition& finePartition,
                          const Partition& coarsePartition) {
  if (coarsePartition.level() > finePartition.level()) {
    throw std::invalid_argument("coarsening needs the coarse level to be <= the fine level");
  }
  const int depth = coarsePartition.level() - 1;
  CountVector out(coarsePartition.size(), 0);
  for (std::size_t a = 0; a < finePartition.size(); ++a) {
    out[coarsePartition.position(finePartition.cells()[a].key.ancestor(depth))] += fine[a];
  }
  return out;
}

ChiSquareResult twoSampleChiSquare(const std::vector<std::pair<std::size_t, std::size_t>>& counts) {
  double n1 = 0.0, n2 = 0.0;
  for (const auto& [a, b] : counts) {
    n1 += double(a);
    n2 += double(b);
  }
  ChiSquareResult r;
  if (n1 == 0.0 || n2 == 0.0) return r;
  const double total = n1 + n2;
  // Outcomes with a small pooled expectation go into one merged bin.
  std::vector<std::pair<double, double>> bins;
  std::pair<double, double> merged{0.0, 0.0};
  for (const auto& [a, b] : counts) {
    const double pooled = double(a) + double(b);
    if (std::min(n1, n2) * pooled / total < 5.0) {
      merged.first += double(a);
      merged.second += double(b);
    } else {
      bins.emplace_back(double(a), double(b));
    }
  }
  if (merged.first + merged.second > 0.0) bins.push_back(merged);
  for (const auto& [a, b] : bins) {
    const double pooled = a + b;
    const double e1 = n1 * pooled / total, e2 = n2 * pooled / total;
    r.statistic += (a - e1) * (a - e1) / e1 + (b - e2) * (b - e2) / e2;
  }
  r.degreesOfFreedom = int(bins.size()) - 1;
  if (r.degreesOfFreedom > 0) {
    const boost::math::chi_squared dist(r.degreesOfFreedom);
    r.pValue = boost::math::cdf(boost::math::complement(dist, r.statistic));
  }
  return r;
}

std::map<CountVector, double> exactCountLaw(const TreeRepresentation& rep) {
  const auto& dpp = rep.dpp();
  const auto& basis = rep.basis();
  // Indices with zero diagonal are never selected; drop them before enumerating.
  std::vector<std::size_t> live;
  for (std::size_t k = 0; k < dpp.size(); ++k) {
    if (dpp.kernel()(Eigen::Index(k), Eigen::Index(k)).real() > 1e-12) live.push_back(k);
  }
  if (live.size() > kMaxEnumerationSize) {
    throw std::invalid_argument("exact count law needs at most " + std::to_string(kMaxEnumerationSize) +
                                " live indices, got " + std::to_string(live.size()));
  }
  Eigen::MatrixXcd sub(Eigen::Index(live.size()), Eigen::Index(live.size()));
  for (std::size_t p = 0; p < live.size(); ++p) {
    for (std::size_t q = 0; q < live.size(); ++q) {
      sub(Eigen::Index(p), Eigen::Index(q)) = dpp.kernel()(Eigen::Index(live[p]), Eigen::Index(live[q]));
    }
  }
  const Partition cells = Partition::atLevel(basis.window(), basis.measure(), basis.level());
  std::vector<std::size_t> group;
  for (auto k : live) group.push_back(cells.position(basis[k].index().rootBlock()));
  const auto law = enumerateLaw(DiscreteDPP(sub));
  std::map<CountVector, double> out;
  for (std::uint64_t mask = 0; mask < law.size(); ++mask) {
    if (law[mask] <= 0.0) continue;
    out[groupCounts(maskToSubset(mask), group, cells.size())] += law[mask];
  }
  return out;
}

ConsistencyReport consistencyExperiment(const ContinuousKernel& kernel, const ConsistencyOptions& o) {
  if (o.otherLevel <= o.level) throw std::invalid_argument("consistency needs otherLevel > level");
  if (o.draws == 0) throw std::invalid_argument("consistency needs at least one draw");
  const TreeRepresentation a(kernel, o.level, o.rankMax, o.window, o.projection);
  const TreeRepresentation b(kernel, o.otherLevel, o.rankMax, o.window, o.projection);
  if (kernel.kind() == KernelKind::FiniteRank) {
    const double rank = double(kernel.finiteRankElements().size());
    for (const auto* rep : {&a, &b}) {
      if (std::abs(rep->projected().matrix.trace().real() - rank) > 1e-9) {
        throw std::invalid_argument("truncation at level " + std::to_string(rep->level()) + ", rank " +
                                    std::to_string(o.rankMax) + " does not contain the fixture span");
      }
    }
  }

  ConsistencyReport report;
  report.level = o.level;
  report.otherLevel = o.otherLevel;
  report.rankMax = o.rankMax;
  report.draws = o.draws;
  report.traceA = a.projected().matrix.trace().real();
  report.traceB = b.projected().matrix.trace().real();
  report.quadratureErrorA = a.projected().quadratureError;
  report.quadratureErrorB = b.projected().quadratureError;

  const Partition cells = Partition::atLevel(o.window, kernel.measure(), o.level);
  auto histogram = [&](const TreeRepresentation& rep, std::uint64_t offset) {
    std::map<CountVector, std::size_t> h;
    for (const auto& s : rep.sampleMany(o.seed, o.draws, o.threads, offset)) {
      ++h[cellCounts(unlabel(s), cells)];
    }
    return h;
  };
  const auto ha = histogram(a, 0);
  const auto hb = histogram(b, std::uint64_t(1) << 40U);

  std::map<CountVector, double> exact;
  try {
    if (kernel.kind() == KernelKind::FiniteRank) {
      exact = exactCountLaw(a);
      report.exactAvailable = true;
    }
  } catch (const std::invalid_argument&) {
    report.exactAvailable = false;
  }

  std::map<CountVector, OutcomeRow> rows;
  for (const auto& [c, n] : ha) rows[c].countA = n;
  for (const auto& [c, n] : hb) rows[c].countB = n;
  for (const auto& [c, p] : exact) rows[c];
  const double n = double(o.draws);
  std::vector<std::pair<std::size_t, std::size_t>> paired;
  for (auto& [c, row] : rows) {
    row.counts = c;
    row.freqA = double(row.countA) / n;
    row.freqB = double(row.countB) / n;
    const double pooled = 0.5 * (row.freqA + row.freqB);
    row.sigma = std::sqrt(pooled * (1.0 - pooled) * 2.0 / n);
    row.withinBand = std::abs(row.freqA - row.freqB) <= 3.0 * row.sigma;
    if (!row.withinBand) ++report.bandViolations;
    if (report.exactAvailable) {
      const auto it = exact.find(c);
      const double p = it == exact.end() ? 0.0 : it->second;
      row.exact = p;
      const double sd = std::sqrt(p * (1.0 - p) / n);
      // With p in {0, 1} the frequency must match exactly.
      const double slack = 3.0 * sd + 1e-12;
      row.withinExact = std::abs(row.freqA - p) <= slack && std::abs(row.freqB - p) <= slack;
      if (!row.withinExact) ++report.exactViolations;
    }
    paired.emplace_back(row.countA, row.countB);
    report.outcomes.push_back(row);
  }
  const auto chi = twoSampleChiSquare(paired);
  report.chiSquare = chi.statistic;
  report.degreesOfFreedom = chi.degreesOfFreedom;
  report.pValue = chi.pValue;
  return report;
}

}  // namespace treedpp
