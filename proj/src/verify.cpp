#include "treedpp/verify.hpp"

#include <cmath>
#include <stdexcept>

#include "treedpp/io.hpp"
#include "treedpp/version.hpp"

namespace treedpp {

nlohmann::json toJson(const VerificationReport& r) {
  return {
      {"schema", "treedpp.verification-report"},
      {"schema_version", 1},
      {"generator", kVersionString},
      {"name", r.name},
      {"pass", r.pass},
      {"lhs", {{"value", r.lhs}, {"error", r.lhsError}}},
      {"rhs", {{"value", r.rhs}, {"error", r.rhsError}}},
      {"gap", r.gap()},
      {"budget",
       {{"quadrature", r.budget.quadrature},
        {"truncation", r.budget.truncation},
        {"monte_carlo", r.budget.monteCarlo},
        {"total", r.budget.total()}}},
      {"run",
       {{"kernel", r.kernel},
        {"level", r.level},
        {"rank_max", r.rankMax},
        {"window", r.window},
        {"seed", r.seed},
        {"draws", r.draws}}},
      {"details", r.details},
  };
}

VerificationReport reportFromJson(const nlohmann::json& j) {
  VerificationReport r;
  r.name = j.at("name").get<std::string>();
  r.pass = j.at("pass").get<bool>();
  r.lhs = j.at("lhs").at("value").get<double>();
  r.lhsError = j.at("lhs").at("error").get<double>();
  r.rhs = j.at("rhs").at("value").get<double>();
  r.rhsError = j.at("rhs").at("error").get<double>();
  const auto& b = j.at("budget");
  r.budget = {b.at("quadrature").get<double>(), b.at("truncation").get<double>(),
              b.at("monte_carlo").get<double>()};
  const auto& run = j.at("run");
  r.kernel = run.at("kernel").get<std::string>();
  r.level = run.at("level").get<int>();
  r.rankMax = run.at("rank_max").get<int>();
  r.window = run.at("window").get<std::string>();
  r.seed = run.at("seed").get<std::uint64_t>();
  r.draws = run.at("draws").get<std::size_t>();
  r.details = j.at("details");
  return r;
}

namespace {

void requireLevelCell(const CellKey& c, int level, const char* what) {
  if (c.level() != level) {
    throw std::invalid_argument(std::string(what) + " requires cells of Delta(" + std::to_string(level) +
                                "); got a level-" + std::to_string(c.level()) + " cell");
  }
}

double determinant(const Eigen::MatrixXcd& k, const std::vector<std::size_t>& tuple) {
  const auto m = Eigen::Index(tuple.size());
  Eigen::MatrixXcd sub(m, m);
  for (Eigen::Index p = 0; p < m; ++p) {
    for (Eigen::Index q = 0; q < m; ++q) {
      sub(p, q) = k(Eigen::Index(tuple[std::size_t(p)]), Eigen::Index(tuple[std::size_t(q)]));
    }
  }
  return sub.determinant().real();
}

// Sum of det[K_F] over ordered tuples drawn from the given index sets.
double tupleSum(const Eigen::MatrixXcd& k, const std::vector<std::vector<std::size_t>>& sets) {
  double sum = 0.0;
  std::vector<std::size_t> tuple(sets.size());
  auto recurse = [&](auto&& self, std::size_t depth) -> void {
    if (depth == sets.size()) {
      sum += determinant(k, tuple);
      return;
    }
    for (auto i : sets[depth]) {
      tuple[depth] = i;
      self(self, depth + 1);
    }
  };
  recurse(recurse, 0);
  return sum;
}

nlohmann::json cellLabels(const std::vector<CellKey>& cells, int dim) {
  auto out = nlohmann::json::array();
  for (const auto& c : cells) out.push_back(TreeIndex(c, c.level()).label(dim));
  return out;
}

}  // namespace

VerificationReport correlationIdentity(const ContinuousKernel& kernel, const TreeRepresentation& rep,
                                       const std::vector<CellKey>& cells, const QuadratureOptions& quadrature,
                                       double tolerance) {
  if (cells.empty() || cells.size() > 3) throw std::invalid_argument("correlation identity needs 1 <= m <= 3");
  const auto& basis = rep.basis();
  for (const auto& c : cells) requireLevelCell(c, basis.level(), "correlation identity");

  VerificationReport r;
  r.name = "correlation-identity";
  r.kernel = kernel.name();
  r.level = basis.level();
  r.rankMax = basis.rankMax();
  r.window = basis.window().toString();

  const auto q = integrateCorrelation(kernel, cells, quadrature);
  r.lhs = q.value;
  r.lhsError = q.errorEstimate;

  std::vector<std::vector<std::size_t>> sets;
  for (const auto& c : cells) sets.push_back(basis.supportedIn(c));
  r.rhs = tupleSum(rep.projected().matrix, sets);

  r.budget.quadrature = q.errorEstimate;
  r.budget.truncation = tolerance;
  r.details = {{"m", cells.size()},
               {"cells", cellLabels(cells, basis.dimension())},
               {"quadrature_order", quadrature.order},
               {"projection_quadrature_error", rep.projected().quadratureError}};
  r.decide();
  return r;
}

VerificationReport correlationIdentity(const ContinuousKernel& kernel, int level,
                                       const std::vector<CellKey>& cells, const CorrelationOptions& options) {
  for (const auto& c : cells) requireLevelCell(c, level, "correlation identity");
  const TreeRepresentation rep(kernel, level, options.rankMax, options.window, options.projection);
  return correlationIdentity(kernel, rep, cells, options.quadrature, options.tolerance);
}

double orthogonalityIntegral(int level, const TreeIndex& i, const TreeIndex& j, const CellKey& a,
                             const ReferenceMeasure& measure) {
  requireLevelCell(a, level, "orthogonality integral");
  if (i.level() != level || j.level() != level) {
    throw std::invalid_argument("orthogonality integral: indices must be level-" + std::to_string(level));
  }
  return innerProductOver(buildBasisFunction(i, measure), buildBasisFunction(j, measure), a, measure);
}

OrthogonalitySweep orthogonalitySweep(int level, int rankMax, const Window& window,
                                      const ReferenceMeasure& measure) {
  const TruncatedBasis basis(level, rankMax, window, measure);
  const Partition cells = Partition::atLevel(window, measure, level);
  OrthogonalitySweep s;
  const auto& fs = basis.functions();
  for (const auto& cell : cells.cells()) {
    for (std::size_t i = 0; i < fs.size(); ++i) {
      for (std::size_t j = 0; j < fs.size(); ++j) {
        const double v = innerProductOver(fs[i], fs[j], cell.key, measure);
        const double expected = (i == j && fs[i].support().isWithin(cell.key)) ? 1.0 : 0.0;
        const double e = std::abs(v - expected);
        s.maxError = std::max(s.maxError, e);
        if (e >= 1e-12) ++s.mismatches;
        ++s.triples;
      }
    }
  }
  return s;
}

VerificationReport orthogonalityReport(int level, int rankMax, const Window& window,
                                       const ReferenceMeasure& measure) {
  const auto s = orthogonalitySweep(level, rankMax, window, measure);
  VerificationReport r;
  r.name = "orthogonality";
  r.kernel = "none";
  r.level = level;
  r.rankMax = rankMax;
  r.window = window.toString();
  r.lhs = s.maxError;
  r.rhs = 0.0;
  r.budget.quadrature = 1e-12;
  r.details = {{"triples", s.triples}, {"mismatches", s.mismatches}, {"measure", measure.name()}};
  r.pass = s.mismatches == 0;
  return r;
}

VerificationReport factorialMomentCheck(const ContinuousKernel& kernel, int level,
                                        const std::vector<CellKey>& cells, const std::vector<int>& multiplicity,
                                        const MomentOptions& o) {
  if (cells.empty() || cells.size() != multiplicity.size()) {
    throw std::invalid_argument("factorial moments need one multiplicity per cell");
  }
  std::vector<CellKey> tuple;
  for (std::size_t a = 0; a < cells.size(); ++a) {
    if (cells[a].level() > level) {
      throw std::invalid_argument("factorial moment cells must be unions of level-" + std::to_string(level) +
                                  " cells");
    }
    if (multiplicity[a] < 1) throw std::invalid_argument("multiplicities must be >= 1");
    for (std::size_t b = 0; b < a; ++b) {
      if (intersect(cells[a], cells[b])) throw std::invalid_argument("factorial moment cells overlap");
    }
    for (int k = 0; k < multiplicity[a]; ++k) tuple.push_back(cells[a]);
  }
  if (tuple.size() > 3) throw std::invalid_argument("factorial moments are supported up to order 3");

  const TreeRepresentation rep(kernel, level, o.rankMax, o.window, o.projection);
  const auto q = integrateCorrelation(kernel, tuple, o.quadrature);

  // The sampled side estimates the truncated law; its exact mean is the
  // index-side sum of the correlation identity, which prices the truncation.
  std::vector<std::vector<std::size_t>> sets;
  const Partition levelCells = Partition::atLevel(o.window, kernel.measure(), level);
  for (const auto& c : tuple) {
    std::vector<std::size_t> set;
    for (const auto& cell : levelCells.cells()) {
      if (!cell.key.isWithin(c)) continue;
      const auto inside = rep.basis().supportedIn(cell.key);
      set.insert(set.end(), inside.begin(), inside.end());
    }
    sets.push_back(std::move(set));
  }
  const double indexSide = tupleSum(rep.projected().matrix, sets);

  const Partition& partition = levelCells;
  double sum = 0.0, sumSq = 0.0;
  for (const auto& s : rep.sampleMany(o.seed, o.draws, o.threads)) {
    const auto counts = cellCounts(unlabel(s), partition);
    double value = 1.0;
    for (std::size_t a = 0; a < cells.size(); ++a) {
      int n = 0;
      for (std::size_t c = 0; c < partition.size(); ++c) {
        if (partition.cells()[c].key.isWithin(cells[a])) n += counts[c];
      }
      for (int k = 0; k < multiplicity[a]; ++k) value *= double(n - k);
    }
    sum += value;
    sumSq += value * value;
  }
  const double n = double(o.draws);
  const double mean = sum / n;
  const double variance = std::max(0.0, sumSq / n - mean * mean) * n / std::max(1.0, n - 1.0);
  const double stderr_ = std::sqrt(variance / n);

  VerificationReport r;
  r.name = "factorial-moment";
  r.kernel = kernel.name();
  r.level = level;
  r.rankMax = o.rankMax;
  r.window = o.window.toString();
  r.seed = o.seed;
  r.draws = o.draws;
  r.lhs = q.value;
  r.lhsError = q.errorEstimate;
  r.rhs = mean;
  r.rhsError = stderr_;
  r.budget.quadrature = q.errorEstimate;
  r.budget.truncation = std::abs(q.value - indexSide);
  r.budget.monteCarlo = 3.0 * stderr_;
  r.details = {{"cells", cellLabels(cells, kernel.dimension())},
               {"multiplicity", multiplicity},
               {"index_side", indexSide}};
  r.decide();
  return r;
}

std::size_t refinementCheck(int level, int otherLevel, const Window& window, const ReferenceMeasure& measure,
                            const std::vector<PointConfiguration>& configurations) {
  if (otherLevel < level) throw std::invalid_argument("refinement check needs level <= otherLevel");
  const Partition coarse = Partition::atLevel(window, measure, level);
  const Partition fine = Partition::atLevel(window, measure, otherLevel);
  std::size_t mismatches = 0;
  for (const auto& config : configurations) {
    if (cellCounts(config, coarse) != coarsenCounts(cellCounts(config, fine), fine, coarse)) ++mismatches;
  }
  return mismatches;
}

PointConfiguration randomConfiguration(const Window& window, const ReferenceMeasure& measure,
                                       std::size_t points, Pcg32& rng) {
  const Box box = window.box();
  PointConfiguration out;
  for (std::size_t k = 0; k < points; ++k) {
    Point p;
    p.x = measure.axisQuantile(box.lo[0], box.hi[0], rng.uniform());
    if (window.dim == 2) p.y = measure.axisQuantile(box.lo[1], box.hi[1], rng.uniform());
    out.push_back(p);
  }
  return out;
}

bool consistencyPasses(const ConsistencyReport& r) {
  if (!(r.pValue > kConsistencyPValueThreshold)) return false;
  return !r.exactAvailable || r.exactViolations == 0;
}

nlohmann::json toJson(const ConsistencyReport& r) {
  return {
      {"schema", "treedpp.consistency-report"},
      {"schema_version", 1},
      {"generator", kVersionString},
      {"name", "consistency"},
      {"pass", consistencyPasses(r)},
      {"level", r.level},
      {"other_level", r.otherLevel},
      {"rank_max", r.rankMax},
      {"draws", r.draws},
      {"outcomes", r.outcomes.size()},
      {"chi_square", {{"statistic", r.chiSquare}, {"df", r.degreesOfFreedom}, {"p_value", r.pValue},
                      {"threshold", kConsistencyPValueThreshold}}},
      {"band_violations", r.bandViolations},
      {"exact", {{"available", r.exactAvailable}, {"violations", r.exactViolations}}},
      {"trace", {r.traceA, r.traceB}},
      {"quadrature_error", {r.quadratureErrorA, r.quadratureErrorB}},
  };
}

std::string outcomeTableCsv(const ConsistencyReport& r) {
  std::string out = "counts,count_a,count_b,freq_a,freq_b,sigma,within_band,exact,within_exact\n";
  for (const auto& row : r.outcomes) {
    std::string counts;
    for (std::size_t k = 0; k < row.counts.size(); ++k) {
      if (k > 0) counts += ' ';
      counts += std::to_string(row.counts[k]);
    }
    out += counts + ',' + std::to_string(row.countA) + ',' + std::to_string(row.countB) + ',' +
           formatDouble(row.freqA) + ',' + formatDouble(row.freqB) + ',' + formatDouble(row.sigma) + ',' +
           (row.withinBand ? "1" : "0") + ',' + (row.exact ? formatDouble(*row.exact) : "") + ',' +
           (row.exact ? (row.withinExact ? "1" : "0") : "") + '\n';
  }
  return out;
}

}  // namespace treedpp
