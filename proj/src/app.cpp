#include "treedpp/app.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "treedpp/config.hpp"
#include "treedpp/errors.hpp"
#include "treedpp/io.hpp"
#include "treedpp/lift.hpp"
#include "treedpp/plot.hpp"
#include "treedpp/verify.hpp"
#include "treedpp/version.hpp"

namespace treedpp {

namespace {

using nlohmann::json;

struct Io {
  std::ostream& out;
  std::ostream& err;
};

bool toStdout(const std::string& path) { return path.empty() || path == "-"; }

void emit(const std::string& path, const std::string& content, const Io& io) {
  if (toStdout(path)) {
    io.out << content;
    io.out.flush();
    return;
  }
  try {
    writeTextFile(path, content);
  } catch (const std::exception& e) {
    throw ConfigError("output", 0, e.what());
  }
}

std::ostream& summary(const RunConfig& c, const Io& io) { return toStdout(c.output) ? io.err : io.out; }

std::string preamble(const json& config) {
  return std::string("# generator: ") + kVersionString + "\n# config: " + config.dump() + "\n";
}

// Flags that override config-file values. Each one is applied only when it
// appeared on the command line.
class Overrides {
 public:
  explicit Overrides(CLI::App& app) : app_(app) {}

  template <class T>
  void add(const std::string& names, const std::string& field, const std::string& help,
           std::function<void(RunConfig&, const T&)> apply) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app_.add_option(names, *value, help)->group("Run config");
    entries_.push_back([opt, value, apply, field](RunConfig& c) {
      if (opt->count() == 0) return;
      apply(c, *value);
      c.fieldLines.erase(field);
    });
  }

  void apply(RunConfig& c) const {
    for (const auto& e : entries_) e(c);
  }

 private:
  CLI::App& app_;
  std::vector<std::function<void(RunConfig&)>> entries_;
};

void addOverrides(Overrides& o) {
  o.add<std::string>("--kernel", "kernel.name", "sine | airy | bessel | ginibre | finite-rank",
                     [](RunConfig& c, const std::string& v) { c.kernel.name = v; });
  o.add<double>("--alpha", "kernel.alpha", "Bessel order (>= 1)",
                [](RunConfig& c, const double& v) { c.kernel.alpha = v; });
  o.add<double>("--bound", "kernel.bound", "kernel evaluation window half-width",
                [](RunConfig& c, const double& v) { c.kernel.bound = v; });
  o.add<std::vector<std::string>>("--elements", "kernel.elements", "finite-rank element labels",
                                  [](RunConfig& c, const std::vector<std::string>& v) { c.kernel.elements = v; });
  o.add<int>("--element-level", "kernel.element_level", "level context of the element labels",
             [](RunConfig& c, const int& v) { c.kernel.elementLevel = v; });
  o.add<std::string>("--measure", "kernel.measure", "finite-rank reference measure",
                     [](RunConfig& c, const std::string& v) { c.kernel.measure = v; });
  o.add<std::string>("--window", "window", "unit-cell window a..b or a..b,c..d",
                     [](RunConfig& c, const std::string& v) { c.window = v; });
  o.add<int>("--level,-l", "level", "partition level", [](RunConfig& c, const int& v) { c.level = v; });
  o.add<int>("--rank-max,-R", "rank_max", "rank cap of the truncated basis",
             [](RunConfig& c, const int& v) { c.rankMax = v; });
  o.add<int>("--quadrature-order", "quadrature.order", "Gauss-Legendre points per axis",
             [](RunConfig& c, const int& v) { c.quadratureOrder = v; });
  o.add<double>("--quadrature-tolerance", "quadrature.tolerance", "cell-pair error tolerance",
                [](RunConfig& c, const double& v) { c.quadratureTolerance = v; });
  o.add<int>("--quadrature-subdivisions", "quadrature.subdivisions", "cell splits for correlation integrals",
             [](RunConfig& c, const int& v) { c.quadratureSubdivisions = v; });
  o.add<std::uint64_t>("--seed", "seed", "RNG seed", [](RunConfig& c, const std::uint64_t& v) { c.seed = v; });
  o.add<std::size_t>("--n,--samples", "samples", "number of draws",
                     [](RunConfig& c, const std::size_t& v) { c.samples = v; });
  o.add<int>("--threads", "threads", "worker threads (0: available parallelism)",
             [](RunConfig& c, const int& v) { c.threads = v; });
  o.add<int>("--other-level", "verify.other_level", "second level for refine/consistency",
             [](RunConfig& c, const int& v) { c.otherLevel = v; });
  o.add<std::vector<std::string>>("--cells", "verify.cells", "cell labels for corr/moments",
                                  [](RunConfig& c, const std::vector<std::string>& v) { c.cells = v; });
  o.add<std::vector<int>>("--multiplicity", "verify.multiplicity", "factorial moment orders per cell",
                          [](RunConfig& c, const std::vector<int>& v) { c.multiplicity = v; });
  o.add<double>("--tolerance", "verify.tolerance", "truncation allowance for corr",
                [](RunConfig& c, const double& v) { c.tolerance = v; });
  o.add<std::size_t>("--configurations", "verify.configurations", "random configurations for refine",
                     [](RunConfig& c, const std::size_t& v) { c.configurations = v; });
  o.add<std::size_t>("--points", "verify.points", "points per refine configuration",
                     [](RunConfig& c, const std::size_t& v) { c.points = v; });
  o.add<std::string>("--input,-i", "input", "projected-kernel file to reuse",
                     [](RunConfig& c, const std::string& v) { c.input = v; });
  o.add<std::string>("--output,-o", "output.path", "artifact path (default: stdout)",
                     [](RunConfig& c, const std::string& v) { c.output = v; });
  o.add<std::string>("--table", "output.table", "outcome table path for verify consistency",
                     [](RunConfig& c, const std::string& v) { c.table = v; });
  o.add<int>("--bins", "plot.bins", "histogram bins", [](RunConfig& c, const int& v) { c.bins = v; });
}

RunConfig loadRunConfig(const std::string& flagPath) {
  std::string path = flagPath;
  if (path.empty()) {
    if (const char* env = std::getenv(kConfigEnvVar); env != nullptr) path = env;
  }
  if (path.empty()) return {};
  return loadConfigFile(path);
}

// A projected kernel from --input, or computed from the config; returned with
// the config that generated it.
std::pair<ProjectedKernel, json> loadProjected(const RunConfig& c) {
  if (!c.input.empty()) {
    json j;
    try {
      j = json::parse(readTextFile(c.input));
      return {projectedFromJson(j), j.value("config", json::object())};
    } catch (const std::exception& e) {
      throw ConfigError("input", 0, "cannot load projected kernel '" + c.input + "': " + e.what());
    }
  }
  const auto kernel = makeKernel(c);
  const TruncatedBasis basis(c.level, c.rankMax, effectiveWindow(c), kernel.measure());
  return {projectKernel(kernel, basis, projectionOptions(c)), configToJson(c)};
}

TreeRepresentation loadRepresentation(const RunConfig& c, json& generating) {
  auto [p, config] = loadProjected(c);
  generating = config;
  TruncatedBasis basis(p.level, p.rankMax, p.window, p.measure);
  return TreeRepresentation(std::move(basis), std::move(p));
}

std::string rootField(const Root& r, int dim) {
  if (dim == 1) return std::to_string(r.x);
  return csvField(std::to_string(r.x) + "," + std::to_string(r.y));
}

std::string boxFields(const Box& b) {
  std::string s = formatDouble(b.lo[0]) + ',' + formatDouble(b.hi[0]);
  if (b.dim == 2) s += ',' + formatDouble(b.lo[1]) + ',' + formatDouble(b.hi[1]);
  return s;
}

int cmdPartition(const RunConfig& c, const Io& io) {
  const auto measure = referenceMeasure(c);
  const auto window = effectiveWindow(c);
  const auto p = Partition::atLevel(window, measure, c.level);
  std::string s = preamble(configToJson(c));
  s += window.dim == 2 ? "level,root,bits,left,right,bottom,top,mass\n" : "level,root,bits,left,right,mass\n";
  for (const auto& cell : p.cells()) {
    s += std::to_string(c.level) + ',' + rootField(cell.key.root, window.dim) + ',' + cell.index().bitString() +
         ',' + boxFields(cell.box) + ',' + formatDouble(cell.mass) + '\n';
  }
  emit(c.output, s, io);
  summary(c, io) << "partition: " << p.size() << " cells at level " << c.level << " on " << window.toString()
                 << " (" << measure.name() << ")\n";
  return kExitOk;
}

int cmdBasis(const RunConfig& c, const Io& io) {
  const auto measure = referenceMeasure(c);
  const auto window = effectiveWindow(c);
  const TruncatedBasis basis(c.level, c.rankMax, window, measure);
  const int dim = window.dim;
  std::string s = preamble(configToJson(c));
  s += dim == 2 ? "position,index,rank,piece,left,right,bottom,top,value,mass\n"
                : "position,index,rank,piece,left,right,value,mass\n";
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const auto& f = basis[k];
    for (const auto& piece : f.pieces()) {
      s += std::to_string(k) + ',' + csvField(f.index().label(dim)) + ',' + std::to_string(f.index().rank()) + ',' +
           csvField(TreeIndex(piece.cell, piece.cell.level()).label(dim)) + ',' + boxFields(piece.box) + ',' +
           formatDouble(piece.coefficient) + ',' + formatDouble(piece.mass) + '\n';
    }
  }
  emit(c.output, s, io);
  summary(c, io) << "basis: " << basis.size() << " functions, level " << c.level << ", rank <= " << c.rankMax
                 << " on " << window.toString() << "\n";
  return kExitOk;
}

int cmdProject(const RunConfig& c, const Io& io) {
  const auto kernel = makeKernel(c);
  const TruncatedBasis basis(c.level, c.rankMax, effectiveWindow(c), kernel.measure());
  const auto p = projectKernel(kernel, basis, projectionOptions(c));
  emit(c.output, projectedToJson(p, configToJson(c)).dump() + "\n", io);
  summary(c, io) << "project: " << kernel.name() << ", " << p.size() << " indices, eigenvalues in ["
                 << formatDouble(p.eigenvalues.minCoeff()) << ", " << formatDouble(p.eigenvalues.maxCoeff())
                 << "], quadrature error estimate " << formatDouble(p.quadratureError) << "\n";
  return kExitOk;
}

int cmdSpectrum(const RunConfig& c, const Io& io) {
  const auto [p, config] = loadProjected(c);
  const auto r = spectrumReport(p);
  std::string s = preamble(config);
  s += "# size: " + std::to_string(p.size()) + "\n";
  s += "# raw range: " + formatDouble(r.rawMin) + " " + formatDouble(r.rawMax) + "\n";
  s += "# clipped: " + std::to_string(r.clipCount) + "\n";
  s += "# trace: " + formatDouble(r.trace) + "\n";
  s += "k,raw,clipped\n";
  for (Eigen::Index k = 0; k < p.eigenvalues.size(); ++k) {
    s += std::to_string(k) + ',' + formatDouble(p.eigenvalues[k]) + ',' + formatDouble(r.eigenvalues[k]) + '\n';
  }
  emit(c.output, s, io);
  summary(c, io) << "spectrum: " << p.size() << " eigenvalues in [" << formatDouble(r.rawMin) << ", "
                 << formatDouble(r.rawMax) << "], " << r.clipCount << " clipped, trace " << formatDouble(r.trace)
                 << "\n";
  return kExitOk;
}

int cmdSample(const RunConfig& c, const Io& io) {
  const auto [p, config] = loadProjected(c);
  const DiscreteDPP dpp(p);
  const auto draws = sampleMany(dpp, c.seed, c.samples, c.effectiveThreads());
  std::string s = preamble(configToJson(c));
  if (!c.input.empty()) s += "# projection config: " + config.dump() + "\n";
  s += "draw,size,positions\n";
  std::size_t total = 0;
  for (std::size_t r = 0; r < draws.size(); ++r) {
    s += std::to_string(r) + ',' + std::to_string(draws[r].size()) + ',';
    for (std::size_t k = 0; k < draws[r].size(); ++k) {
      if (k > 0) s += ' ';
      s += std::to_string(draws[r][k]);
    }
    s += '\n';
    total += draws[r].size();
  }
  emit(c.output, s, io);
  summary(c, io) << "sample: " << draws.size() << " draws from " << p.size() << " indices, mean size "
                 << formatDouble(double(total) / double(draws.size())) << "\n";
  return kExitOk;
}

json pointJson(const Point& p, int dim) { return dim == 2 ? json::array({p.x, p.y}) : json::array({p.x}); }

int cmdLiftSample(const RunConfig& c, const Io& io) {
  json config;
  const auto rep = loadRepresentation(c, config);
  const int dim = rep.basis().dimension();
  const auto draws = rep.sampleMany(c.seed, c.samples, c.effectiveThreads());
  std::string s = json{{"schema", "treedpp.lift-sample"},
                       {"schema_version", 1},
                       {"generator", kVersionString},
                       {"config", configToJson(c)},
                       {"projection_config", config},
                       {"draws", draws.size()}}
                      .dump() +
                  "\n";
  for (std::size_t r = 0; r < draws.size(); ++r) {
    auto pairs = json::array();
    for (const auto& lp : draws[r].pairs) {
      pairs.push_back({{"position", lp.position}, {"index", lp.index.label(dim)}, {"point", pointJson(lp.point, dim)}});
    }
    auto points = unlabel(draws[r]);
    std::sort(points.begin(), points.end(),
              [](const Point& a, const Point& b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
    auto unlabeled = json::array();
    for (const auto& p : points) unlabeled.push_back(pointJson(p, dim));
    s += json{{"draw", r}, {"pairs", pairs}, {"points", unlabeled}}.dump() + "\n";
  }
  emit(c.output, s, io);
  summary(c, io) << "lift-sample: " << draws.size() << " lifted draws at level " << rep.level() << "\n";
  return kExitOk;
}

int finishReport(const RunConfig& c, const Io& io, json report, bool pass, const std::string& line) {
  report["config"] = configToJson(c);
  emit(c.output, report.dump(2) + "\n", io);
  summary(c, io) << line << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? kExitOk : kExitVerificationFailed;
}

std::string reportLine(const VerificationReport& r) {
  return r.name + ": lhs " + formatDouble(r.lhs) + ", rhs " + formatDouble(r.rhs) + ", gap " +
         formatDouble(r.gap()) + ", budget " + formatDouble(r.budget.total()) + " (quadrature " +
         formatDouble(r.budget.quadrature) + ", truncation " + formatDouble(r.budget.truncation) +
         ", monte carlo " + formatDouble(r.budget.monteCarlo) + ") -> ";
}

std::vector<CellKey> cellsOrFirst(const RunConfig& c, const Window& window, const ReferenceMeasure& measure) {
  if (!c.cells.empty()) return parseCells(c.cells, window.dim);
  return {Partition::atLevel(window, measure, c.level).cells().front().key};
}

int cmdVerifyCorr(const RunConfig& c, const Io& io) {
  const auto kernel = makeKernel(c);
  const auto window = effectiveWindow(c);
  const auto cells = cellsOrFirst(c, window, kernel.measure());
  CorrelationOptions o;
  o.rankMax = c.rankMax;
  o.window = window;
  o.quadrature = quadratureOptions(c);
  o.projection = projectionOptions(c);
  o.tolerance = c.tolerance;
  const auto r = correlationIdentity(kernel, c.level, cells, o);
  return finishReport(c, io, toJson(r), r.pass, reportLine(r));
}

int cmdVerifyOrtho(const RunConfig& c, const Io& io) {
  const auto r = orthogonalityReport(c.level, c.rankMax, effectiveWindow(c), referenceMeasure(c));
  const std::string line = "orthogonality: " + std::to_string(r.details["triples"].get<std::size_t>()) +
                           " triples, " + std::to_string(r.details["mismatches"].get<std::size_t>()) +
                           " mismatches, max error " + formatDouble(r.lhs) + " -> ";
  return finishReport(c, io, toJson(r), r.pass, line);
}

int cmdVerifyMoments(const RunConfig& c, const Io& io) {
  const auto kernel = makeKernel(c);
  const auto window = effectiveWindow(c);
  const auto cells = cellsOrFirst(c, window, kernel.measure());
  auto multiplicity = c.multiplicity;
  if (multiplicity.empty()) multiplicity.assign(cells.size(), 1);
  MomentOptions o;
  o.rankMax = c.rankMax;
  o.window = window;
  o.draws = c.samples;
  o.seed = c.seed;
  o.threads = c.effectiveThreads();
  o.quadrature = quadratureOptions(c);
  o.projection = projectionOptions(c);
  const auto r = factorialMomentCheck(kernel, c.level, cells, multiplicity, o);
  return finishReport(c, io, toJson(r), r.pass, reportLine(r));
}

int cmdVerifyRefine(const RunConfig& c, const Io& io) {
  const auto measure = referenceMeasure(c);
  const auto window = effectiveWindow(c);
  const int other = c.effectiveOtherLevel();
  std::vector<PointConfiguration> configs;
  configs.reserve(c.configurations);
  for (std::size_t r = 0; r < c.configurations; ++r) {
    Pcg32 rng(c.seed, r);
    configs.push_back(randomConfiguration(window, measure, c.points, rng));
  }
  const auto mismatches = refinementCheck(c.level, other, window, measure, configs);
  VerificationReport r;
  r.name = "refinement";
  r.kernel = "none";
  r.level = c.level;
  r.rankMax = 0;
  r.window = window.toString();
  r.seed = c.seed;
  r.draws = c.configurations;
  r.lhs = double(mismatches);
  r.rhs = 0.0;
  r.details = {{"other_level", other},
               {"configurations", c.configurations},
               {"points", c.points},
               {"mismatches", mismatches},
               {"measure", measure.name()}};
  r.pass = mismatches == 0;
  const std::string line = "refinement: level " + std::to_string(c.level) + " from level " + std::to_string(other) +
                           ", " + std::to_string(mismatches) + " of " + std::to_string(c.configurations) +
                           " configurations mismatch -> ";
  return finishReport(c, io, toJson(r), r.pass, line);
}

int cmdVerifyConsistency(const RunConfig& c, const Io& io) {
  const auto kernel = makeKernel(c);
  ConsistencyOptions o;
  o.level = c.level;
  o.otherLevel = c.effectiveOtherLevel();
  o.rankMax = c.rankMax;
  o.window = effectiveWindow(c);
  o.draws = c.samples;
  o.seed = c.seed;
  o.projection = projectionOptions(c);
  o.threads = c.effectiveThreads();
  const auto r = consistencyExperiment(kernel, o);
  const bool pass = consistencyPasses(r);

  std::string table = c.table;
  if (table.empty() && !toStdout(c.output)) table = c.output + ".outcomes.csv";
  if (!table.empty()) emit(table, preamble(configToJson(c)) + outcomeTableCsv(r), io);

  const auto report = toJson(r);
  std::string line = "consistency: level " + std::to_string(r.level) + " vs " + std::to_string(r.otherLevel) +
                     ", " + std::to_string(r.outcomes.size()) + " outcomes, chi-square " +
                     formatDouble(r.chiSquare) + " on " + std::to_string(r.degreesOfFreedom) + " df, p " +
                     formatDouble(r.pValue) + ", band violations " + std::to_string(r.bandViolations);
  if (r.exactAvailable) line += ", exact-law violations " + std::to_string(r.exactViolations);
  if (!table.empty()) line += ", table " + table;
  return finishReport(c, io, report, pass, line + " -> ");
}

int cmdPlot(const RunConfig& c, const Io& io) {
  json config;
  const auto rep = loadRepresentation(c, config);
  const auto& window = rep.basis().window();
  PlotLabels labels;
  labels.description = std::string(kVersionString) + " config: " + configToJson(c).dump();
  const std::string what = rep.projected().kernelName + " kernel, level " + std::to_string(rep.level()) +
                           ", rank <= " + std::to_string(rep.basis().rankMax()) + ", seed " + std::to_string(c.seed);
  std::string svg;
  if (window.dim == 2) {
    const auto draw = rep.sampleMany(c.seed, 1, 1).front();
    labels.title = "Lifted sample: " + what;
    svg = scatterSvg(unlabel(draw), window.box(), labels);
  } else {
    const auto draws = rep.sampleMany(c.seed, c.samples, c.effectiveThreads());
    std::vector<double> values, rug;
    for (const auto& p : unlabel(draws.front())) rug.push_back(p.x);
    std::sort(rug.begin(), rug.end());
    for (const auto& d : draws) {
      for (const auto& p : unlabel(d)) values.push_back(p.x);
    }
    const Box box = window.box();
    std::vector<std::pair<double, double>> curve;
    if (c.input.empty()) {
      const auto kernel = makeKernel(c);
      constexpr int kCurvePoints = 200;
      for (int k = 0; k < kCurvePoints; ++k) {
        const double x = box.lo[0] + (box.hi[0] - box.lo[0]) * (k + 0.5) / kCurvePoints;
        curve.emplace_back(x, kernel.evaluate({x, 0.0}, {x, 0.0}).real());
      }
    }
    labels.title = "Lifted samples: " + what;
    svg = histogramSvg(values, draws.size(), rug, box.lo[0], box.hi[0], c.bins, curve, labels);
  }
  emit(c.output, svg, io);
  summary(c, io) << "plot: " << (window.dim == 2 ? "scatter" : "histogram") << " written\n";
  return kExitOk;
}

}  // namespace

int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  const Io io{out, err};
  CLI::App app{"Tree representations of determinantal point processes", "treedpp"};
  app.set_version_flag("--version", std::string(kVersionString));
  app.require_subcommand(1);
  app.fallthrough();
  std::string configPath;
  app.add_option("--config,-c", configPath,
                 std::string("YAML run config (default: $") + kConfigEnvVar + "); flags override its values");
  Overrides overrides(app);
  addOverrides(overrides);

  using Command = std::function<int(const RunConfig&, const Io&)>;
  std::vector<std::pair<CLI::App*, Command>> commands;
  auto command = [&](CLI::App* parent, const std::string& name, const std::string& help, Command run) {
    auto* sub = parent->add_subcommand(name, help);
    sub->fallthrough();
    commands.emplace_back(sub, std::move(run));
    return sub;
  };
  command(&app, "partition", "print the level-l cells of the window as CSV", cmdPartition);
  command(&app, "basis", "print the truncated basis as CSV", cmdBasis);
  command(&app, "project", "project the kernel and write K_F with its eigendecomposition as JSON", cmdProject);
  command(&app, "spectrum", "eigenvalues of a projected kernel (--input, or computed)", cmdSpectrum);
  command(&app, "sample", "discrete DPP draws on the index set as CSV", cmdSample);
  command(&app, "lift-sample", "lifted draws as JSON lines: (index, point) pairs and points", cmdLiftSample);
  auto* verify = app.add_subcommand("verify", "numerical checks; exit 1 on failure");
  verify->fallthrough();
  verify->require_subcommand(1);
  command(verify, "corr", "correlation identity on level-l cells", cmdVerifyCorr);
  command(verify, "ortho", "exhaustive orthogonality sweep", cmdVerifyOrtho);
  command(verify, "moments", "factorial moments of lifted samples against quadrature", cmdVerifyMoments);
  command(verify, "refine", "level-l counts recomputed from finer counts", cmdVerifyRefine);
  command(verify, "consistency", "cell-count laws of two lift levels", cmdVerifyConsistency);
  command(&app, "plot", "SVG of lifted samples (2D scatter or 1D histogram with rug)", cmdPlot);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    RunConfig config = loadRunConfig(configPath);
    overrides.apply(config);
    config.validate();
    for (const auto& [sub, run] : commands) {
      if (sub->parsed()) return run(config, io);
    }
    err << "error: no subcommand\n";
    return kExitConfigError;
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "numeric error: " << e.what() << "\n";
    return kExitNumericError;
  }
}

}  // namespace treedpp
