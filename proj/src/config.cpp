#include "treedpp/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include <yaml-cpp/yaml.h>

#include "treedpp/errors.hpp"
#include "treedpp/parallel.hpp"

namespace treedpp {

namespace {

int lineOf(const YAML::Node& node) {
  const auto mark = node.Mark();
  return mark.line >= 0 ? mark.line + 1 : 0;
}

template <class T>
T scalar(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) throw ConfigError(field, lineOf(node), "expected a scalar value");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(field, lineOf(node), "cannot read '" + node.Scalar() + "' as the expected type");
  }
}

template <class T>
std::vector<T> sequence(const YAML::Node& node, const std::string& field) {
  if (!node.IsSequence()) throw ConfigError(field, lineOf(node), "expected a list");
  std::vector<T> out;
  for (const auto& item : node) out.push_back(scalar<T>(item, field));
  return out;
}

using Setter = std::function<void(RunConfig&, const YAML::Node&, const std::string&)>;

template <class T, class Member>
Setter set(Member member) {
  return [member](RunConfig& c, const YAML::Node& n, const std::string& f) { c.*member = scalar<T>(n, f); };
}

const std::map<std::string, Setter>& topLevelFields() {
  static const std::map<std::string, Setter> fields = {
      {"window", set<std::string>(&RunConfig::window)},
      {"level", set<int>(&RunConfig::level)},
      {"rank_max", set<int>(&RunConfig::rankMax)},
      {"seed", set<std::uint64_t>(&RunConfig::seed)},
      {"samples", set<std::size_t>(&RunConfig::samples)},
      {"threads", set<int>(&RunConfig::threads)},
      {"input", set<std::string>(&RunConfig::input)},
  };
  return fields;
}

const std::map<std::string, Setter>& sectionFields(const std::string& section) {
  static const std::map<std::string, std::map<std::string, Setter>> sections = {
      {"kernel",
       {{"name", [](RunConfig& c, const YAML::Node& n, const std::string& f) { c.kernel.name = scalar<std::string>(n, f); }},
        {"alpha", [](RunConfig& c, const YAML::Node& n, const std::string& f) { c.kernel.alpha = scalar<double>(n, f); }},
        {"bound", [](RunConfig& c, const YAML::Node& n, const std::string& f) { c.kernel.bound = scalar<double>(n, f); }},
        {"element_level",
         [](RunConfig& c, const YAML::Node& n, const std::string& f) { c.kernel.elementLevel = scalar<int>(n, f); }},
        {"measure", [](RunConfig& c, const YAML::Node& n, const std::string& f) { c.kernel.measure = scalar<std::string>(n, f); }},
        {"elements",
         [](RunConfig& c, const YAML::Node& n, const std::string& f) { c.kernel.elements = sequence<std::string>(n, f); }}}},
      {"quadrature",
       {{"order", set<int>(&RunConfig::quadratureOrder)},
        {"tolerance", set<double>(&RunConfig::quadratureTolerance)},
        {"subdivisions", set<int>(&RunConfig::quadratureSubdivisions)}}},
      {"verify",
       {{"other_level", set<int>(&RunConfig::otherLevel)},
        {"cells", [](RunConfig& c, const YAML::Node& n, const std::string& f) { c.cells = sequence<std::string>(n, f); }},
        {"multiplicity",
         [](RunConfig& c, const YAML::Node& n, const std::string& f) { c.multiplicity = sequence<int>(n, f); }},
        {"tolerance", set<double>(&RunConfig::tolerance)},
        {"configurations", set<std::size_t>(&RunConfig::configurations)},
        {"points", set<std::size_t>(&RunConfig::points)}}},
      {"output",
       {{"path", set<std::string>(&RunConfig::output)}, {"table", set<std::string>(&RunConfig::table)}}},
      {"plot", {{"bins", set<int>(&RunConfig::bins)}}},
  };
  return sections.at(section);
}

bool isSection(const std::string& key) {
  return key == "kernel" || key == "quadrature" || key == "verify" || key == "output" || key == "plot";
}

}  // namespace

void RunConfig::validate() const {
  static const std::vector<std::string> kernels = {"sine", "airy", "bessel", "ginibre", "finite-rank"};
  if (std::find(kernels.begin(), kernels.end(), kernel.name) == kernels.end()) {
    throw ConfigError("kernel.name", lineFor("kernel.name"), "unknown kernel '" + kernel.name + "'");
  }
  if (kernel.name == "bessel" && !(kernel.alpha >= 1.0)) {
    throw ConfigError("kernel.alpha", lineFor("kernel.alpha"), "the Bessel kernel needs alpha >= 1");
  }
  if (kernel.bound && !(*kernel.bound > 0.0)) throw ConfigError("kernel.bound", lineFor("kernel.bound"), "must be positive");
  if (kernel.name == "finite-rank" && kernel.elements.empty()) {
    throw ConfigError("kernel.elements", lineFor("kernel.elements"), "a finite-rank kernel needs at least one element");
  }
  if (kernel.elementLevel < 1) throw ConfigError("kernel.element_level", lineFor("kernel.element_level"), "must be >= 1");
  if (level < 1) throw ConfigError("level", lineFor("level"), "must be >= 1");
  if (rankMax < 1) throw ConfigError("rank_max", lineFor("rank_max"), "must be >= 1");
  if (level + rankMax > kMaxDepth) throw ConfigError("rank_max", lineFor("rank_max"), "level + rank_max is too deep");
  if (quadratureOrder < 2) throw ConfigError("quadrature.order", lineFor("quadrature.order"), "must be >= 2");
  if (!(quadratureTolerance > 0.0)) throw ConfigError("quadrature.tolerance", lineFor("quadrature.tolerance"), "must be positive");
  if (quadratureSubdivisions < 0 || quadratureSubdivisions > 10) {
    throw ConfigError("quadrature.subdivisions", lineFor("quadrature.subdivisions"), "must be in [0, 10]");
  }
  if (samples < 1) throw ConfigError("samples", lineFor("samples"), "must be >= 1");
  if (threads < 0) throw ConfigError("threads", lineFor("threads"), "must be >= 0");
  if (otherLevel != 0 && otherLevel <= level) throw ConfigError("verify.other_level", lineFor("verify.other_level"), "must exceed level");
  if (!multiplicity.empty() && multiplicity.size() != cells.size()) {
    throw ConfigError("verify.multiplicity", lineFor("verify.multiplicity"), "needs one entry per cell");
  }
  if (!(tolerance >= 0.0)) throw ConfigError("verify.tolerance", lineFor("verify.tolerance"), "must be >= 0");
  if (configurations < 1) throw ConfigError("verify.configurations", lineFor("verify.configurations"), "must be >= 1");
  if (bins < 1) throw ConfigError("plot.bins", lineFor("plot.bins"), "must be >= 1");
  if (!window.empty()) {
    try {
      parseWindow(window);
    } catch (const std::exception& e) {
      throw ConfigError("window", lineFor("window"), e.what());
    }
  }
}

int RunConfig::effectiveThreads() const { return threads > 0 ? threads : defaultThreadCount(); }

RunConfig parseConfig(const std::string& yamlText, RunConfig base) {
  YAML::Node root;
  try {
    root = YAML::Load(yamlText);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("", e.mark.line + 1, e.msg);
  }
  if (root.IsNull()) return base;
  if (!root.IsMap()) throw ConfigError("", lineOf(root), "the config must be a mapping");
  for (const auto& entry : root) {
    const auto key = entry.first.as<std::string>();
    if (isSection(key)) {
      if (!entry.second.IsMap()) throw ConfigError(key, lineOf(entry.second), "expected a section");
      const auto& fields = sectionFields(key);
      for (const auto& sub : entry.second) {
        const auto subKey = sub.first.as<std::string>();
        const auto field = key + "." + subKey;
        const auto it = fields.find(subKey);
        if (it == fields.end()) throw ConfigError(field, lineOf(sub.first), "unknown key");
        it->second(base, sub.second, field);
        base.fieldLines[field] = lineOf(sub.second);
      }
      continue;
    }
    const auto it = topLevelFields().find(key);
    if (it == topLevelFields().end()) throw ConfigError(key, lineOf(entry.first), "unknown key");
    it->second(base, entry.second, key);
    base.fieldLines[key] = lineOf(entry.second);
  }
  return base;
}

RunConfig loadConfigFile(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parseConfig(ss.str(), std::move(base));
}

nlohmann::json configToJson(const RunConfig& c) {
  nlohmann::json kernel = {{"name", c.kernel.name}};
  if (c.kernel.name == "bessel") kernel["alpha"] = c.kernel.alpha;
  if (c.kernel.bound) kernel["bound"] = *c.kernel.bound;
  if (c.kernel.name == "finite-rank") {
    kernel["elements"] = c.kernel.elements;
    kernel["element_level"] = c.kernel.elementLevel;
    kernel["measure"] = c.kernel.measure;
  }
  return {
      {"kernel", kernel},
      {"window", effectiveWindow(c).toString()},
      {"level", c.level},
      {"rank_max", c.rankMax},
      {"quadrature",
       {{"order", c.quadratureOrder},
        {"tolerance", c.quadratureTolerance},
        {"subdivisions", c.quadratureSubdivisions}}},
      {"seed", c.seed},
      {"samples", c.samples},
      {"verify",
       {{"other_level", c.effectiveOtherLevel()},
        {"cells", c.cells},
        {"multiplicity", c.multiplicity},
        {"tolerance", c.tolerance},
        {"configurations", c.configurations},
        {"points", c.points}}},
      {"plot", {{"bins", c.bins}}},
  };
}

ContinuousKernel makeKernel(const RunConfig& c) {
  const auto& k = c.kernel;
  if (k.name == "sine") return ContinuousKernel::sine(k.bound.value_or(8.0));
  if (k.name == "airy") return ContinuousKernel::airy(k.bound.value_or(8.0));
  if (k.name == "bessel") return ContinuousKernel::bessel(k.alpha, k.bound.value_or(8.0));
  if (k.name == "ginibre") return ContinuousKernel::ginibre(k.bound.value_or(4.0));
  if (k.name == "finite-rank") {
    ReferenceMeasure measure;
    try {
      measure = parseMeasure(k.measure);
    } catch (const std::exception& e) {
      throw ConfigError("kernel.measure", c.lineFor("kernel.measure"), e.what());
    }
    std::vector<TreeIndex> elements;
    try {
      for (const auto& label : k.elements) {
        elements.push_back(parseTreeIndex(label, k.elementLevel, measure.dimension()));
      }
      return buildFiniteRankKernel(elements, k.elementLevel, measure);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("kernel.elements", c.lineFor("kernel.elements"), e.what());
    }
  }
  throw ConfigError("kernel.name", c.lineFor("kernel.name"), "unknown kernel '" + k.name + "'");
}

ReferenceMeasure referenceMeasure(const RunConfig& c) {
  const auto& name = c.kernel.name;
  if (name == "bessel") return ReferenceMeasure(MeasureKind::LebesgueHalfLine);
  if (name == "ginibre") return ReferenceMeasure(MeasureKind::GaussianPlane);
  if (name == "finite-rank") {
    try {
      return parseMeasure(c.kernel.measure);
    } catch (const std::exception& e) {
      throw ConfigError("kernel.measure", c.lineFor("kernel.measure"), e.what());
    }
  }
  return ReferenceMeasure(MeasureKind::Lebesgue1D);
}

Window effectiveWindow(const RunConfig& c) {
  const auto measure = referenceMeasure(c);
  std::string text = c.window;
  if (text.empty()) {
    const auto& name = c.kernel.name;
    if (name == "bessel") {
      text = "0..4";
    } else if (name == "ginibre") {
      text = "-2..2,-2..2";
    } else if (name == "finite-rank") {
      text = measure.dimension() == 2 ? "0..1,0..1" : "0..1";
    } else {
      text = "-2..2";
    }
  }
  Window w;
  try {
    w = parseWindow(text);
  } catch (const std::exception& e) {
    throw ConfigError("window", c.lineFor("window"), e.what());
  }
  if (w.dim != measure.dimension()) {
    throw ConfigError("window", c.lineFor("window"),
                      "window '" + text + "' is " + std::to_string(w.dim) + "D but the " + measure.name() +
                          " measure lives in " + std::to_string(measure.dimension()) + "D");
  }
  if (!measure.admits(w.box())) {
    throw ConfigError("window", c.lineFor("window"), "window '" + text + "' leaves the domain of " + measure.name());
  }
  return w;
}

ProjectionOptions projectionOptions(const RunConfig& c) {
  return {c.quadratureOrder, c.quadratureTolerance, c.effectiveThreads()};
}

QuadratureOptions quadratureOptions(const RunConfig& c) {
  return {c.quadratureOrder, c.quadratureSubdivisions, c.quadratureTolerance};
}

std::vector<CellKey> parseCells(const std::vector<std::string>& labels, int dim) {
  std::vector<CellKey> out;
  for (const auto& label : labels) {
    const auto colon = label.find(':');
    const int bits = colon == std::string::npos ? 0 : int(label.size() - colon - 1);
    try {
      out.push_back(parseTreeIndex(label, bits + 1, dim).key());
    } catch (const std::exception& e) {
      throw ConfigError("verify.cells", 0, e.what());
    }
  }
  return out;
}

}  // namespace treedpp
