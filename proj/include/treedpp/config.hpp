#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "treedpp/kernels.hpp"
#include "treedpp/projection.hpp"
#include "treedpp/quadrature.hpp"

namespace treedpp {

// Environment variable naming the default config file.
inline constexpr const char* kConfigEnvVar = "TREEDPP_CONFIG";

struct KernelConfig {
  std::string name = "sine";  // sine | airy | bessel | ginibre | finite-rank
  double alpha = 1.0;
  std::optional<double> bound;
  std::vector<std::string> elements;  // finite-rank element labels
  int elementLevel = 1;               // level context of those labels
  std::string measure = "lebesgue";   // finite-rank reference measure
};

struct RunConfig {
  KernelConfig kernel;
  std::string window;  // empty: the kernel's default
  int level = 1;
  int rankMax = 4;
  int quadratureOrder = 16;
  double quadratureTolerance = 1e-8;
  int quadratureSubdivisions = 2;
  std::uint64_t seed = 1;
  std::size_t samples = 1000;
  int threads = 0;  // 0: available parallelism

  int otherLevel = 0;  // 0: level + 2
  std::vector<std::string> cells;
  std::vector<int> multiplicity;
  double tolerance = 1e-10;
  std::size_t configurations = 1000;  // verify refine
  std::size_t points = 100;           // verify refine, points per configuration

  std::string input;
  std::string output;
  std::string table;
  int bins = 40;

  // Source line of each field read from a file, for diagnostics.
  std::map<std::string, int> fieldLines;
  int lineFor(const std::string& field) const {
    const auto it = fieldLines.find(field);
    return it == fieldLines.end() ? 0 : it->second;
  }

  void validate() const;
  int effectiveThreads() const;
  int effectiveOtherLevel() const { return otherLevel > 0 ? otherLevel : level + 2; }
};

// Parses a YAML config; unknown keys and malformed values raise ConfigError
// with the offending field and line.
RunConfig parseConfig(const std::string& yamlText, RunConfig base = {});
RunConfig loadConfigFile(const std::string& path, RunConfig base = {});

// The config as embedded in artifacts: everything except output locations
// and the thread count, which do not change results.
nlohmann::json configToJson(const RunConfig& config);

ContinuousKernel makeKernel(const RunConfig& config);
ReferenceMeasure referenceMeasure(const RunConfig& config);
// The configured window, or the kernel's default; checked against the
// reference measure (dimension, half line).
Window effectiveWindow(const RunConfig& config);
ProjectionOptions projectionOptions(const RunConfig& config);
QuadratureOptions quadratureOptions(const RunConfig& config);
std::vector<CellKey> parseCells(const std::vector<std::string>& labels, int dim);

}  // namespace treedpp
