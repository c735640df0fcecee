#pragma once

#include <string>

#include <json.hpp>

#include "treedpp/projection.hpp"

namespace treedpp {

inline constexpr const char* kProjectedKernelSchema = "treedpp.projected-kernel";
inline constexpr int kProjectedKernelSchemaVersion = 1;

// Metadata header, index labels, row-major matrix (separate real and
// imaginary arrays), eigenvalues and row-major eigenvector matrix (column k
// is the k-th eigenvector).
nlohmann::json projectedToJson(const ProjectedKernel& p, const nlohmann::json& config);
ProjectedKernel projectedFromJson(const nlohmann::json& j);

// Shortest text that reads back to the same double.
std::string formatDouble(double v);
// Quotes a CSV field when it contains a comma or a quote.
std::string csvField(const std::string& s);

std::string readTextFile(const std::string& path);
// Writes to `path`, or to stdout when the path is empty or "-".
void writeTextFile(const std::string& path, const std::string& content);

}  // namespace treedpp
