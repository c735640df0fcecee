#include "treedpp/io.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "treedpp/version.hpp"

namespace treedpp {

namespace {

nlohmann::json rowMajor(const Eigen::MatrixXcd& m, bool withImaginary) {
  std::vector<double> re, im;
  re.reserve(std::size_t(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      re.push_back(m(i, j).real());
      if (withImaginary) im.push_back(m(i, j).imag());
    }
  }
  nlohmann::json out = {{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}};
  if (withImaginary) out["im"] = im;
  return out;
}

Eigen::MatrixXcd fromRowMajor(const nlohmann::json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto re = j.at("re").get<std::vector<double>>();
  std::vector<double> im;
  if (j.contains("im")) im = j.at("im").get<std::vector<double>>();
  if (re.size() != std::size_t(rows * cols) || (!im.empty() && im.size() != re.size())) {
    throw std::invalid_argument("matrix payload has the wrong length");
  }
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j2 = 0; j2 < cols; ++j2) {
      const auto k = std::size_t(i * cols + j2);
      m(i, j2) = Complex(re[k], im.empty() ? 0.0 : im[k]);
    }
  }
  return m;
}

}  // namespace

nlohmann::json projectedToJson(const ProjectedKernel& p, const nlohmann::json& config) {
  const int dim = p.measure.dimension();
  auto labels = nlohmann::json::array();
  for (const auto& i : p.indices) labels.push_back(i.label(dim));
  const bool real = p.isReal() && p.eigenvectors.imag().isZero(0.0);
  std::vector<double> eigenvalues(p.eigenvalues.data(), p.eigenvalues.data() + p.eigenvalues.size());
  return {
      {"schema", kProjectedKernelSchema},
      {"schema_version", kProjectedKernelSchemaVersion},
      {"generator", kVersionString},
      {"config", config},
      {"metadata",
       {{"kernel", p.kernelName},
        {"alpha", p.alpha},
        {"measure", p.measure.name()},
        {"level", p.level},
        {"rank_max", p.rankMax},
        {"window", p.window.toString()},
        {"quadrature",
         {{"order", p.quadratureOrder},
          {"tolerance", p.quadratureTolerance},
          {"max_error_estimate", p.quadratureError}}},
        {"size", p.size()},
        {"real", real}}},
      {"indices", labels},
      {"matrix", rowMajor(p.matrix, !real)},
      {"eigenvalues", eigenvalues},
      {"eigenvectors", rowMajor(p.eigenvectors, !real)},
  };
}

ProjectedKernel projectedFromJson(const nlohmann::json& j) {
  if (j.value("schema", "") != kProjectedKernelSchema) {
    throw std::invalid_argument("not a projected-kernel file (schema '" + j.value("schema", "") + "')");
  }
  if (j.value("schema_version", 0) != kProjectedKernelSchemaVersion) {
    throw std::invalid_argument("unsupported projected-kernel schema version " +
                                std::to_string(j.value("schema_version", 0)));
  }
  ProjectedKernel p;
  const auto& m = j.at("metadata");
  p.kernelName = m.at("kernel").get<std::string>();
  p.alpha = m.at("alpha").get<double>();
  p.measure = parseMeasure(m.at("measure").get<std::string>());
  p.level = m.at("level").get<int>();
  p.rankMax = m.at("rank_max").get<int>();
  p.window = parseWindow(m.at("window").get<std::string>());
  p.quadratureOrder = m.at("quadrature").at("order").get<int>();
  p.quadratureTolerance = m.at("quadrature").at("tolerance").get<double>();
  p.quadratureError = m.at("quadrature").at("max_error_estimate").get<double>();
  for (const auto& label : j.at("indices")) {
    p.indices.push_back(parseTreeIndex(label.get<std::string>(), p.level, p.measure.dimension()));
  }
  p.matrix = fromRowMajor(j.at("matrix"));
  const auto ev = j.at("eigenvalues").get<std::vector<double>>();
  p.eigenvalues = Eigen::Map<const Eigen::VectorXd>(ev.data(), Eigen::Index(ev.size()));
  p.eigenvectors = fromRowMajor(j.at("eigenvectors"));
  const auto n = Eigen::Index(p.indices.size());
  if (p.matrix.rows() != n || p.matrix.cols() != n || p.eigenvalues.size() != n ||
      p.eigenvectors.rows() != n || p.eigenvectors.cols() != n) {
    throw std::invalid_argument("projected-kernel file has inconsistent sizes");
  }
  return p;
}

std::string formatDouble(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string csvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string readTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void writeTextFile(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace treedpp
