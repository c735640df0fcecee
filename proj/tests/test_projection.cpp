#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "treedpp/errors.hpp"
#include "treedpp/io.hpp"
#include "treedpp/projection.hpp"
#include "treedpp/rng.hpp"

using namespace treedpp;

namespace {

Eigen::VectorXcd randomVector(Eigen::Index n, Pcg32& rng) {
  Eigen::VectorXcd v(n);
  for (Eigen::Index k = 0; k < n; ++k) v(k) = Complex(rng.uniform() - 0.5, rng.uniform() - 0.5);
  return v;
}

}  // namespace

TEST(Projection, FiniteRankKernelProjectsToItsOwnSpan) {
  const ReferenceMeasure m;
  const auto k = buildFiniteRankKernel({parseTreeIndex("0:0", 1, 1), parseTreeIndex("1:", 1, 1)}, 1, m);
  const TruncatedBasis basis(1, 3, parseWindow("0..2"), m);
  const auto p = projectKernel(k, basis, {});
  EXPECT_EQ(p.quadratureOrder, 0);
  EXPECT_NEAR(p.matrix.trace().real(), 2.0, 1e-13);
  EXPECT_LT((p.matrix * p.matrix - p.matrix).norm(), 1e-13);
  const auto pos0 = basis.position(parseTreeIndex("0:0", 1, 1));
  const auto pos1 = basis.position(parseTreeIndex("1:", 1, 1));
  ASSERT_TRUE(pos0 && pos1);
  EXPECT_NEAR(p.matrix(Eigen::Index(*pos0), Eigen::Index(*pos0)).real(), 1.0, 1e-14);
  EXPECT_NEAR(p.matrix(Eigen::Index(*pos1), Eigen::Index(*pos1)).real(), 1.0, 1e-14);
  const auto r = spectrumReport(p);
  EXPECT_NEAR(r.eigenvalues.maxCoeff(), 1.0, 1e-12);
}

TEST(Projection, SineKernelIsRealSymmetricWithContainedSpectrum) {
  const auto k = ContinuousKernel::sine();
  const TruncatedBasis basis(2, 4, parseWindow("-1..1"), k.measure());
  const auto p = projectKernel(k, basis, {});
  EXPECT_TRUE(p.isReal());
  EXPECT_LT((p.matrix - p.matrix.adjoint()).norm(), 1e-15);
  const auto r = spectrumReport(p);
  EXPECT_TRUE(r.contained);
  EXPECT_GE(r.rawMin, -kSpectrumEpsilon);
  EXPECT_LE(r.rawMax, 1.0 + kSpectrumEpsilon);
  // The span is all step functions on cells of width h = 1/16, and
  // sin t / t = 1 - t^2/6 + t^4/120 - ..., so
  // tr K_F = sum over cells of (1/h) int int K = (2/pi) (1 - h^2/36 + h^4/1800 - ...).
  const double h = 1.0 / 16.0;
  EXPECT_NEAR(r.trace, 2.0 / std::numbers::pi * (1.0 - h * h / 36.0 + std::pow(h, 4) / 1800.0), 1e-12);
  const Eigen::MatrixXcd& v = p.eigenvectors;
  EXPECT_LT((v.adjoint() * v - Eigen::MatrixXcd::Identity(v.cols(), v.cols())).norm(), 1e-12);
  EXPECT_LT((v * p.eigenvalues.cast<Complex>().asDiagonal() * v.adjoint() - p.matrix).norm(), 1e-12);
}

TEST(Projection, GinibreKernelIsHermitian) {
  const auto k = ContinuousKernel::ginibre();
  const TruncatedBasis basis(1, 2, parseWindow("-1..1,-1..1"), k.measure());
  const auto p = projectKernel(k, basis, {});
  EXPECT_FALSE(p.isReal());
  EXPECT_LT((p.matrix - p.matrix.adjoint()).norm(), 1e-15);
  const auto r = spectrumReport(p);
  EXPECT_GE(r.rawMin, -kSpectrumEpsilon);
  EXPECT_LE(r.rawMax, 1.0 + kSpectrumEpsilon);
}

TEST(Projection, BilinearIdentityHoldsForRandomCoefficients) {
  const auto k = ContinuousKernel::airy();
  const TruncatedBasis basis(1, 3, parseWindow("-1..1"), k.measure());
  const auto p = projectKernel(k, basis, {});
  Pcg32 rng(3);
  for (int trial = 0; trial < 3; ++trial) {
    const auto xi = randomVector(Eigen::Index(basis.size()), rng);
    const auto eta = randomVector(Eigen::Index(basis.size()), rng);
    const auto c = bilinearIdentityCheck(p, basis, k, xi, eta, 20);
    EXPECT_LT(std::abs(c.lhs - c.rhs), 1e-10) << c.lhs << " vs " << c.rhs;
  }
}

TEST(Projection, ReconstructionApproachesTheKernel) {
  const auto k = ContinuousKernel::sine();
  double previous = 1e9;
  for (int r : {2, 4, 6}) {
    const TruncatedBasis basis(1, r, parseWindow("0..1"), k.measure());
    const auto p = projectKernel(k, basis, {});
    double sq = 0.0;
    const int n = 40;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        const Point x{(a + 0.31) / n, 0}, y{(b + 0.77) / n, 0};
        sq += std::norm(reconstructKernel(p, basis, x, y) - k.evaluate(x, y));
      }
    }
    const double err = std::sqrt(sq / (n * n));
    EXPECT_LT(err, previous);
    previous = err;
  }
  EXPECT_LT(previous, 0.05);
}

TEST(Projection, MeasureMismatchIsRejected) {
  const TruncatedBasis basis(1, 1, parseWindow("0..1"), ReferenceMeasure(MeasureKind::LebesgueHalfLine));
  EXPECT_THROW(projectKernel(ContinuousKernel::sine(), basis, {}), std::invalid_argument);
}

TEST(Spectrum, OutOfRangeEigenvalueIsANumericError) {
  Eigen::MatrixXcd m(2, 2);
  m << 1.5, 0.0, 0.0, 0.2;
  const auto p = projectedFromMatrix({parseTreeIndex("0:", 1, 1), parseTreeIndex("1:", 1, 1)}, m, 1,
                                     ReferenceMeasure());
  EXPECT_THROW(spectrumReport(p), NumericError);
}

TEST(Spectrum, SmallViolationsAreClipped) {
  Eigen::MatrixXcd m(2, 2);
  m << 1.0 + 5e-9, 0.0, 0.0, -5e-9;
  const auto p = projectedFromMatrix({parseTreeIndex("0:", 1, 1), parseTreeIndex("1:", 1, 1)}, m, 1,
                                     ReferenceMeasure());
  const auto r = spectrumReport(p);
  EXPECT_EQ(r.clipCount, 2U);
  EXPECT_EQ(r.eigenvalues.minCoeff(), 0.0);
  EXPECT_EQ(r.eigenvalues.maxCoeff(), 1.0);
}

TEST(ProjectedKernelFile, RoundTripsExactly) {
  for (const auto& k : {ContinuousKernel::sine(), ContinuousKernel::ginibre()}) {
    const auto window = parseWindow(k.dimension() == 2 ? "-1..1,0..1" : "-1..1");
    const TruncatedBasis basis(2, 2, window, k.measure());
    const auto p = projectKernel(k, basis, {});
    const auto j = projectedToJson(p, {{"note", "test"}});
    EXPECT_EQ(j["schema"], kProjectedKernelSchema);
    EXPECT_EQ(j["schema_version"], kProjectedKernelSchemaVersion);
    EXPECT_EQ(j["config"]["note"], "test");
    const auto back = projectedFromJson(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(back.kernelName, p.kernelName);
    EXPECT_EQ(back.window, p.window);
    EXPECT_EQ(back.measure, p.measure);
    ASSERT_EQ(back.indices.size(), p.indices.size());
    for (std::size_t i = 0; i < p.indices.size(); ++i) EXPECT_EQ(back.indices[i], p.indices[i]);
    EXPECT_EQ(back.matrix, p.matrix);
    EXPECT_EQ(back.eigenvalues, p.eigenvalues);
    EXPECT_EQ(back.eigenvectors, p.eigenvectors);
  }
}

TEST(ProjectedKernelFile, RejectsOtherSchemas) {
  EXPECT_THROW(projectedFromJson({{"schema", "something-else"}}), std::invalid_argument);
  EXPECT_THROW(projectedFromJson({{"schema", kProjectedKernelSchema}, {"schema_version", 99}}),
               std::invalid_argument);
}

TEST(Format, DoublesRoundTrip) {
  for (double v : {0.0, 1.0, -2.5, std::numbers::pi, 1e-300, 0.1 + 0.2}) {
    EXPECT_EQ(std::stod(formatDouble(v)), v);
  }
  EXPECT_EQ(csvField("a,b"), "\"a,b\"");
  EXPECT_EQ(csvField("plain"), "plain");
}
