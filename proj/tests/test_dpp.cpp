#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "random_kernels.hpp"
#include "treedpp/dpp.hpp"
#include "treedpp/errors.hpp"

using namespace treedpp;

TEST(EnumerateLaw, TwoByTwoKernel) {
  Eigen::MatrixXcd k(2, 2);
  k << 0.6, 0.2, 0.2, 0.5;
  const auto law = enumerateLaw(DiscreteDPP(k));
  ASSERT_EQ(law.size(), 4U);
  EXPECT_NEAR(law[0b00], 0.16, 1e-14);
  EXPECT_NEAR(law[0b01], 0.34, 1e-14);
  EXPECT_NEAR(law[0b10], 0.24, 1e-14);
  EXPECT_NEAR(law[0b11], 0.26, 1e-14);
}

TEST(EnumerateLaw, MatchesTheLEnsembleForm) {
  // K = L (I + L)^{-1} gives P(X = A) = det L_A / det(I + L).
  Pcg32 rng(21);
  const Eigen::Index n = 5;
  Eigen::MatrixXcd b(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) b(i, j) = {rng.uniform() - 0.5, rng.uniform() - 0.5};
  }
  const Eigen::MatrixXcd l = b * b.adjoint();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd k = l * (id + l).inverse();
  const auto law = enumerateLaw(DiscreteDPP(k));
  const double z = (id + l).determinant().real();
  double total = 0.0;
  for (std::uint64_t mask = 0; mask < law.size(); ++mask) {
    const auto a = maskToSubset(mask);
    Eigen::MatrixXcd la(Eigen::Index(a.size()), Eigen::Index(a.size()));
    for (std::size_t p = 0; p < a.size(); ++p) {
      for (std::size_t q = 0; q < a.size(); ++q) la(Eigen::Index(p), Eigen::Index(q)) = l(Eigen::Index(a[p]), Eigen::Index(a[q]));
    }
    const double expected = (a.empty() ? 1.0 : la.determinant().real()) / z;
    EXPECT_NEAR(law[mask], expected, 1e-12) << "mask " << mask;
    total += law[mask];
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(EnumerateLaw, MarginalsAreCorrelationDeterminants) {
  Pcg32 rng(4);
  const DiscreteDPP dpp(fixtures::randomHermitianKernel(6, rng));
  const auto law = enumerateLaw(dpp);
  for (const Subset tuple : {Subset{0}, Subset{1, 4}, Subset{0, 2, 5}}) {
    const auto mask = subsetToMask(tuple);
    double marginal = 0.0;
    for (std::uint64_t m = 0; m < law.size(); ++m) {
      if ((m & mask) == mask) marginal += law[m];
    }
    EXPECT_NEAR(marginal, correlation(dpp, tuple), 1e-12);
  }
}

TEST(DiscreteDPP, SamplerFrequenciesMatchTheLaw) {
  Pcg32 rng(8);
  const DiscreteDPP dpp(fixtures::randomHermitianKernel(4, rng));
  const auto law = enumerateLaw(dpp);
  const std::size_t draws = 40000;
  std::vector<std::size_t> counts(law.size(), 0);
  for (const auto& s : sampleMany(dpp, 99, draws, 1)) ++counts[subsetToMask(s)];
  for (std::size_t mask = 0; mask < law.size(); ++mask) {
    const double p = law[mask];
    const double sd = std::sqrt(p * (1 - p) / double(draws));
    EXPECT_NEAR(double(counts[mask]) / double(draws), p, 4.0 * sd + 1e-12) << "mask " << mask;
  }
}

TEST(DiscreteDPP, ProjectionKernelsGiveFixedSize) {
  Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(5, 5);
  Pcg32 rng(2);
  const Eigen::MatrixXcd full = fixtures::randomHermitianKernel(5, rng);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(full);
  const Eigen::MatrixXcd v = es.eigenvectors().leftCols(3);
  k = v * v.adjoint();
  const DiscreteDPP dpp(k);
  for (const auto& s : sampleMany(dpp, 5, 200, 1)) EXPECT_EQ(s.size(), 3U);
}

TEST(DiscreteDPP, SamplesDoNotDependOnThreadCount) {
  Pcg32 rng(6);
  const DiscreteDPP dpp(fixtures::randomHermitianKernel(12, rng));
  EXPECT_EQ(sampleMany(dpp, 17, 500, 1), sampleMany(dpp, 17, 500, 4));
}

TEST(DiscreteDPP, SpectrumOutsideTheUnitIntervalIsRejected) {
  Eigen::MatrixXcd k(2, 2);
  k << 1.2, 0.0, 0.0, 0.3;
  EXPECT_THROW(DiscreteDPP{k}, NumericError);
  k << 1.0 + 1e-10, 0.0, 0.0, -1e-10;
  const DiscreteDPP clipped(k);
  EXPECT_EQ(clipped.clipCount(), 2U);
  EXPECT_EQ(clipped.eigenvalues().maxCoeff(), 1.0);
}

TEST(DiscreteDPP, EnumerationIsLimitedInSize) {
  const DiscreteDPP big(Eigen::MatrixXcd::Identity(21, 21) * 0.5);
  EXPECT_THROW(enumerateLaw(big), std::invalid_argument);
}

TEST(Correlation, RejectsRepeatedIndices) {
  const DiscreteDPP dpp(Eigen::MatrixXcd::Identity(3, 3) * 0.5);
  const std::vector<std::size_t> tuple = {0, 2, 0};
  EXPECT_THROW(correlation(dpp, tuple), std::invalid_argument);
  const std::vector<std::size_t> pair = {0, 2};
  EXPECT_NEAR(correlation(dpp, pair), 0.25, 1e-15);
}

TEST(CountStatistics, GroupsSumTheSelectedItems) {
  const std::vector<std::size_t> group = {0, 0, 1, 2};
  EXPECT_EQ(groupCounts({0, 1, 3}, group, 3), (CountVector{2, 0, 1}));
  Eigen::MatrixXcd k = Eigen::MatrixXcd::Identity(4, 4);
  const auto h = sampleCountStatistics(DiscreteDPP(k), group, 3, 1, 10, 1);
  ASSERT_EQ(h.size(), 1U);
  EXPECT_EQ(h.begin()->first, (CountVector{2, 1, 1}));
  EXPECT_EQ(h.begin()->second, 10U);
}
