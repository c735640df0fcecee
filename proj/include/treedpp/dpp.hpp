#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "treedpp/projection.hpp"
#include "treedpp/rng.hpp"

namespace treedpp {

// Sorted positions into the kernel's index set.
using Subset = std::vector<std::size_t>;

// Determinantal law on {0, ..., N-1} with Hermitian kernel 0 <= K <= I.
class DiscreteDPP {
 public:
  // Eigenvalues outside [-eps, 1 + eps] are a NumericError; the rest are
  // clipped to [0, 1].
  explicit DiscreteDPP(const Eigen::MatrixXcd& kernel, double epsilon = kSpectrumEpsilon);
  explicit DiscreteDPP(const ProjectedKernel& projected, double epsilon = kSpectrumEpsilon);

  std::size_t size() const { return std::size_t(kernel_.rows()); }
  const Eigen::MatrixXcd& kernel() const { return kernel_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  std::size_t clipCount() const { return clipCount_; }

  // Spectral sampler: Bernoulli selection of eigenvectors, then sequential
  // conditional draws with Gram-Schmidt updates of the remaining span.
  Subset sample(Pcg32& rng) const;

 private:
  void clip(double epsilon);

  Eigen::MatrixXcd kernel_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXcd eigenvectors_;
  std::size_t clipCount_ = 0;
};

// Draw r uses Pcg32(seed, r); results are stored by draw index, so the output
// is the same for every thread count.
std::vector<Subset> sampleMany(const DiscreteDPP& dpp, std::uint64_t seed, std::size_t draws,
                               int threads);

// det K restricted to the tuple; duplicates are rejected.
double correlation(const DiscreteDPP& dpp, std::span<const std::size_t> tuple);

inline constexpr std::size_t kMaxEnumerationSize = 20;

// P(X = A) = |det(K - I_{A^c})| for every subset A, indexed by bit mask
// (bit k set iff k in A). Requires N <= 20.
std::vector<double> enumerateLaw(const DiscreteDPP& dpp);

Subset maskToSubset(std::uint64_t mask);
std::uint64_t subsetToMask(const Subset& subset);

// Joint law of per-group counts: group[k] is the group of position k.
using CountVector = std::vector<int>;
using CountHistogram = std::map<CountVector, std::size_t>;
CountVector groupCounts(const Subset& subset, std::span<const std::size_t> group, std::size_t groups);
CountHistogram sampleCountStatistics(const DiscreteDPP& dpp, std::span<const std::size_t> group,
                                     std::size_t groups, std::uint64_t seed, std::size_t draws,
                                     int threads);

}  // namespace treedpp
