#include "treedpp/dpp.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "treedpp/errors.hpp"
#include "treedpp/parallel.hpp"

namespace treedpp {

DiscreteDPP::DiscreteDPP(const Eigen::MatrixXcd& kernel, double epsilon) {
  if (kernel.rows() != kernel.cols()) throw std::invalid_argument("DPP kernel must be square");
  auto p = projectedFromMatrix(std::vector<TreeIndex>(std::size_t(kernel.rows())), kernel, 1,
                               ReferenceMeasure());
  kernel_ = p.matrix;
  eigenvalues_ = p.eigenvalues;
  eigenvectors_ = p.eigenvectors;
  clip(epsilon);
}

DiscreteDPP::DiscreteDPP(const ProjectedKernel& projected, double epsilon)
    : kernel_(projected.matrix),
      eigenvalues_(projected.eigenvalues),
      eigenvectors_(projected.eigenvectors) {
  clip(epsilon);
}

void DiscreteDPP::clip(double epsilon) {
  for (Eigen::Index k = 0; k < eigenvalues_.size(); ++k) {
    double& v = eigenvalues_(k);
    if (v < -epsilon || v > 1.0 + epsilon) {
      throw NumericError("DPP kernel eigenvalue " + std::to_string(v) + " outside [0, 1]");
    }
    if (v < 0.0 || v > 1.0) {
      v = std::clamp(v, 0.0, 1.0);
      ++clipCount_;
    }
  }
}

Subset DiscreteDPP::sample(Pcg32& rng) const {
  const Eigen::Index n = kernel_.rows();
  std::vector<Eigen::Index> chosen;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (rng.uniform() < eigenvalues_(k)) chosen.push_back(k);
  }
  Eigen::MatrixXcd v(n, Eigen::Index(chosen.size()));
  for (std::size_t c = 0; c < chosen.size(); ++c) v.col(Eigen::Index(c)) = eigenvectors_.col(chosen[c]);

  Subset out;
  while (v.cols() > 0) {
    const Eigen::VectorXd weight = v.rowwise().squaredNorm();
    const double total = weight.sum();
    if (std::abs(total - double(v.cols())) > 1e-8 * double(v.cols())) {
      throw NumericError("sampler lost orthonormality: row weights sum to " + std::to_string(total) +
                         " with " + std::to_string(v.cols()) + " vectors left");
    }
    const double u = rng.uniform() * total;
    Eigen::Index item = n - 1;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      acc += weight(i);
      if (u < acc) {
        item = i;
        break;
      }
    }
    while (weight(item) <= 0.0) --item;  // guards the rounding tail of the cumulative sum
    out.push_back(std::size_t(item));

    // Project the span onto {e_item}^perp: eliminate the column with the
    // largest entry in that row, then re-orthonormalise.
    Eigen::Index pivot = 0;
    v.row(item).cwiseAbs().maxCoeff(&pivot);
    const Eigen::VectorXcd pc = v.col(pivot);
    const Complex pv = pc(item);
    Eigen::MatrixXcd rest(n, v.cols() - 1);
    for (Eigen::Index c = 0, r = 0; c < v.cols(); ++c) {
      if (c == pivot) continue;
      rest.col(r++) = v.col(c) - pc * (v(item, c) / pv);
    }
    for (Eigen::Index c = 0; c < rest.cols(); ++c) {
      rest(item, c) = 0.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index d = 0; d < c; ++d) rest.col(c) -= rest.col(d) * rest.col(d).dot(rest.col(c));
      }
      const double norm = rest.col(c).norm();
      if (!(norm > 1e-12)) throw NumericError("sampler span collapsed during Gram-Schmidt");
      rest.col(c) /= norm;
    }
    v = std::move(rest);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Subset> sampleMany(const DiscreteDPP& dpp, std::uint64_t seed, std::size_t draws,
                               int threads) {
  std::vector<Subset> out(draws);
  parallelFor(draws, threads, [&](std::size_t r) {
    Pcg32 rng(seed, r);
    out[r] = dpp.sample(rng);
  });
  return out;
}

double correlation(const DiscreteDPP& dpp, std::span<const std::size_t> tuple) {
  std::set<std::size_t> seen;
  for (auto i : tuple) {
    if (i >= dpp.size()) throw std::out_of_range("correlation index out of range");
    if (!seen.insert(i).second) throw std::invalid_argument("correlation tuple has a repeated index");
  }
  const auto m = Eigen::Index(tuple.size());
  Eigen::MatrixXcd sub(m, m);
  for (Eigen::Index p = 0; p < m; ++p) {
    for (Eigen::Index q = 0; q < m; ++q) {
      sub(p, q) = dpp.kernel()(Eigen::Index(tuple[std::size_t(p)]), Eigen::Index(tuple[std::size_t(q)]));
    }
  }
  return m == 0 ? 1.0 : sub.determinant().real();
}

Subset maskToSubset(std::uint64_t mask) {
  Subset out;
  for (std::size_t k = 0; mask != 0; ++k, mask >>= 1U) {
    if (mask & 1U) out.push_back(k);
  }
  return out;
}

std::uint64_t subsetToMask(const Subset& subset) {
  std::uint64_t mask = 0;
  for (auto k : subset) mask |= std::uint64_t(1) << k;
  return mask;
}

std::vector<double> enumerateLaw(const DiscreteDPP& dpp) {
  const std::size_t n = dpp.size();
  if (n > kMaxEnumerationSize) {
    throw std::invalid_argument("enumeration needs N <= " + std::to_string(kMaxEnumerationSize) +
                                ", got " + std::to_string(n));
  }
  std::vector<double> law(std::size_t(1) << n);
  for (std::uint64_t mask = 0; mask < law.size(); ++mask) {
    Eigen::MatrixXcd m = dpp.kernel();
    for (std::size_t k = 0; k < n; ++k) {
      if (!((mask >> k) & 1U)) m(Eigen::Index(k), Eigen::Index(k)) -= 1.0;
    }
    law[mask] = n == 0 ? 1.0 : std::abs(m.determinant());
  }
  return law;
}

CountVector groupCounts(const Subset& subset, std::span<const std::size_t> group, std::size_t groups) {
  CountVector c(groups, 0);
  for (auto k : subset) ++c[group[k]];
  return c;
}

CountHistogram sampleCountStatistics(const DiscreteDPP& dpp, std::span<const std::size_t> group,
                                     std::size_t groups, std::uint64_t seed, std::size_t draws,
                                     int threads) {
  if (group.size() != dpp.size()) throw std::invalid_argument("group map size does not match the DPP");
  const auto samples = sampleMany(dpp, seed, draws, threads);
  CountHistogram h;
  for (const auto& s : samples) ++h[groupCounts(s, group, groups)];
  return h;
}

}  // namespace treedpp
