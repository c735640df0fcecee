#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "treedpp/basis.hpp"
#include "treedpp/kernels.hpp"
#include "treedpp/tree_index.hpp"

namespace treedpp {

struct ProjectionOptions {
  int order = 16;           // Gauss-Legendre points per axis and cell
  double tolerance = 1e-8;  // bound on the normalised cell-pair error estimate
  int threads = 1;
};

// K_F on a truncated index set with its eigendecomposition. Eigenvalues are
// the raw solver output (ascending); clipping happens in checkSpectrum.
struct ProjectedKernel {
  std::string kernelName;
  double alpha = 0.0;
  ReferenceMeasure measure;
  int level = 1;
  int rankMax = 1;
  Window window;
  int quadratureOrder = 0;  // 0 when the entries are exact
  double quadratureTolerance = 0.0;
  double quadratureError = 0.0;  // largest normalised cell-pair estimate

  std::vector<TreeIndex> indices;
  Eigen::MatrixXcd matrix;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd eigenvectors;  // columns, orthonormal

  std::size_t size() const { return indices.size(); }
  bool isReal() const;
};

// Symmetrises the matrix and fills eigenvalues/eigenvectors.
void decompose(ProjectedKernel& p);

ProjectedKernel projectKernel(const ContinuousKernel& kernel, const TruncatedBasis& basis,
                              const ProjectionOptions& options);

// Fixture constructor: an explicit Hermitian matrix on the given indices.
ProjectedKernel projectedFromMatrix(std::vector<TreeIndex> indices, const Eigen::MatrixXcd& matrix,
                                    int level, const ReferenceMeasure& measure);

// Cell-pair integrals G(a, b) = int_a int_b K dm dm on the finest partition of
// the basis, with the largest normalised error estimate.
struct CellPairMatrix {
  Eigen::MatrixXcd values;
  double maxError = 0.0;
  std::size_t worstA = 0, worstB = 0;
};
CellPairMatrix cellPairIntegrals(const ContinuousKernel& kernel, const Partition& cells,
                                 const ProjectionOptions& options);

// sum_{i,j} K_F(i,j) f_i(x) conj(f_j(y)) over the truncated set.
Complex reconstructKernel(const ProjectedKernel& p, const TruncatedBasis& basis, const Point& x,
                          const Point& y);

struct BilinearCheck {
  Complex lhs;
  Complex rhs;
  double lhsErrorEstimate = 0.0;
};
// lhs = int int K(x,y) conj(P_xi(x)) Q_eta(y) dm dm by an independent tensor
// rule; rhs = sum K_F(i,j) conj(xi_i) eta_j.
BilinearCheck bilinearIdentityCheck(const ProjectedKernel& p, const TruncatedBasis& basis,
                                    const ContinuousKernel& kernel, const Eigen::VectorXcd& xi,
                                    const Eigen::VectorXcd& eta, int order);

inline constexpr double kSpectrumEpsilon = 1e-8;

struct SpectrumReport {
  Eigen::VectorXd eigenvalues;  // clipped to [0, 1]
  double rawMin = 0.0;
  double rawMax = 0.0;
  std::size_t clipCount = 0;
  double trace = 0.0;
  bool contained = true;
};
// Throws NumericError when an eigenvalue lies outside [-eps, 1 + eps].
SpectrumReport spectrumReport(const ProjectedKernel& p, double epsilon = kSpectrumEpsilon);

}  // namespace treedpp
