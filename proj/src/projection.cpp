#include "treedpp/projection.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>

#include <lapacke.h>

#include "treedpp/errors.hpp"
#include "treedpp/parallel.hpp"
#include "treedpp/quadrature.hpp"

namespace treedpp {

namespace {

// Node blocks of one rule for every cell, contiguous per cell.
struct CellNodes {
  WeightedNodes nodes;
  std::vector<std::size_t> offset;  // size cells + 1
};

CellNodes cellNodes(const Partition& cells, const GaussLegendreRule& rule) {
  CellNodes out;
  out.offset.push_back(0);
  for (const auto& c : cells.cells()) {
    out.nodes.append(boxRule(c.box, cells.measure(), rule));
    out.offset.push_back(out.nodes.points.size());
  }
  return out;
}

Complex blockSum(const NodeKernel& k, const CellNodes& cn, std::size_t a, std::size_t b) {
  const auto& w = cn.nodes.weights;
  Complex sum = 0.0;
  for (auto i = cn.offset[a]; i < cn.offset[a + 1]; ++i) {
    Complex inner = 0.0;
    for (auto j = cn.offset[b]; j < cn.offset[b + 1]; ++j) inner += w[j] * k(i, j);
    sum += w[i] * inner;
  }
  return sum;
}

// Integral of K over box x box for a 1D cell: twice the real part of the
// lower triangle y <= x, mapped to the unit square by x = lo + h s,
// y = lo + h s v. Cells at the origin of the half line use s = u^2, v = w^2.
Complex diagonalSplit(const ContinuousKernel& kernel, const Box& box, const GaussLegendreRule& rule) {
  const auto& m = kernel.measure();
  const bool graded = isGradedCell(box, m);
  const double lo = box.lo[0], h = box.width(0);
  double sum = 0.0;
  const auto n = rule.nodes.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double u = 0.5 * (rule.nodes[i] + 1.0), wu = 0.5 * rule.weights[i];
    const double s = graded ? u * u : u;
    const double x = lo + h * s;
    for (std::size_t j = 0; j < n; ++j) {
      const double t = 0.5 * (rule.nodes[j] + 1.0), wt = 0.5 * rule.weights[j];
      const double v = graded ? t * t : t;
      const double y = lo + h * s * v;
      const double jac = graded ? 4.0 * h * h * u * u * u * t : h * h * s;
      sum += wu * wt * jac * kernel.evaluate({x, 0.0}, {y, 0.0}).real() * m.axisDensity(x) *
             m.axisDensity(y);
    }
  }
  return 2.0 * sum;
}

Eigen::MatrixXcd oneDimensional(const ContinuousKernel& kernel, const Partition& cells, int order,
                                int threads) {
  const auto rule = gaussLegendre(order);
  const auto cn = cellNodes(cells, rule);
  const auto nk = kernel.onNodes(cn.nodes.points);
  const std::size_t n = cells.size();
  Eigen::MatrixXcd g(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  parallelFor(n, threads, [&](std::size_t a) {
    for (std::size_t b = 0; b < a; ++b) {
      const Complex v = blockSum(nk, cn, a, b);
      g(Eigen::Index(a), Eigen::Index(b)) = v;
      g(Eigen::Index(b), Eigen::Index(a)) = std::conj(v);
    }
    g(Eigen::Index(a), Eigen::Index(a)) = diagonalSplit(kernel, cells.cells()[a].box, rule);
  });
  return g;
}

// exp(z conj(w)) = exp(z w1) exp(-i z w2) separates in the coordinates of
// the second argument, so the inner integral over a cell is a product of two
// one-dimensional sums.
Eigen::MatrixXcd ginibre(const ContinuousKernel& kernel, const Partition& cells, int order, int threads) {
  const auto& m = kernel.measure();
  const auto window = cells.window().box();
  kernel.evaluate({window.lo[0], window.lo[1]}, {window.hi[0], window.hi[1]});
  kernel.evaluate({window.hi[0], window.lo[1]}, {window.lo[0], window.hi[1]});

  const auto rule = gaussLegendre(order);
  const std::size_t q = rule.nodes.size();
  // Distinct axis intervals, each with q nodes t and weights c_t (density included).
  struct Axis {
    std::map<std::pair<double, double>, std::size_t> id;
    std::vector<double> t, c;
  };
  Axis axes[2];
  std::vector<std::array<std::size_t, 2>> cellAxis;
  for (const auto& cell : cells.cells()) {
    std::array<std::size_t, 2> ids{};
    for (int d = 0; d < 2; ++d) {
      const auto key = std::pair{cell.box.lo[std::size_t(d)], cell.box.hi[std::size_t(d)]};
      auto [it, inserted] = axes[d].id.try_emplace(key, axes[d].id.size());
      if (inserted) {
        const double half = 0.5 * (key.second - key.first);
        for (std::size_t k = 0; k < q; ++k) {
          const double t = key.first + half * (rule.nodes[k] + 1.0);
          axes[d].t.push_back(t);
          axes[d].c.push_back(half * rule.weights[k] * m.axisDensity(t));
        }
      }
      ids[std::size_t(d)] = it->second;
    }
    cellAxis.push_back(ids);
  }
  const std::size_t nx = axes[0].id.size(), ny = axes[1].id.size();
  const std::size_t n = cells.size();
  Eigen::MatrixXcd g(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));

  parallelFor(n, threads, [&](std::size_t a) {
    const std::size_t ax = cellAxis[a][0] * q, ay = cellAxis[a][1] * q;
    const double* x1 = &axes[0].t[ax];
    const double* x2 = &axes[1].t[ay];
    // A[k](i, j) = sum_{t in X_k} c_t exp(t x1_i) exp(i t x2_j)
    // B[k](i, j) = sum_{t in Y_k} c_t exp(-i t x1_i) exp(t x2_j)
    std::vector<Eigen::MatrixXcd> A(nx), B(ny);
    for (std::size_t k = 0; k < nx; ++k) {
      Eigen::MatrixXd p(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(q));
      Eigen::MatrixXcd r(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(q));
      for (std::size_t s = 0; s < q; ++s) {
        const double t = axes[0].t[k * q + s], c = axes[0].c[k * q + s];
        for (std::size_t i = 0; i < q; ++i) {
          p(Eigen::Index(s), Eigen::Index(i)) = c * std::exp(t * x1[i]);
          r(Eigen::Index(s), Eigen::Index(i)) = std::polar(1.0, t * x2[i]);
        }
      }
      A[k] = p.transpose().cast<Complex>() * r;
    }
    for (std::size_t k = 0; k < ny; ++k) {
      Eigen::MatrixXcd p(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(q));
      Eigen::MatrixXd r(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(q));
      for (std::size_t s = 0; s < q; ++s) {
        const double t = axes[1].t[k * q + s], c = axes[1].c[k * q + s];
        for (std::size_t i = 0; i < q; ++i) {
          p(Eigen::Index(s), Eigen::Index(i)) = std::polar(c, -t * x1[i]);
          r(Eigen::Index(s), Eigen::Index(i)) = std::exp(t * x2[i]);
        }
      }
      B[k] = p.transpose() * r.cast<Complex>();
    }
    Eigen::MatrixXd wa(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(q));
    for (std::size_t i = 0; i < q; ++i) {
      for (std::size_t j = 0; j < q; ++j) {
        wa(Eigen::Index(i), Eigen::Index(j)) = axes[0].c[ax + i] * axes[1].c[ay + j];
      }
    }
    const Eigen::ArrayXXcd weights = wa.cast<Complex>().array();
    for (std::size_t b = 0; b <= a; ++b) {
      const auto& Ab = A[cellAxis[b][0]];
      const auto& Bb = B[cellAxis[b][1]];
      const Complex v = (weights * Ab.array() * Bb.array()).sum();
      g(Eigen::Index(a), Eigen::Index(b)) = v;
      g(Eigen::Index(b), Eigen::Index(a)) = std::conj(v);
    }
  });
  return g;
}

Eigen::MatrixXcd quadratureMatrix(const ContinuousKernel& kernel, const Partition& cells, int order,
                                  int threads) {
  if (kernel.kind() == KernelKind::Ginibre) return ginibre(kernel, cells, order, threads);
  if (kernel.dimension() == 1) return oneDimensional(kernel, cells, order, threads);
  throw std::logic_error("no cell-pair quadrature for kernel " + kernel.name());
}

}  // namespace

bool ProjectedKernel::isReal() const { return matrix.imag().isZero(0.0); }

void decompose(ProjectedKernel& p) {
  p.matrix = (0.5 * (p.matrix + p.matrix.adjoint())).eval();
  const auto n = p.matrix.rows();
  p.eigenvalues.resize(n);
  if (n == 0) {
    p.eigenvectors.resize(0, 0);
    return;
  }
  int info = 0;
  if (p.isReal()) {
    Eigen::MatrixXd a = p.matrix.real();
    info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', lapack_int(n), a.data(), lapack_int(n),
                          p.eigenvalues.data());
    p.eigenvectors = a.cast<Complex>();
  } else {
    Eigen::MatrixXcd a = p.matrix;
    info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', lapack_int(n),
                          reinterpret_cast<lapack_complex_double*>(a.data()), lapack_int(n),
                          p.eigenvalues.data());
    p.eigenvectors = std::move(a);
  }
  if (info != 0) throw NumericError("Hermitian eigensolver failed (info " + std::to_string(info) + ")");

  // O(n^2) probe of V^H V = I: a non-orthonormal V moves a generic vector.
  Eigen::VectorXcd probe(n);
  for (Eigen::Index k = 0; k < n; ++k) probe(k) = Complex(std::cos(0.7 * double(k) + 0.3), std::sin(1.3 * double(k)));
  const Eigen::VectorXcd image = p.eigenvectors * probe;
  const double residual = (p.eigenvectors.adjoint() * image - probe).norm() / probe.norm();
  if (!(residual < 1e-8)) {
    throw NumericError("eigenvectors are not orthonormal (probe residual " + std::to_string(residual) + ")");
  }
}

CellPairMatrix cellPairIntegrals(const ContinuousKernel& kernel, const Partition& cells,
                                 const ProjectionOptions& options) {
  CellPairMatrix out;
  const std::size_t n = cells.size();
  if (kernel.kind() == KernelKind::FiniteRank) {
    const auto& fs = kernel.finiteRankElements();
    Eigen::MatrixXd g(Eigen::Index(n), Eigen::Index(fs.size()));
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t k = 0; k < fs.size(); ++k) {
        g(Eigen::Index(a), Eigen::Index(k)) = integralOver(fs[k], cells.cells()[a].key, cells.measure());
      }
    }
    out.values = (g * g.transpose()).cast<Complex>();
    return out;
  }
  if (options.order < 2) throw std::invalid_argument("quadrature order must be >= 2");
  out.values = quadratureMatrix(kernel, cells, options.order, options.threads);
  const Eigen::MatrixXcd coarse = quadratureMatrix(kernel, cells, options.order / 2, options.threads);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      const double norm = std::sqrt(cells.cells()[a].mass * cells.cells()[b].mass);
      const double e =
          std::abs(out.values(Eigen::Index(a), Eigen::Index(b)) - coarse(Eigen::Index(a), Eigen::Index(b))) /
          norm;
      if (e > out.maxError) {
        out.maxError = e;
        out.worstA = a;
        out.worstB = b;
      }
    }
  }
  return out;
}

ProjectedKernel projectKernel(const ContinuousKernel& kernel, const TruncatedBasis& basis,
                              const ProjectionOptions& options) {
  if (!(kernel.measure() == basis.measure())) {
    throw std::invalid_argument("kernel measure " + kernel.measure().name() +
                                " does not match basis measure " + basis.measure().name());
  }
  const auto& cells = basis.finestPartition();
  const auto g = cellPairIntegrals(kernel, cells, options);
  if (g.maxError > options.tolerance) {
    const int dim = basis.dimension();
    throw NumericError("cell-pair quadrature did not converge: estimate " + std::to_string(g.maxError) +
                       " > tolerance " + std::to_string(options.tolerance) + " on cells " +
                       cells.cells()[g.worstA].index().label(dim) + " x " +
                       cells.cells()[g.worstB].index().label(dim));
  }

  ProjectedKernel p;
  p.kernelName = kernel.name();
  p.alpha = kernel.alpha();
  p.measure = basis.measure();
  p.level = basis.level();
  p.rankMax = basis.rankMax();
  p.window = basis.window();
  p.quadratureOrder = kernel.kind() == KernelKind::FiniteRank ? 0 : options.order;
  p.quadratureTolerance = options.tolerance;
  p.quadratureError = g.maxError;
  p.indices = basis.indices();

  const Eigen::SparseMatrix<Complex> u = basis.finestCoefficients().cast<Complex>();
  const Eigen::MatrixXcd gu = g.values * u;
  p.matrix = u.transpose() * gu;
  if (kernel.isReal()) p.matrix = p.matrix.real().cast<Complex>();
  decompose(p);
  return p;
}

ProjectedKernel projectedFromMatrix(std::vector<TreeIndex> indices, const Eigen::MatrixXcd& matrix,
                                    int level, const ReferenceMeasure& measure) {
  if (matrix.rows() != matrix.cols() || std::size_t(matrix.rows()) != indices.size()) {
    throw std::invalid_argument("matrix size does not match the index list");
  }
  ProjectedKernel p;
  p.kernelName = "matrix";
  p.measure = measure;
  p.level = level;
  p.indices = std::move(indices);
  p.matrix = matrix;
  decompose(p);
  return p;
}

Complex reconstructKernel(const ProjectedKernel& p, const TruncatedBasis& basis, const Point& x,
                          const Point& y) {
  const auto& cells = basis.finestPartition();
  const auto cx = cells.locate(x);
  const auto cy = cells.locate(y);
  if (!cx || !cy) return 0.0;
  Complex sum = 0.0;
  for (const auto& [i, fi] : basis.functionsOnCell(*cx)) {
    for (const auto& [j, fj] : basis.functionsOnCell(*cy)) {
      sum += fi * fj * p.matrix(Eigen::Index(i), Eigen::Index(j));
    }
  }
  return sum;
}

BilinearCheck bilinearIdentityCheck(const ProjectedKernel& p, const TruncatedBasis& basis,
                                    const ContinuousKernel& kernel, const Eigen::VectorXcd& xi,
                                    const Eigen::VectorXcd& eta, int order) {
  BilinearCheck out;
  out.rhs = xi.dot(p.matrix * eta);  // dot conjugates its left argument

  const Eigen::SparseMatrix<Complex> u = basis.finestCoefficients().cast<Complex>();
  const Eigen::VectorXcd onCellsXi = u * xi;
  const Eigen::VectorXcd onCellsEta = u * eta;
  const auto& cells = basis.finestPartition();
  std::vector<std::size_t> supportXi, supportEta;
  for (Eigen::Index a = 0; a < onCellsXi.size(); ++a) {
    if (onCellsXi(a) != Complex(0.0)) supportXi.push_back(std::size_t(a));
    if (onCellsEta(a) != Complex(0.0)) supportEta.push_back(std::size_t(a));
  }
  // Composite tensor rule, one split per cell, no diagonal treatment.
  auto evaluateWith = [&](int q) {
    const auto rule = gaussLegendre(q);
    std::vector<WeightedNodes> nx, ny;
    for (auto a : supportXi) nx.push_back(cellRule(cells.cells()[a].key, 1, kernel.measure(), rule));
    for (auto b : supportEta) ny.push_back(cellRule(cells.cells()[b].key, 1, kernel.measure(), rule));
    Complex sum = 0.0;
    for (std::size_t ia = 0; ia < supportXi.size(); ++ia) {
      for (std::size_t ib = 0; ib < supportEta.size(); ++ib) {
        Complex block = 0.0;
        for (std::size_t k = 0; k < nx[ia].points.size(); ++k) {
          for (std::size_t l = 0; l < ny[ib].points.size(); ++l) {
            block += nx[ia].weights[k] * ny[ib].weights[l] *
                     kernel.evaluate(nx[ia].points[k], ny[ib].points[l]);
          }
        }
        sum += std::conj(onCellsXi(Eigen::Index(supportXi[ia]))) *
               onCellsEta(Eigen::Index(supportEta[ib])) * block;
      }
    }
    return sum;
  };
  out.lhs = evaluateWith(order);
  out.lhsErrorEstimate = std::abs(out.lhs - evaluateWith(std::max(1, order / 2)));
  return out;
}

SpectrumReport spectrumReport(const ProjectedKernel& p, double epsilon) {
  SpectrumReport r;
  r.eigenvalues = p.eigenvalues;
  if (p.eigenvalues.size() > 0) {
    r.rawMin = p.eigenvalues.minCoeff();
    r.rawMax = p.eigenvalues.maxCoeff();
  }
  for (Eigen::Index k = 0; k < r.eigenvalues.size(); ++k) {
    double& v = r.eigenvalues(k);
    if (v < -epsilon || v > 1.0 + epsilon) r.contained = false;
    if (v < 0.0 || v > 1.0) {
      ++r.clipCount;
      v = std::clamp(v, 0.0, 1.0);
    }
  }
  r.trace = p.matrix.trace().real();
  if (!r.contained) {
    throw NumericError("projected kernel spectrum leaves [-eps, 1 + eps]: min " +
                       std::to_string(r.rawMin) + ", max " + std::to_string(r.rawMax));
  }
  return r;
}

}  // namespace treedpp
