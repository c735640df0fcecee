#include "treedpp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include <boost/math/special_functions/airy.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/bessel_prime.hpp>

#include "treedpp/errors.hpp"

namespace treedpp {

namespace {

constexpr double kDiagonalBranch = 1e-6;

template <class F>
double guarded(const char* what, double arg, F&& f) {
  double v;
  try {
    v = f();
  } catch (const std::exception& e) {
    throw NumericError(std::string(what) + "(" + std::to_string(arg) + ") failed: " + e.what());
  }
  if (!std::isfinite(v)) {
    throw NumericError(std::string(what) + "(" + std::to_string(arg) + ") is not finite");
  }
  return v;
}

// Kernels of the form K(x, y) = s (F(x) G(y) - G(x) F(y)) / (x - y) with
// F' = p G and G' = q F. Near the diagonal
//   K(x, x + h) = -s (N1 + N2 h / 2 + N3 h^2 / 6),  N_k = F G^(k) - G F^(k).
struct OdeCoefficients {
  double p, dp, d2p, q, dq, d2q;
};

OdeCoefficients airyCoefficients(double x) { return {1.0, 0.0, 0.0, x, 1.0, 0.0}; }

OdeCoefficients besselCoefficients(double alpha, double x) {
  const double a2 = alpha * alpha;
  return {0.5 / x,         -0.5 / (x * x),       1.0 / (x * x * x),
          0.5 * a2 / x - 0.5, -0.5 * a2 / (x * x), a2 / (x * x * x)};
}

double integrableSeries(double scale, double F, double G, const OdeCoefficients& c, double h) {
  const double F2 = F * F, G2 = G * G;
  const double n1 = c.q * F2 - c.p * G2;
  const double n2 = c.dq * F2 - c.dp * G2;
  const double n3 = (c.d2q + c.q * c.q * c.p) * F2 - (c.d2p + c.p * c.p * c.q) * G2 +
                    F * G * (c.dq * c.p - c.dp * c.q);
  return -scale * (n1 + 0.5 * n2 * h + n3 * h * h / 6.0);
}

struct AiryValues {
  double ai, aip;
};
AiryValues airyValues(double x) {
  return {guarded("Ai", x, [&] { return boost::math::airy_ai(x); }),
          guarded("Ai'", x, [&] { return boost::math::airy_ai_prime(x); })};
}

// F = J_a(sqrt x), G = sqrt(x) J_a'(sqrt x).
struct BesselValues {
  double f, g;
};
BesselValues besselValues(double alpha, double x) {
  if (x == 0.0) return {0.0, 0.0};  // J_a(0) = 0 for a >= 1
  const double u = std::sqrt(x);
  return {guarded("J", x, [&] { return boost::math::cyl_bessel_j(alpha, u); }),
          u * guarded("J'", x, [&] { return boost::math::cyl_bessel_j_prime(alpha, u); })};
}

double airyFromValues(double x, AiryValues vx, double y, AiryValues vy) {
  // Expand around the smaller argument so K(x, y) and K(y, x) coincide bitwise.
  if (y < x) {
    std::swap(x, y);
    std::swap(vx, vy);
  }
  const double h = y - x;
  if (h < kDiagonalBranch) return integrableSeries(1.0, vx.ai, vx.aip, airyCoefficients(x), h);
  return (vx.ai * vy.aip - vx.aip * vy.ai) / (x - y);
}

double besselFromValues(double alpha, double x, BesselValues vx, double y, BesselValues vy) {
  if (y < x) {
    std::swap(x, y);
    std::swap(vx, vy);
  }
  const double h = y - x;
  if (x == 0.0 && h == 0.0) return 0.0;
  if (h < kDiagonalBranch * std::min(1.0, x)) {
    return integrableSeries(0.5, vx.f, vx.g, besselCoefficients(alpha, x), h);
  }
  return (vx.f * vy.g - vx.g * vy.f) / (2.0 * (x - y));
}

void checkBesselArgs(double alpha, double x, double y) {
  if (!(alpha >= 1.0)) throw DomainError("Bessel kernel requires alpha >= 1");
  if (x < 0.0 || y < 0.0) throw DomainError("Bessel kernel requires x, y >= 0");
}

}  // namespace

double evalSine(double x, double y) {
  const double t = x - y;
  if (std::abs(t) < kDiagonalBranch) return (1.0 - t * t / 6.0) / std::numbers::pi;
  return std::sin(t) / (std::numbers::pi * t);
}

double evalAiry(double x, double y) { return airyFromValues(x, airyValues(x), y, airyValues(y)); }

double evalBessel(double alpha, double x, double y) {
  checkBesselArgs(alpha, x, y);
  return besselFromValues(alpha, x, besselValues(alpha, x), y, besselValues(alpha, y));
}

Complex evalGinibre(const Point& x, const Point& y) {
  const Complex z(x.x, x.y), w(y.x, y.y);
  const Complex e = z * std::conj(w);
  if (e.real() > kGinibreExponentLimit) {
    throw RangeError("Ginibre kernel overflows: Re(x conj(y)) = " + std::to_string(e.real()));
  }
  return std::exp(e);
}

ContinuousKernel ContinuousKernel::sine(double bound) {
  return {KernelKind::Sine, ReferenceMeasure(MeasureKind::Lebesgue1D), bound};
}

ContinuousKernel ContinuousKernel::airy(double bound) {
  return {KernelKind::Airy, ReferenceMeasure(MeasureKind::Lebesgue1D), bound};
}

ContinuousKernel ContinuousKernel::bessel(double alpha, double bound) {
  if (!(alpha >= 1.0)) throw DomainError("Bessel kernel requires alpha >= 1");
  return {KernelKind::Bessel, ReferenceMeasure(MeasureKind::LebesgueHalfLine), bound, alpha};
}

ContinuousKernel ContinuousKernel::ginibre(double bound) {
  return {KernelKind::Ginibre, ReferenceMeasure(MeasureKind::GaussianPlane), bound};
}

std::string ContinuousKernel::name() const {
  switch (kind_) {
    case KernelKind::Sine: return "sine";
    case KernelKind::Airy: return "airy";
    case KernelKind::Bessel: return "bessel";
    case KernelKind::Ginibre: return "ginibre";
    case KernelKind::FiniteRank: return "finite-rank";
  }
  return "unknown";
}

void ContinuousKernel::checkWindow(const Point& p) const {
  if (kind_ == KernelKind::FiniteRank) return;
  const double norm = dimension() == 2 ? std::max(std::abs(p.x), std::abs(p.y)) : std::abs(p.x);
  if (!(norm <= bound_)) {
    throw DomainError(name() + " kernel evaluated outside its window (bound " +
                      std::to_string(bound_) + ")");
  }
  if (kind_ == KernelKind::Bessel && p.x < 0.0) throw DomainError("Bessel kernel requires x >= 0");
}

Complex ContinuousKernel::evaluate(const Point& x, const Point& y) const {
  checkWindow(x);
  checkWindow(y);
  switch (kind_) {
    case KernelKind::Sine: return evalSine(x.x, y.x);
    case KernelKind::Airy: return evalAiry(x.x, y.x);
    case KernelKind::Bessel: return evalBessel(alpha_, x.x, y.x);
    case KernelKind::Ginibre: return evalGinibre(x, y);
    case KernelKind::FiniteRank: {
      double sum = 0.0;
      for (const auto& f : elements_) sum += f.value(x) * f.value(y);
      return sum;
    }
  }
  return 0.0;
}

NodeKernel ContinuousKernel::onNodes(std::vector<Point> nodes) const {
  NodeKernel nk;
  nk.kernel_ = this;
  for (const auto& p : nodes) checkWindow(p);
  if (kind_ == KernelKind::Airy) {
    for (const auto& p : nodes) {
      const auto v = airyValues(p.x);
      nk.f_.push_back(v.ai);
      nk.g_.push_back(v.aip);
    }
  } else if (kind_ == KernelKind::Bessel) {
    for (const auto& p : nodes) {
      const auto v = besselValues(alpha_, p.x);
      nk.f_.push_back(v.f);
      nk.g_.push_back(v.g);
    }
  } else if (kind_ == KernelKind::FiniteRank) {
    // Element values per node, row-major: K(x_i, x_j) is a dot product of rows.
    for (const auto& p : nodes) {
      for (const auto& f : elements_) nk.f_.push_back(f.value(p));
    }
  }
  nk.nodes_ = std::move(nodes);
  return nk;
}

Complex NodeKernel::operator()(std::size_t i, std::size_t j) const {
  const Point& x = nodes_[i];
  const Point& y = nodes_[j];
  switch (kernel_->kind()) {
    case KernelKind::Sine: return evalSine(x.x, y.x);
    case KernelKind::Airy: return airyFromValues(x.x, {f_[i], g_[i]}, y.x, {f_[j], g_[j]});
    case KernelKind::Bessel:
      return besselFromValues(kernel_->alpha(), x.x, {f_[i], g_[i]}, y.x, {f_[j], g_[j]});
    case KernelKind::Ginibre: return evalGinibre(x, y);
    case KernelKind::FiniteRank: {
      const std::size_t r = kernel_->finiteRankElements().size();
      double sum = 0.0;
      for (std::size_t k = 0; k < r; ++k) sum += f_[i * r + k] * f_[j * r + k];
      return sum;
    }
  }
  return 0.0;
}

std::optional<Complex> ContinuousKernel::exactCellPairIntegral(const CellKey& a,
                                                              const CellKey& b) const {
  if (kind_ != KernelKind::FiniteRank) return std::nullopt;
  double sum = 0.0;
  for (const auto& f : elements_) sum += integralOver(f, a, measure_) * integralOver(f, b, measure_);
  return Complex(sum, 0.0);
}

std::optional<int> ContinuousKernel::constancyDepth() const {
  if (kind_ != KernelKind::FiniteRank) return std::nullopt;
  int depth = 0;
  for (const auto& f : elements_) depth = std::max(depth, f.finestDepth());
  return depth;
}

ContinuousKernel buildFiniteRankKernel(const std::vector<TreeIndex>& elements, int level,
                                       const ReferenceMeasure& measure) {
  ContinuousKernel k(KernelKind::FiniteRank, measure, std::numeric_limits<double>::infinity());
  k.fixtureLevel_ = level;
  std::set<CellKey> seen;
  for (const auto& i : elements) {
    if (i.level() != level) {
      throw std::invalid_argument("finite-rank element " + i.label(measure.dimension()) +
                                  " has level " + std::to_string(i.level()) + ", expected " +
                                  std::to_string(level));
    }
    if (!seen.insert(i.key()).second) {
      throw std::invalid_argument("duplicate finite-rank element " + i.label(measure.dimension()));
    }
    k.elements_.push_back(buildBasisFunction(i, measure));
  }
  return k;
}

}  // namespace treedpp
