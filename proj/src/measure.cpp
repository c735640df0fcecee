#include "treedpp/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>

namespace treedpp {

namespace {

bool gaussian(MeasureKind k) { return k == MeasureKind::GaussianPlane; }

// Mass of [a, b) under exp(-t^2)/sqrt(pi). Uses erfc on the tail side so
// cells far from the origin keep their relative accuracy.
double gaussianMass(double a, double b) {
  if (a >= 0.0) return 0.5 * (std::erfc(a) - std::erfc(b));
  if (b <= 0.0) return 0.5 * (std::erfc(-b) - std::erfc(-a));
  return 0.5 * (std::erf(b) - std::erf(a));
}

double gaussianQuantile(double a, double b, double u) {
  using boost::math::erf_inv;
  using boost::math::erfc_inv;
  if (a >= 0.0) {
    const double ca = std::erfc(a), cb = std::erfc(b);
    return erfc_inv(ca - u * (ca - cb));
  }
  if (b <= 0.0) {
    const double ca = std::erfc(-a), cb = std::erfc(-b);
    return -erfc_inv(ca - u * (ca - cb));
  }
  const double ea = std::erf(a), eb = std::erf(b);
  return erf_inv(ea + u * (eb - ea));
}

}  // namespace

std::string ReferenceMeasure::name() const {
  switch (kind_) {
    case MeasureKind::Lebesgue1D: return "lebesgue";
    case MeasureKind::LebesgueHalfLine: return "lebesgue-half-line";
    case MeasureKind::GaussianPlane: return "gaussian-plane";
  }
  return "unknown";
}

double ReferenceMeasure::axisDensity(double t) const {
  if (gaussian(kind_)) return std::exp(-t * t) / std::sqrt(std::numbers::pi);
  if (kind_ == MeasureKind::LebesgueHalfLine && t < 0.0) return 0.0;
  return 1.0;
}

double ReferenceMeasure::density(const Point& p) const {
  if (gaussian(kind_)) return std::exp(-(p.x * p.x + p.y * p.y)) / std::numbers::pi;
  return axisDensity(p.x);
}

double ReferenceMeasure::axisMass(double lo, double hi) const {
  if (gaussian(kind_)) return gaussianMass(lo, hi);
  if (kind_ == MeasureKind::LebesgueHalfLine) {
    lo = std::max(lo, 0.0);
    hi = std::max(hi, 0.0);
  }
  return hi - lo;
}

double ReferenceMeasure::cellMass(const Box& box) const {
  double mass = axisMass(box.lo[0], box.hi[0]);
  if (box.dim == 2) mass *= axisMass(box.lo[1], box.hi[1]);
  return mass;
}

double ReferenceMeasure::axisQuantile(double lo, double hi, double u) const {
  double t = gaussian(kind_) ? gaussianQuantile(lo, hi, u) : lo + u * (hi - lo);
  if (!(t >= lo)) t = lo;
  if (t >= hi) t = std::nextafter(hi, lo);
  return t;
}

bool ReferenceMeasure::admits(const Box& box) const {
  if (box.dim != dimension()) return false;
  if (kind_ == MeasureKind::LebesgueHalfLine) return box.lo[0] >= 0.0;
  return true;
}

ReferenceMeasure parseMeasure(const std::string& name) {
  if (name == "lebesgue") return ReferenceMeasure(MeasureKind::Lebesgue1D);
  if (name == "lebesgue-half-line") return ReferenceMeasure(MeasureKind::LebesgueHalfLine);
  if (name == "gaussian-plane") return ReferenceMeasure(MeasureKind::GaussianPlane);
  throw std::invalid_argument("unknown reference measure '" + name + "'");
}

}  // namespace treedpp
