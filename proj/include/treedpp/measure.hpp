#pragma once

#include <string>

#include "treedpp/geometry.hpp"

namespace treedpp {

enum class MeasureKind { Lebesgue1D, LebesgueHalfLine, GaussianPlane };

// Reference measure m on S. GaussianPlane is (1/pi) exp(-|x|^2) dx on R^2,
// i.e. the product of two axis densities exp(-t^2)/sqrt(pi).
class ReferenceMeasure {
 public:
  explicit ReferenceMeasure(MeasureKind kind = MeasureKind::Lebesgue1D) : kind_(kind) {}

  MeasureKind kind() const { return kind_; }
  int dimension() const { return kind_ == MeasureKind::GaussianPlane ? 2 : 1; }
  std::string name() const;

  double density(const Point& p) const;
  double cellMass(const Box& box) const;

  // Mass of [lo, hi) under the axis marginal.
  double axisMass(double lo, double hi) const;
  double axisDensity(double t) const;
  // Inverse CDF of the axis marginal restricted to [lo, hi); u in [0, 1).
  // The result is clamped into [lo, hi).
  double axisQuantile(double lo, double hi, double u) const;

  // Boxes outside the measure's domain (x < 0 for the half line) are rejected.
  bool admits(const Box& box) const;

  bool operator==(const ReferenceMeasure&) const = default;

 private:
  MeasureKind kind_;
};

ReferenceMeasure parseMeasure(const std::string& name);

}  // namespace treedpp
