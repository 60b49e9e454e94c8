#pragma once

#include <span>
#include <vector>

#include "dustlab/core.hpp"
#include "dustlab/integrator.hpp"

namespace dustlab {

/// Geometry-dispatching view of the characteristic ODE system: flat state
/// layout, right-hand side and conversion back to marker snapshots.
class CharacteristicSystem {
 public:
  CharacteristicSystem(Geometry geometry, int dimension, double lambda, std::vector<double> masses);

  static CharacteristicSystem from_markers(Geometry geometry, int dimension, double lambda,
                                           std::span<const LagrangianMarker> markers);

  Geometry geometry() const noexcept { return geometry_; }
  int dimension() const noexcept { return dimension_; }
  double lambda() const noexcept { return lambda_; }
  std::size_t marker_count() const noexcept { return masses_.size(); }
  std::size_t fields() const noexcept;
  std::size_t state_size() const noexcept { return fields() * marker_count(); }
  std::span<const double> masses() const noexcept { return masses_; }

  void rhs(std::span<const double> y, std::span<double> dydt) const;
  std::vector<double> pack(std::span<const LagrangianMarker> markers) const;
  Snapshot snapshot(double t, std::span<const double> y, std::span<const double> dydt) const;

  DormandPrince45 make_stepper() const;

 private:
  Geometry geometry_;
  int dimension_;
  double lambda_;
  std::vector<double> masses_;
};

} // namespace dustlab
