#include "dustlab/system.hpp"

#include "dustlab/radial.hpp"
#include "dustlab/slab.hpp"

namespace dustlab {

CharacteristicSystem::CharacteristicSystem(Geometry geometry, int dimension, double lambda,
                                           std::vector<double> masses)
    : geometry_(geometry),
      dimension_(geometry == Geometry::Slab1D ? 1 : dimension),
      lambda_(lambda),
      masses_(std::move(masses)) {}

CharacteristicSystem CharacteristicSystem::from_markers(Geometry geometry, int dimension, double lambda,
                                                        std::span<const LagrangianMarker> markers) {
  std::vector<double> masses;
  masses.reserve(markers.size());
  for (const auto& m : markers) masses.push_back(m.mass_weight);
  return CharacteristicSystem(geometry, dimension, lambda, std::move(masses));
}

std::size_t CharacteristicSystem::fields() const noexcept {
  return geometry_ == Geometry::Slab1D ? slab::kFields : radial::kFields;
}

void CharacteristicSystem::rhs(std::span<const double> y, std::span<double> dydt) const {
  if (geometry_ == Geometry::Slab1D) slab::rhs_flat(masses_, lambda_, y, dydt);
  else radial::rhs_flat(masses_, dimension_, lambda_, y, dydt);
}

std::vector<double> CharacteristicSystem::pack(std::span<const LagrangianMarker> markers) const {
  std::vector<double> y(state_size());
  if (geometry_ == Geometry::Slab1D) slab::pack(markers, y);
  else radial::pack(markers, y);
  return y;
}

Snapshot CharacteristicSystem::snapshot(double t, std::span<const double> y, std::span<const double> dydt) const {
  Snapshot s;
  s.geometry = geometry_;
  s.dimension = dimension_;
  s.time = t;
  s.markers.resize(marker_count());
  if (geometry_ == Geometry::Slab1D) slab::unpack(y, masses_, s.markers);
  else radial::unpack(y, masses_, s.markers);
  if (!dydt.empty()) {
    const std::size_t f = fields();
    s.rates.resize(marker_count());
    for (std::size_t j = 0; j < marker_count(); ++j) {
      auto& r = s.rates[j];
      r.position = dydt[f * j];
      r.velocity = dydt[f * j + 1];
      r.density = dydt[f * j + 2];
      r.eig_radial = dydt[f * j + 3];
      r.eig_tangential = f > 4 ? dydt[f * j + 4] : 0.0;
    }
  }
  return s;
}

DormandPrince45 CharacteristicSystem::make_stepper() const {
  // The stepper keeps its own copy so it stays valid independently of *this.
  auto self = *this;
  return DormandPrince45([self](double, std::span<const double> y, std::span<double> dydt) { self.rhs(y, dydt); },
                         state_size());
}

} // namespace dustlab
