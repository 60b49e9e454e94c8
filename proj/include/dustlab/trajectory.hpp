#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "dustlab/core.hpp"

namespace dustlab {

/// Observable proxies for loss of C^2 regularity, in priority order.
enum class TriggerKind { ShellCrossing, DivergenceThreshold, DensityThreshold };

const char* to_string(TriggerKind kind);

struct BlowupEvent {
  double t_lo = 0.0;
  double t_hi = 0.0;
  TriggerKind trigger = TriggerKind::DivergenceThreshold;
  std::size_t marker_index = 0;
  DiagnosticsRecord values_at_t_lo;
};

/// Accepted integrator steps of one run. `steps[k]` carries the full marker
/// state and rates; `diagnostics[k]` is computed from it.
struct Trajectory {
  Geometry geometry = Geometry::Slab1D;
  int dimension = 1;
  double lambda = 0.0;
  double v_sup = 1.0;
  double t_end = 0.0;
  NumericalSettings numerics;
  std::vector<Snapshot> steps;
  std::vector<DiagnosticsRecord> diagnostics;
  std::vector<std::size_t> snapshot_steps; // steps landing on requested snapshot times
  std::optional<BlowupEvent> event;
  std::size_t rejected_steps = 0;

  double final_time() const { return steps.empty() ? 0.0 : steps.back().time; }
};

} // namespace dustlab
