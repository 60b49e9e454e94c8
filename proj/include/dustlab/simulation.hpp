#pragma once

#include "dustlab/core.hpp"
#include "dustlab/trajectory.hpp"

namespace dustlab {

/// Integrates a validated scenario with adaptive Dormand-Prince 5(4) until
/// t_end or the first detector event. Records a snapshot and diagnostics
/// at every accepted step; steps are clipped to land exactly on requested
/// snapshot times and on multiples of numerics.output_interval.
///
/// Throws Error(StepUnderflow) or Error(MaxStepsExceeded).
Trajectory simulate(const ValidatedScenario& scenario);

} // namespace dustlab
