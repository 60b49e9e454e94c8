#pragma once

#include <optional>
#include <string>

#include "dustlab/core.hpp"
#include "dustlab/system.hpp"
#include "dustlab/trajectory.hpp"

/// Blowup detection. C^2 breakdown along dust characteristics shows up as
/// shell crossing, |div u| -> infinity and rho -> infinity together; each
/// is watched with its own threshold and the first in priority order wins.
namespace dustlab::detector {

struct RawTrigger {
  TriggerKind kind;
  std::size_t marker_index;
};

/// First trigger (crossing > divergence > density) holding at `next`.
/// Crossing means an adjacent gap below the threshold, including negative
/// gaps from swapped markers; in radial geometry the innermost shell's
/// distance to the centre counts as a gap.
std::optional<RawTrigger> scan_step(const Snapshot& prev, const Snapshot& next, const NumericalSettings& settings);

/// Bisects the step [prev.time, t_next] with single re-integrated
/// sub-steps from `prev` until the bracket is at most 1e-8 * max(1, t_next)
/// wide. Throws PreconditionViolated if a trigger already holds at `prev`
/// or none holds at t_next, and BracketStall if bisection cannot converge.
BlowupEvent bracket_event(const CharacteristicSystem& system, const NumericalSettings& settings,
                          const Snapshot& prev, double t_next, double v_sup);

enum class EscapeKind {
  CertificateHonored,
  SupportEscaped,      // bounded-volume hypothesis failed before T_bound
  Contradiction,
  NoPredictionNoEvent,
  EventWithoutPrediction,
  HorizonBeforeBound,  // run ended before T_bound with bounded support
};

const char* to_string(EscapeKind kind);

struct EscapeReport {
  EscapeKind kind = EscapeKind::NoPredictionNoEvent;
  std::string message;
  std::optional<double> escape_time; // first step with support above v_sup
};

EscapeReport escape_report(const Trajectory& trajectory, double v_sup, const BlowupCertificate& certificate);

} // namespace dustlab::detector
