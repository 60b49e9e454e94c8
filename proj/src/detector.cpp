#include "dustlab/detector.hpp"

#include <cmath>
#include <sstream>

#include "dustlab/functional.hpp"

namespace dustlab {

const char* to_string(TriggerKind kind) {
  switch (kind) {
    case TriggerKind::ShellCrossing: return "ShellCrossing";
    case TriggerKind::DivergenceThreshold: return "DivergenceThreshold";
    case TriggerKind::DensityThreshold: return "DensityThreshold";
  }
  return "Unknown";
}

namespace detector {

const char* to_string(EscapeKind kind) {
  switch (kind) {
    case EscapeKind::CertificateHonored: return "CertificateHonored";
    case EscapeKind::SupportEscaped: return "SupportEscaped";
    case EscapeKind::Contradiction: return "Contradiction";
    case EscapeKind::NoPredictionNoEvent: return "NoPredictionNoEvent";
    case EscapeKind::EventWithoutPrediction: return "EventWithoutPrediction";
    case EscapeKind::HorizonBeforeBound: return "HorizonBeforeBound";
  }
  return "Unknown";
}

std::optional<RawTrigger> scan_step(const Snapshot& /*prev*/, const Snapshot& next, const NumericalSettings& settings) {
  const auto& ms = next.markers;
  if (ms.empty()) return std::nullopt;
  if (next.geometry == Geometry::RadialND && ms[0].position < settings.crossing_gap_threshold)
    return RawTrigger{TriggerKind::ShellCrossing, 0};
  for (std::size_t j = 1; j < ms.size(); ++j) {
    if (ms[j].position - ms[j - 1].position < settings.crossing_gap_threshold)
      return RawTrigger{TriggerKind::ShellCrossing, j - 1};
  }
  for (std::size_t j = 0; j < ms.size(); ++j) {
    if (std::abs(divergence(ms[j], next.geometry, next.dimension)) > settings.div_blowup_threshold)
      return RawTrigger{TriggerKind::DivergenceThreshold, j};
  }
  for (std::size_t j = 0; j < ms.size(); ++j) {
    if (ms[j].density > settings.rho_blowup_threshold) return RawTrigger{TriggerKind::DensityThreshold, j};
  }
  return std::nullopt;
}

BlowupEvent bracket_event(const CharacteristicSystem& system, const NumericalSettings& settings,
                          const Snapshot& prev, double t_next, double v_sup) {
  if (scan_step(prev, prev, settings))
    throw Error(ErrorCode::PreconditionViolated, "trigger already holds at the start of the step");

  auto stepper = system.make_stepper();
  const std::vector<double> y0 = system.pack(prev.markers);
  std::vector<double> k0(y0.size());
  system.rhs(y0, k0);
  const double t0 = prev.time;

  struct Probe {
    Snapshot snapshot;
    std::optional<RawTrigger> trigger;
  };
  auto probe = [&](double h) {
    auto trial = stepper.attempt(t0, y0, k0, h, settings.rel_tol, settings.abs_tol);
    Probe p{system.snapshot(t0 + h, trial.y, trial.dydt), std::nullopt};
    p.trigger = scan_step(prev, p.snapshot, settings);
    if (!p.trigger && !trial.finite) {
      // Past the singularity within one sub-step: counts as triggered.
      std::size_t bad = 0;
      while (bad + 1 < p.snapshot.markers.size() && std::isfinite(p.snapshot.markers[bad].eig_radial) &&
             std::isfinite(p.snapshot.markers[bad].density))
        ++bad;
      p.trigger = RawTrigger{TriggerKind::DivergenceThreshold, bad};
    }
    return p;
  };

  double lo = 0.0, hi = t_next - t0;
  Probe at_hi = probe(hi);
  if (!at_hi.trigger) throw Error(ErrorCode::PreconditionViolated, "no trigger at the end of the step");

  const double width = 1e-8 * std::max(1.0, std::abs(t_next));
  int iterations = 0;
  while ((t0 + hi) - (t0 + lo) > width) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi) || ++iterations > 400)
      throw Error(ErrorCode::BracketStall, "bisection cannot shrink the bracket further");
    Probe p = probe(mid);
    if (p.trigger) {
      hi = mid;
      at_hi = std::move(p);
    } else {
      lo = mid;
    }
  }

  BlowupEvent ev;
  ev.t_lo = t0 + lo;
  ev.t_hi = t0 + hi;
  ev.trigger = at_hi.trigger->kind;
  ev.marker_index = at_hi.trigger->marker_index;
  const Snapshot low = lo > 0.0 ? probe(lo).snapshot : system.snapshot(t0, y0, k0);
  ev.values_at_t_lo = functional::diagnostics(low, system.lambda(), v_sup);
  return ev;
}

EscapeReport escape_report(const Trajectory& trajectory, double v_sup, const BlowupCertificate& certificate) {
  EscapeReport rep;
  for (const auto& s : trajectory.steps) {
    if (!functional::within_support_bound(functional::support_volume(s), v_sup)) {
      rep.escape_time = s.time;
      break;
    }
  }
  const auto& ev = trajectory.event;
  std::ostringstream os;
  os.precision(17);

  if (!certificate.t_bound) {
    if (ev) {
      rep.kind = EscapeKind::EventWithoutPrediction;
      os << "event at t in [" << ev->t_lo << ", " << ev->t_hi << "] without a certificate";
    } else {
      rep.kind = EscapeKind::NoPredictionNoEvent;
      os << "no prediction, no event";
    }
    rep.message = os.str();
    return rep;
  }

  const double bound = *certificate.t_bound;
  if (ev && ev->t_hi <= bound + 1e-6) {
    rep.kind = EscapeKind::CertificateHonored;
    os << "certificate honored: event at t_hi = " << ev->t_hi << " <= T_bound = " << bound;
  } else if (rep.escape_time && *rep.escape_time <= bound) {
    rep.kind = EscapeKind::SupportEscaped;
    os << "hypothesis violated: support escaped V_sup at t = " << *rep.escape_time
       << " before T_bound = " << bound << " - the certified scenarios cannot keep a bounded support";
  } else if (ev) {
    rep.kind = EscapeKind::Contradiction;
    os << "CONTRADICTION - investigate: event at t_hi = " << ev->t_hi << " after T_bound = " << bound
       << " with support bounded by V_sup";
  } else if (trajectory.final_time() < bound) {
    rep.kind = EscapeKind::HorizonBeforeBound;
    os << "inconclusive: run ended at t = " << trajectory.final_time() << " before T_bound = " << bound;
  } else {
    rep.kind = EscapeKind::Contradiction;
    os << "CONTRADICTION - investigate: no event by t = " << trajectory.final_time() << " past T_bound = " << bound
       << " with support bounded by V_sup";
  }
  rep.message = os.str();
  return rep;
}

} // namespace detector
} // namespace dustlab
