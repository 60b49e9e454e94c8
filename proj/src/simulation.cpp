#include "dustlab/simulation.hpp"

#include <algorithm>
#include <cmath>

#include "dustlab/detector.hpp"
#include "dustlab/functional.hpp"
#include "dustlab/system.hpp"

namespace dustlab {

namespace {

std::vector<double> stop_times(const Scenario& s) {
  std::vector<double> stops;
  for (double t : s.snapshot_times)
    if (t > 0.0 && t < s.t_end) stops.push_back(t);
  if (s.numerics.output_interval > 0.0) {
    for (long k = 1;; ++k) {
      const double t = static_cast<double>(k) * s.numerics.output_interval;
      if (t >= s.t_end) break;
      stops.push_back(t);
    }
  }
  stops.push_back(s.t_end);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
  return stops;
}

bool is_requested(const Scenario& s, double t) {
  return std::binary_search(s.snapshot_times.begin(), s.snapshot_times.end(), t);
}

} // namespace

Trajectory simulate(const ValidatedScenario& vs) {
  const Scenario& s = vs.scenario();
  const NumericalSettings& ns = s.numerics;
  const auto markers = initial_markers(vs);
  const auto system = CharacteristicSystem::from_markers(s.geometry, s.dimension, s.lambda, markers);
  auto stepper = system.make_stepper();

  Trajectory traj;
  traj.geometry = s.geometry;
  traj.dimension = s.dimension;
  traj.lambda = s.lambda;
  traj.v_sup = s.v_sup;
  traj.t_end = s.t_end;
  traj.numerics = ns;

  std::vector<double> y = system.pack(markers);
  std::vector<double> k(y.size());
  system.rhs(y, k);
  double t = 0.0;

  auto record = [&](Snapshot snap) {
    traj.diagnostics.push_back(functional::diagnostics(snap, s.lambda, s.v_sup));
    traj.steps.push_back(std::move(snap));
  };
  record(system.snapshot(t, y, k));
  if (is_requested(s, 0.0)) traj.snapshot_steps.push_back(0);
  if (detector::scan_step(traj.steps.back(), traj.steps.back(), ns))
    throw Error(ErrorCode::PreconditionViolated, "initial state already triggers the blowup detector");

  const auto stops = stop_times(s);
  std::size_t next_stop = 0;
  const double h_max = ns.max_step > 0.0 ? std::min(ns.max_step, s.t_end) : s.t_end;
  double h = stepper.initial_step(t, y, k, ns.rel_tol, ns.abs_tol, h_max);
  std::int64_t attempts = 0;

  while (next_stop < stops.size()) {
    const double target = stops[next_stop];
    const double remaining = target - t;
    if (remaining <= 1e-14 * std::max(1.0, std::abs(t))) {
      if (is_requested(s, target)) traj.snapshot_steps.push_back(traj.steps.size() - 1);
      ++next_stop;
      continue;
    }
    if (++attempts > ns.max_steps)
      throw Error(ErrorCode::MaxStepsExceeded, "step budget exhausted at t = " + std::to_string(t));

    const bool lands = std::min(h, h_max) >= remaining;
    const double h_try = lands ? remaining : std::min(h, h_max);
    auto trial = stepper.attempt(t, y, k, h_try, ns.rel_tol, ns.abs_tol);
    if (!trial.finite || trial.error_norm > 1.0) {
      ++traj.rejected_steps;
      h = trial.finite ? DormandPrince45::next_step(h_try, trial.error_norm) : 0.25 * h_try;
      if (h < 1e-14 * std::max(1.0, std::abs(t)))
        throw Error(ErrorCode::StepUnderflow, "step size collapsed at t = " + std::to_string(t));
      continue;
    }

    const double t_new = lands ? target : t + h_try;
    Snapshot snap = system.snapshot(t_new, trial.y, trial.dydt);
    if (detector::scan_step(traj.steps.back(), snap, ns)) {
      traj.event = detector::bracket_event(system, ns, traj.steps.back(), t_new, s.v_sup);
      break;
    }

    y = std::move(trial.y);
    k = std::move(trial.dydt);
    t = t_new;
    record(std::move(snap));

    const double proposal = DormandPrince45::next_step(h_try, trial.error_norm);
    h = lands ? std::max(proposal, h) : proposal;
    if (lands) {
      if (is_requested(s, target)) traj.snapshot_steps.push_back(traj.steps.size() - 1);
      ++next_stop;
    }
  }
  return traj;
}

} // namespace dustlab
