#pragma once

#include <functional>
#include <span>
#include <vector>

namespace dustlab {

/// Right-hand side y' = f(t, y). Implementations may write non-finite
/// values to signal a state outside the domain of the system; the stepper
/// then rejects the step.
using OdeRhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

/// Embedded Dormand-Prince 5(4) pair with FSAL. Only the single-step
/// kernel and the step-size controller live here; drivers own the loop so
/// they can interleave event detection.
class DormandPrince45 {
 public:
  struct Trial {
    std::vector<double> y;
    std::vector<double> dydt; // f(t + h, y), reusable as the next first stage
    double error_norm = 0.0;  // <= 1 means acceptable
    bool finite = true;
  };

  DormandPrince45(OdeRhs rhs, std::size_t size);

  std::size_t size() const noexcept { return size_; }

  void evaluate(double t, std::span<const double> y, std::span<double> dydt) const { rhs_(t, y, dydt); }

  Trial attempt(double t, std::span<const double> y, std::span<const double> dydt, double h, double rel_tol,
                double abs_tol);

  /// Step proposal after a trial with the given error norm.
  static double next_step(double h, double error_norm);

  /// Hairer-Wanner starting step heuristic.
  double initial_step(double t, std::span<const double> y, std::span<const double> dydt, double rel_tol,
                      double abs_tol, double h_max) const;

 private:
  OdeRhs rhs_;
  std::size_t size_;
  std::vector<double> k2_, k3_, k4_, k5_, k6_, tmp_;
};

} // namespace dustlab
