#pragma once

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "dpt/model.hpp"
#include "dpt/ode.hpp"

namespace dpt::meanfield {

// dX/dt, dY/dt, dZ/dt for the model's factorized equations.
BlochVector rhs(const ModelParams& params, const BlochVector& state);

// d(rhs)/d(X,Y,Z), row-major.
std::array<std::array<double, 3>, 3> jacobian(const ModelParams& params, const BlochVector& state);

struct Trajectory {
  std::vector<double> times;
  std::vector<BlochVector> states;
  ModelParams params;
  ode::Tolerances tolerances;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
};

// Adaptive Dormand-Prince solution sampled at every accepted step (plus t=0).
// tol must lie in [1e-13, 1e-6]; it sets rtol, and atol = tol / 100.
// No projection onto the sphere is applied.
Trajectory integrate(const ModelParams& params, const BlochVector& init, double t_end,
                     double tol = 1e-10);

enum class Stability { Stable, Unstable, Center, Marginal };
const char* to_string(Stability s);

struct FixedPointReport {
  BlochVector point;
  std::array<std::complex<double>, 3> jacobian_eigenvalues;
  // Eigenvalues on the tangent plane of the sphere; equal to the full set
  // (minus nothing) for models without the sphere constraint.
  std::vector<std::complex<double>> classifying_eigenvalues;
  Stability classification = Stability::Marginal;
};

Stability classify(const std::vector<std::complex<double>>& eigenvalues);

std::vector<FixedPointReport> fixed_points(const ModelParams& params);
FixedPointReport analyze_point(const ModelParams& params, const BlochVector& point);

// XY models: critical |V| = gamma/2. DRIVEN/GENERAL: Omega_c.
double critical_point(const ModelParams& params);

struct ConstantOfMotion {
  double log_abs;          // (2V/g + 1) log|X+Y| + (2V/g - 1) log|X-Y|
  int sign_sum;            // sign of X+Y
  int sign_diff;           // sign of X-Y
};

// COLLECTIVE_XY only. Throws DegenerateInput on the lines X = +-Y.
ConstantOfMotion constant_of_motion(const ModelParams& params, const BlochVector& state,
                                    double degenerate_eps = 1e-300);

// Trapezoidal time average after discarding the initial fraction of the time span.
BlochVector time_average(const Trajectory& traj, double discard_fraction);

struct OrbitPeriod {
  std::vector<double> crossing_times;  // upward crossings of Z through its mean
  double period = 0.0;                 // mean spacing of successive crossings
  double spread = 0.0;                 // max deviation of individual periods
};

// Poincare section at Z = <Z>_t (upward). Needs at least two crossings.
std::optional<OrbitPeriod> orbit_period(const Trajectory& traj, double discard_fraction = 0.0);

struct RelaxationReport {
  double lambda;  // -(gamma_c/2) sqrt(1 - 4 Omega^2/gamma_c^2)
  double tau;     // 2 / (gamma_c sqrt(1 - 4 Omega^2/gamma_c^2))
  BlochVector fixed_point;
  std::array<std::complex<double>, 3> jacobian_eigenvalues;
  std::array<std::complex<double>, 2> tangent_eigenvalues;
};

// DRIVEN model with Omega < gamma_c/2. Throws NoFixedPoint otherwise.
RelaxationReport relaxation(const ModelParams& params);

}  // namespace dpt::meanfield
