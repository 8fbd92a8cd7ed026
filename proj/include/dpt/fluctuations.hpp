#pragma once

#include <complex>

#include "dpt/model.hpp"

// Gaussian (Holstein-Primakoff) fluctuations about the collective-decay fixed
// point, valid to leading order in 1/N.
namespace dpt::fluct {

struct SteadyAngles {
  double theta = 0.0;  // [0, pi]
  double phi = 0.0;    // (-pi, pi]; 0 at the south pole by convention
};

struct QuadraticCoeffs {
  std::complex<double> b1;
  double b2 = 0.0;
};

struct SecondMoments {
  std::complex<double> a_sq;  // <a^2>
  double n_occ = 0.0;         // <a^dag a>
};

// Throws NoFixedPoint when Omega >= Omega_c, DomainError for independent decay.
SteadyAngles steady_angles(const ModelParams& params);

QuadraticCoeffs quad_coeffs(const ModelParams& params, const SteadyAngles& angles);

// Throws CriticalDivergence when the fluctuation dynamics is not strictly
// damped or the linear system is numerically singular.
SecondMoments moment_steady_state(const ModelParams& params);

// Squeezing parameter from the second moments: (2n + 1) - 2|<a^2>|.
double xi2_from_moments(const SecondMoments& m);
double xi2_analytic(const ModelParams& params);

enum class ClosedForm {
  Paramagnet,     // gamma / (gamma + 2|V|), XY models at Omega = 0
  DrivenGeneral,  // driven model, any Vx
  DrivenVx0,      // sqrt(1 - 4 Omega^2 / gamma_c^2)
  DrivenVxInf,    // half of the Vx = 0 value
};

const char* to_string(ClosedForm v);

// Throws DomainError outside the formula's validity region.
double xi2_closed_form(ClosedForm variant, const ModelParams& params);

}  // namespace dpt::fluct
