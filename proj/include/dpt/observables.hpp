#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dpt/lindblad.hpp"
#include "dpt/model.hpp"

namespace dpt::obs {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

// <J_a> and the symmetrized second moments <{J_a, J_b}>/2.
struct SpinMoments {
  Vec3 mean{};
  Mat3 second{};
};

SpinMoments spin_moments(const lindblad::DensityMatrix& rho);

struct BlochResult {
  BlochVector normalized;  // <J>/j, j = N/2
  Vec3 raw{};              // <J>
};

BlochResult bloch_from_rho(const lindblad::DensityMatrix& rho);

struct SqueezingReport {
  double xi2 = 0.0;
  double bloch_length = 0.0;        // |<J>|
  Vec3 mean{};                       // <J>
  Vec3 direction{};                  // minimizing unit vector, orthogonal to <J>
  std::array<double, 2> covariance_eigenvalues{};  // ascending
  int n_atoms = 0;
};

// Throws UndefinedSqueezing when |<J>| <= 1e-10 N.
SqueezingReport xi2_from_rho(const lindblad::DensityMatrix& rho);
SqueezingReport squeezing_from_moments(const SpinMoments& m, int n_atoms);

// Rotated-frame form [<Jx'^2 + Jy'^2> - sqrt(<Jx'^2 - Jy'^2>^2 + <{Jx',Jy'}>^2)] / (N/2),
// z' along <J>. Equals xi2 when |<J>| = N/2.
double xi2_rotated_frame(const SpinMoments& m, int n_atoms);

std::string to_json(const SqueezingReport& r);

struct WignerGrid {
  std::vector<double> theta;
  std::vector<double> phi;
  Eigen::MatrixXd values;  // values(i, k) at (theta[i], phi[k])
  std::string normalization = "raw";  // "raw" or "plot" (max = 1)
  double max_imag_residue = 0.0;
};

std::vector<double> linspace(double lo, double hi, std::size_t n);

// W = sum_{k<=2j} sum_q Tr(rho T_kq^dag) Y_kq. Dicke basis only.
WignerGrid wigner(const lindblad::DensityMatrix& rho, const std::vector<double>& theta,
                  const std::vector<double>& phi, bool plot_normalize = true);

struct Peak {
  double theta;
  double phi;
  double value;
};

// Grid-local maxima, phi periodic, theta rows at the poles collapsed; sorted by value.
std::vector<Peak> local_maxima(const WignerGrid& grid);

// Great-circle angle between two directions given in spherical angles.
double angular_distance(double theta1, double phi1, double theta2, double phi2);

void write_wigner_csv(std::ostream& os, const WignerGrid& grid);
void write_wigner_matrix(std::ostream& os, const WignerGrid& grid);

struct MomentResiduals {
  std::vector<double> times;          // interior samples where the stencil fits
  std::vector<Vec3> residuals;        // finite-difference d<J>/dt minus exact rhs
  double max_residual = 0.0;
  double max_rate = 0.0;              // largest |exact rhs|, for scale
  bool aliasing_warning = false;      // sampling too coarse for the stencil
};

// Equal-spaced samples of a collective-decay trajectory (Dicke or Full).
MomentResiduals moment_residuals(const lindblad::StateTrajectory& traj, const ModelParams& params);

// The exact equations of motion of <J> given the moments.
Vec3 moment_rhs(const SpinMoments& m, const ModelParams& params);

}  // namespace dpt::obs
