#include <doctest.h>

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "dpt/collective_spin.hpp"
#include "dpt/errors.hpp"
#include "dpt/observables.hpp"

using namespace dpt;
using namespace dpt::lindblad;
using namespace dpt::obs;

namespace {

// exp(-i a H) for Hermitian H.
Eigen::MatrixXcd rotation(const Eigen::MatrixXcd& h, double a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  const Eigen::VectorXcd ph = (es.eigenvalues() * -a).unaryExpr([](double x) { return std::polar(1.0, x); });
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

// Spin coherent state pointing at (theta, phi), rotated up from |j, -j>.
DensityMatrix coherent(int n, double theta, double phi) {
  const spin::DickeBasis b(n);
  const Eigen::MatrixXcd jy = Eigen::MatrixXcd(spin::build_operator(b, spin::SpinKind::Jy).matrix());
  const Eigen::MatrixXcd jz = Eigen::MatrixXcd(spin::build_operator(b, spin::SpinKind::Jz).matrix());
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n + 1);
  v(0) = 1;
  v = rotation(jz, phi) * rotation(jy, theta - M_PI) * v;
  DensityMatrix rho = DensityMatrix::zeros(BasisTag::Dicke, n);
  rho.blocks[0] = v * v.adjoint();
  return rho;
}

}  // namespace

TEST_SUITE("observables") {

TEST_CASE("coherent states have unit squeezing and the expected Bloch vector") {
  for (double th : {0.4, 1.2, 2.5})
    for (double ph : {0.0, 1.0, 4.0}) {
      const int n = 20;
      const auto rho = coherent(n, th, ph);
      const auto b = bloch_from_rho(rho);
      CHECK(b.normalized.x == doctest::Approx(std::sin(th) * std::cos(ph)));
      CHECK(b.normalized.y == doctest::Approx(std::sin(th) * std::sin(ph)));
      CHECK(b.normalized.z == doctest::Approx(std::cos(th)));
      const auto r = xi2_from_rho(rho);
      CHECK(r.xi2 == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(xi2_rotated_frame(spin_moments(rho), n) == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(r.bloch_length == doctest::Approx(10.0));
    }
}

TEST_CASE("moments agree across bases") {
  const int n = 4;
  const auto p = ModelParams::general(0.7, -0.2, 0.3, 1.0, n);
  const auto L = build_liouvillian_collective(spin::DickeBasis(n), p);
  const auto rho = steady_state(*L).rho;
  const auto a = spin_moments(rho);
  const auto b = spin_moments(to_full(rho));
  for (int i = 0; i < 3; ++i) {
    CHECK(a.mean[i] == doctest::Approx(b.mean[i]).epsilon(1e-12).scale(1));
    for (int k = 0; k < 3; ++k) CHECK(a.second[i][k] == doctest::Approx(b.second[i][k]).epsilon(1e-12).scale(1));
  }
}

TEST_CASE("squeezed steady states beat the standard quantum limit") {
  const int n = 60;
  const auto L = build_liouvillian_collective(spin::DickeBasis(n), ModelParams::driven(0.0, 0.3, 1.0, n));
  const auto r = xi2_from_rho(steady_state(*L).rho);
  CHECK(r.xi2 < 0.9);
  CHECK(r.xi2 > 0.7);
  // The squeezed direction is orthogonal to the mean spin.
  double dot = 0;
  for (int i = 0; i < 3; ++i) dot += r.direction[i] * r.mean[i];
  CHECK(std::abs(dot) < 1e-10 * r.bloch_length);
  const auto j = nlohmann::json::parse(to_json(r));
  CHECK(j["xi2"].get<double>() == doctest::Approx(r.xi2));
  CHECK(j["n_atoms"].get<int>() == n);
}

TEST_CASE("vanishing mean spin makes squeezing undefined") {
  auto rho = DensityMatrix::zeros(BasisTag::Dicke, 6);
  rho.blocks[0] = Matrix::Identity(7, 7) / 7.0;
  CHECK_THROWS_AS(xi2_from_rho(rho), UndefinedSqueezing);
}

TEST_CASE("Wigner function of a coherent state peaks at its direction") {
  const int n = 16;
  const double th = 1.1, ph = 2.2;
  const auto g = wigner(coherent(n, th, ph), linspace(0, M_PI, 61), linspace(0, 2 * M_PI, 121));
  CHECK(g.max_imag_residue < 1e-10);
  CHECK(g.normalization == "plot");
  const auto peaks = local_maxima(g);
  REQUIRE(!peaks.empty());
  CHECK(angular_distance(peaks[0].theta, peaks[0].phi, th, ph) < 0.06);
  CHECK(peaks[0].value == doctest::Approx(1.0));
}

TEST_CASE("raw Wigner function integrates to a basis-independent constant") {
  // Only the k = 0 term survives the integral: sqrt(4 pi / (2j+1)) * tr(rho).
  const int n = 8;
  const auto th = linspace(0, M_PI, 201), ph = linspace(0, 2 * M_PI, 201);
  for (double a : {0.3, 2.0}) {
    const auto g = wigner(coherent(n, a, 1.0), th, ph, false);
    double s = 0;
    const double dth = th[1] - th[0], dph = ph[1] - ph[0];
    for (std::size_t i = 0; i < th.size(); ++i)
      for (std::size_t k = 0; k + 1 < ph.size(); ++k) {
        const double wt = (i == 0 || i + 1 == th.size()) ? 0.5 : 1.0;
        s += wt * g.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) * std::sin(th[i]) * dth * dph;
      }
    CHECK(s == doctest::Approx(std::sqrt(4 * M_PI / (n + 1))).epsilon(1e-3));
  }
}

TEST_CASE("Wigner output formats") {
  const auto g = wigner(coherent(4, 1.0, 0.5), linspace(0, M_PI, 5), linspace(0, 2 * M_PI, 7));
  std::ostringstream csv, mat;
  write_wigner_csv(csv, g);
  write_wigner_matrix(mat, g);
  std::istringstream in(csv.str());
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 1 + 5 * 7);
  CHECK(!mat.str().empty());
}

TEST_CASE("Wigner needs the Dicke basis") {
  CHECK_THROWS(wigner(DensityMatrix::ground(BasisTag::Full, 2), linspace(0, M_PI, 5), linspace(0, 6, 5)));
}

TEST_CASE("local maxima respect the periodic azimuth") {
  WignerGrid g;
  g.theta = linspace(0, M_PI, 9);
  g.phi = linspace(0, 2 * M_PI, 17);
  g.values = Eigen::MatrixXd::Zero(9, 17);
  g.values(4, 0) = 1.0;
  g.values(4, 16) = 1.0;  // same point as phi = 0
  g.values(2, 8) = 0.5;
  const auto peaks = local_maxima(g);
  REQUIRE(peaks.size() == 2);
  CHECK(peaks[0].value == 1.0);
  CHECK(peaks[1].value == 0.5);
  CHECK(angular_distance(0, 0, M_PI, 0) == doctest::Approx(M_PI));
}

TEST_CASE("exact moment equations hold along a trajectory") {
  const int n = 20;
  const auto p = ModelParams::general(0.6, -0.6, 0.2, 1.0, n);
  const auto L = build_liouvillian_collective(spin::DickeBasis(n), p);
  const auto traj = evolve(*L, DensityMatrix::ground(BasisTag::Dicke, n), 2.0, 201, {1e-12, 1e-14});
  const auto r = moment_residuals(traj, p);
  CHECK(r.max_residual < 1e-6 * std::max(1.0, r.max_rate));
  CHECK_FALSE(r.aliasing_warning);

  const auto coarse = evolve(*L, DensityMatrix::ground(BasisTag::Dicke, n), 20.0, 11, {1e-12, 1e-14});
  CHECK(moment_residuals(coarse, p).aliasing_warning);
}

}  // TEST_SUITE
