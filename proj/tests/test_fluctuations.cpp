#include <doctest.h>

#include <cmath>
#include <random>

#include "dpt/errors.hpp"
#include "dpt/fluctuations.hpp"

using namespace dpt;
using namespace dpt::fluct;

TEST_SUITE("fluctuations") {

TEST_CASE("paramagnet squeezing equals gamma/(gamma + 2|V|)") {
  for (double v = -0.48; v <= 0.48; v += 0.06) {
    const auto p = ModelParams::collective_xy(v, 1.0);
    CHECK(xi2_analytic(p) == doctest::Approx(1.0 / (1.0 + 2 * std::abs(v))).epsilon(1e-10));
    CHECK(xi2_closed_form(ClosedForm::Paramagnet, p) == doctest::Approx(1.0 / (1.0 + 2 * std::abs(v))));
  }
}

TEST_CASE("south pole angles") {
  const auto a = steady_angles(ModelParams::collective_xy(0.2, 1.0));
  CHECK(a.theta == doctest::Approx(M_PI));
  CHECK(a.phi == 0.0);
}

TEST_CASE("driven model: moment solver matches the printed closed form") {
  for (double vx : {0.0, 0.5, 1.0, 5.0})
    for (double om : {0.0, 0.1, 0.25, 0.4, 0.49}) {
      CAPTURE(vx);
      CAPTURE(om);
      const auto p = ModelParams::driven(vx, om, 1.0);
      CHECK(std::abs(xi2_analytic(p) - xi2_closed_form(ClosedForm::DrivenGeneral, p)) < 1e-9);
    }
  const auto p0 = ModelParams::driven(0.0, 0.3, 1.0);
  CHECK(xi2_closed_form(ClosedForm::DrivenVx0, p0) == doctest::Approx(0.8));
  CHECK(xi2_analytic(p0) == doctest::Approx(0.8));
  const auto pinf = ModelParams::driven(1e4, 0.3, 1.0);
  CHECK(xi2_analytic(pinf) == doctest::Approx(0.4).epsilon(1e-3));
}

TEST_CASE("steady angles of the driven model sit on the mean-field point") {
  const auto a = steady_angles(ModelParams::driven(0.0, 0.3, 1.0));
  CHECK(std::sin(a.theta) * std::sin(a.phi) == doctest::Approx(0.6));
  CHECK(std::cos(a.theta) == doctest::Approx(-0.8));
}

TEST_CASE("Gaussian moments describe a physical state") {
  // (2n+1)^2 - 4|<a^2>|^2 >= 1 is the uncertainty bound for one mode.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int k = 0; k < 200; ++k) {
    const double vx = 6 * u(rng), om = 0.49 * u(rng);
    const auto m = moment_steady_state(ModelParams::driven(vx, om, 1.0));
    CHECK(m.n_occ >= -1e-12);
    CHECK((2 * m.n_occ + 1) * (2 * m.n_occ + 1) - 4 * std::norm(m.a_sq) >= 1 - 1e-9);
    CHECK(xi2_from_moments(m) > 0.0);
  }
}

TEST_CASE("squeezing improves monotonically with Vx at fixed drive") {
  double prev = 2;
  for (double vx = 0; vx <= 8; vx += 0.5) {
    const double x = xi2_analytic(ModelParams::driven(vx, 0.3, 1.0));
    CHECK(x <= prev + 1e-12);
    prev = x;
  }
}

TEST_CASE("squeezing diverges toward the critical drive") {
  CHECK(xi2_analytic(ModelParams::driven(0.0, 0.499, 1.0)) < 0.07);
  double prev = 2;
  for (double om = 0; om < 0.5; om += 0.05) {
    const double x = xi2_analytic(ModelParams::driven(0.0, om, 1.0));
    CHECK(x < prev);
    prev = x;
  }
}

TEST_CASE("errors at and beyond the critical point") {
  CHECK_THROWS_AS(xi2_analytic(ModelParams::driven(0.0, 0.5, 1.0)), NoFixedPoint);
  CHECK_THROWS_AS(xi2_analytic(ModelParams::driven(0.0, 0.7, 1.0)), NoFixedPoint);
  // Omega_c vanishes at |V| = gamma_c/2 for the XY model.
  CHECK_THROWS_AS(xi2_analytic(ModelParams::collective_xy(0.5, 1.0)), NoFixedPoint);
  CHECK_THROWS_AS(xi2_analytic(ModelParams::collective_xy(0.7, 1.0)), NoFixedPoint);
  CHECK_THROWS_AS(xi2_analytic(ModelParams::independent_xy(0.2, 1.0)), DomainError);
  CHECK_THROWS_AS(xi2_closed_form(ClosedForm::Paramagnet, ModelParams::collective_xy(0.6, 1.0)), DomainError);
  CHECK_THROWS_AS(xi2_closed_form(ClosedForm::DrivenVx0, ModelParams::driven(0.0, 0.5, 1.0)), DomainError);
}

}  // TEST_SUITE
