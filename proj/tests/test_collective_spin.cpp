#include <doctest.h>

#include <cmath>

#include "dpt/collective_spin.hpp"
#include "dpt/errors.hpp"

using namespace dpt;
using namespace dpt::spin;

namespace {
Eigen::MatrixXcd dense(const SparseMatrix& m) { return Eigen::MatrixXcd(m); }
}  // namespace

TEST_SUITE("collective_spin") {

TEST_CASE("half integers keep exact arithmetic") {
  const HalfInt a(3), b(-1);
  CHECK((a + b).value() == 1.0);
  CHECK_FALSE(a.is_integer());
  CHECK(HalfInt::from_double(2.5).twice == 5);
  CHECK_THROWS_AS(HalfInt::from_double(0.3), InvalidParameter);
}

TEST_CASE("basis indexing runs upward from m = -j") {
  DickeBasis b(5);
  CHECK(b.dim() == 6);
  CHECK(b.m(0).twice == -5);
  CHECK(b.m(5).twice == 5);
  for (int i = 0; i < b.dim(); ++i) CHECK(b.index_of(b.m(i)) == i);
}

TEST_CASE("angular momentum algebra holds for every N up to 9") {
  const std::complex<double> I(0, 1);
  for (int n = 1; n <= 9; ++n) {
    DickeBasis b(n);
    const auto x = dense(build_operator(b, SpinKind::Jx).matrix());
    const auto y = dense(build_operator(b, SpinKind::Jy).matrix());
    const auto z = dense(build_operator(b, SpinKind::Jz).matrix());
    const auto p = dense(build_operator(b, SpinKind::Jplus).matrix());
    const auto m = dense(build_operator(b, SpinKind::Jminus).matrix());
    CHECK((x * y - y * x - I * z).norm() < 1e-12);
    CHECK((y * z - z * y - I * x).norm() < 1e-12);
    CHECK((z * x - x * z - I * y).norm() < 1e-12);
    const double j = 0.5 * n;
    const Eigen::MatrixXcd casimir = x * x + y * y + z * z;
    CHECK((casimir - j * (j + 1) * Eigen::MatrixXcd::Identity(n + 1, n + 1)).norm() < 1e-11);
    CHECK((p - (x + I * y)).norm() < 1e-12);
    CHECK((m - p.adjoint()).norm() < 1e-12);
  }
}

TEST_CASE("ladder amplitudes") {
  const HalfInt j(4);  // j = 2
  CHECK(ladder_up(j, HalfInt(-4)) == doctest::Approx(2.0));
  CHECK(ladder_up(j, HalfInt(0)) == doctest::Approx(std::sqrt(6.0)));
  CHECK(ladder_up(j, HalfInt(4)) == 0.0);
}

TEST_CASE("spin matrices for arbitrary j satisfy the Casimir identity") {
  for (int twice = 0; twice <= 7; ++twice) {
    const HalfInt j(twice);
    const auto x = dense(spin_matrix(j, SpinKind::Jx));
    const auto y = dense(spin_matrix(j, SpinKind::Jy));
    const auto z = dense(spin_matrix(j, SpinKind::Jz));
    const double jj = j.value();
    const Eigen::MatrixXcd c = x * x + y * y + z * z;
    CHECK((c - jj * (jj + 1) * Eigen::MatrixXcd::Identity(twice + 1, twice + 1)).norm() < 1e-11);
  }
}

TEST_CASE("coupling coefficients") {
  CHECK(coupling_coefficient(0.5, 0.5, 0.5, -0.5, 1, 0) == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(coupling_coefficient(0.5, 0.5, 0.5, -0.5, 0, 0) == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(coupling_coefficient(0.5, -0.5, 0.5, 0.5, 0, 0) == doctest::Approx(-1 / std::sqrt(2.0)));
  CHECK(coupling_coefficient(1, 1, 1, -1, 2, 0) == doctest::Approx(1 / std::sqrt(6.0)));
  // Selection rules give exact zeros.
  CHECK(coupling_coefficient(1, 1, 1, 0, 2, 0) == 0.0);
  CHECK(coupling_coefficient(1, 0, 1, 0, 1, 0) == 0.0);
  CHECK(coupling_coefficient(1, 1, 1, 1, 3, 2) == 0.0);

  SUBCASE("orthonormality over m1 for fixed M") {
    for (double j1 : {1.0, 1.5, 3.0})
      for (double j2 : {0.5, 1.0, 2.0}) {
        for (double J1 = std::abs(j1 - j2); J1 <= j1 + j2; J1 += 1)
          for (double J2 = std::abs(j1 - j2); J2 <= j1 + j2; J2 += 1) {
            const double M = std::fmod(j1 + j2, 1.0);  // smallest admissible |M|
            if (std::abs(M) > J1 || std::abs(M) > J2) continue;
            double s = 0;
            for (double m1 = -j1; m1 <= j1; m1 += 1) {
              const double m2 = M - m1;
              if (std::abs(m2) > j2) continue;
              s += coupling_coefficient(j1, m1, j2, m2, J1, M) * coupling_coefficient(j1, m1, j2, m2, J2, M);
            }
            CHECK(s == doctest::Approx(J1 == J2 ? 1.0 : 0.0).epsilon(1e-12).scale(1));
          }
      }
  }
}

}  // TEST_SUITE
