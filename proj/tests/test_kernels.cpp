#include <doctest.h>

#include <random>
#include <vector>

#include "dpt/kernels.hpp"

using namespace dpt::kernels;

namespace {

std::vector<cplx> rand_c(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<cplx> v(n);
  for (auto& x : v) x = {u(rng), u(rng)};
  return v;
}

std::vector<double> rand_d(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

const std::size_t kSizes[] = {0, 1, 2, 3, 5, 8, 17, 64, 1001};

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("active table is one of the two") {
  const auto& a = active();
  CHECK((a.name == "scalar" || a.name == "avx2"));
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  const KernelTable* v = avx2_table();
  if (!v) {
    MESSAGE("AVX2 unavailable; nothing to compare");
    return;
  }
  const KernelTable& s = scalar_table();
  std::mt19937_64 rng(7);
  for (std::size_t n : kSizes) {
    CAPTURE(n);
    const cplx a(0.3, -1.7);
    const auto x = rand_c(n, rng);
    const auto w = rand_d(n, rng);
    const auto c = rand_c(n, rng);
    const auto y0 = rand_c(n, rng);

    auto y1 = y0, y2 = y0;
    s.caxpy(n, a, x.data(), y1.data());
    v->caxpy(n, a, x.data(), y2.data());
    CHECK(max_diff(y1, y2) < 1e-14);

    y1 = y0, y2 = y0;
    s.caxpy_weighted(n, a, w.data(), x.data(), y1.data());
    v->caxpy_weighted(n, a, w.data(), x.data(), y2.data());
    CHECK(max_diff(y1, y2) < 1e-14);

    y1 = y0, y2 = y0;
    s.cmul_acc(n, c.data(), x.data(), y1.data());
    v->cmul_acc(n, c.data(), x.data(), y2.data());
    CHECK(max_diff(y1, y2) < 1e-14);

    const auto yd = rand_d(n, rng);
    std::vector<std::vector<double>> st;
    std::vector<const double*> sp;
    for (int k = 0; k < 6; ++k) st.push_back(rand_d(n, rng));
    for (auto& q : st) sp.push_back(q.data());
    const double coef[] = {0.1, -0.2, 0.3, 1.5, -2.5, 0.01};
    for (std::size_t k = 1; k <= 6; ++k) {
      std::vector<double> o1(n), o2(n);
      s.lincomb(n, yd.data(), k, coef, sp.data(), o1.data());
      v->lincomb(n, yd.data(), k, coef, sp.data(), o2.data());
      for (std::size_t i = 0; i < n; ++i) CHECK(o1[i] == doctest::Approx(o2[i]).epsilon(1e-14).scale(1));
    }

    const auto e = rand_d(n, rng);
    const auto y3 = rand_d(n, rng);
    const double q1 = s.scaled_sumsq(n, e.data(), yd.data(), y3.data(), 1e-12, 1e-10);
    const double q2 = v->scaled_sumsq(n, e.data(), yd.data(), y3.data(), 1e-12, 1e-10);
    CHECK(q1 == doctest::Approx(q2).epsilon(1e-13));
    CHECK(s.sumsq(n, e.data()) == doctest::Approx(v->sumsq(n, e.data())).epsilon(1e-13));
  }
}

TEST_CASE("scalar reference matches plain loops") {
  const KernelTable& s = scalar_table();
  std::mt19937_64 rng(11);
  const std::size_t n = 37;
  const auto x = rand_c(n, rng);
  const auto w = rand_d(n, rng);
  auto y = rand_c(n, rng);
  auto ref = y;
  const cplx a(-0.4, 0.9);
  s.caxpy_weighted(n, a, w.data(), x.data(), y.data());
  for (std::size_t i = 0; i < n; ++i) ref[i] += a * w[i] * x[i];
  CHECK(max_diff(y, ref) < 1e-15);
}

TEST_CASE("set_active switches the dispatch") {
  const KernelTable& before = active();
  set_active(scalar_table());
  CHECK(active().name == "scalar");
  set_active(before);
  CHECK(active().name == before.name);
}

}  // TEST_SUITE
