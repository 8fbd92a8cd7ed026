#include "dpt/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dpt/errors.hpp"
#include "dpt/kernels.hpp"

namespace dpt::ode {
namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

DormandPrince::DormandPrince(std::size_t n, Rhs f, Options opts)
    : n_(n), f_(std::move(f)), opts_(opts), k_(7, std::vector<double>(n)), ytmp_(n), ynew_(n),
      err_(n), zeros_(n, 0.0) {
  if (!(opts_.tol.rtol > 0.0) || !(opts_.tol.atol > 0.0)) {
    throw InvalidParameter("integrator tolerances must be positive");
  }
  h_ = opts_.h_init;
}

double DormandPrince::initial_step(double t0, std::span<const double> y, double span) {
  const auto& K = kernels::active();
  const double n = static_cast<double>(std::max<std::size_t>(n_, 1));
  const double d0 = std::sqrt(K.scaled_sumsq(n_, y.data(), y.data(), y.data(), opts_.tol.atol,
                                             opts_.tol.rtol) / n);
  const double d1 = std::sqrt(K.scaled_sumsq(n_, k_[0].data(), y.data(), y.data(),
                                             opts_.tol.atol, opts_.tol.rtol) / n);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, span);
  // One explicit Euler probe to estimate the second derivative.
  for (std::size_t i = 0; i < n_; ++i) ytmp_[i] = y[i] + h0 * k_[0][i];
  f_(t0 + h0, ytmp_, k_[1]);
  ++evals_;
  for (std::size_t i = 0; i < n_; ++i) err_[i] = k_[1][i] - k_[0][i];
  const double d2 =
      std::sqrt(K.scaled_sumsq(n_, err_.data(), y.data(), y.data(), opts_.tol.atol,
                               opts_.tol.rtol) / n) / h0;
  const double h1 = (std::max(d1, d2) <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                                 : std::pow(0.01 / std::max(d1, d2), 1.0 / 5.0);
  return std::min({100.0 * h0, h1, span, opts_.h_max});
}

double DormandPrince::integrate(double t0, double t1, std::span<double> y, const Observer& observer) {
  if (y.size() != n_) throw InvalidParameter("state size mismatch");
  if (!(t1 > t0)) return t0;
  const auto& K = kernels::active();
  const double rtol = opts_.tol.rtol, atol = opts_.tol.atol;

  if (!have_fsal_ || fsal_t_ != t0) {
    f_(t0, y, k_[0]);
    ++evals_;
    have_fsal_ = true;
    fsal_t_ = t0;
  }
  if (!(h_ > 0.0)) h_ = initial_step(t0, y, t1 - t0);

  double t = t0;
  const double* stages[7];
  for (int s = 0; s < 7; ++s) stages[s] = k_[s].data();
  const double nn = static_cast<double>(std::max<std::size_t>(n_, 1));

  while (t < t1) {
    if (accepted_ + rejected_ >= opts_.max_steps) {
      throw StiffnessError("maximum number of integrator steps exceeded", t);
    }
    double h = std::min(h_, opts_.h_max);
    bool last = false;
    if (t + h >= t1 || t + 1.0000001 * h >= t1) {
      h = t1 - t;
      last = true;
    }
    const double h_floor = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
    if (h < h_floor && !last) {
      std::ostringstream msg;
      msg << "step size underflow at t = " << t;
      throw StiffnessError(msg.str(), t);
    }

    {
      const double c[] = {h * a21};
      K.lincomb(n_, y.data(), 1, c, stages, ytmp_.data());
      f_(t + c2 * h, ytmp_, k_[1]);
    }
    {
      const double c[] = {h * a31, h * a32};
      K.lincomb(n_, y.data(), 2, c, stages, ytmp_.data());
      f_(t + c3 * h, ytmp_, k_[2]);
    }
    {
      const double c[] = {h * a41, h * a42, h * a43};
      K.lincomb(n_, y.data(), 3, c, stages, ytmp_.data());
      f_(t + c4 * h, ytmp_, k_[3]);
    }
    {
      const double c[] = {h * a51, h * a52, h * a53, h * a54};
      K.lincomb(n_, y.data(), 4, c, stages, ytmp_.data());
      f_(t + c5 * h, ytmp_, k_[4]);
    }
    {
      const double c[] = {h * a61, h * a62, h * a63, h * a64, h * a65};
      K.lincomb(n_, y.data(), 5, c, stages, ytmp_.data());
      f_(t + h, ytmp_, k_[5]);
    }
    {
      const double* s[] = {stages[0], stages[2], stages[3], stages[4], stages[5]};
      const double c[] = {h * b1, h * b3, h * b4, h * b5, h * b6};
      K.lincomb(n_, y.data(), 5, c, s, ynew_.data());
      f_(t + h, ynew_, k_[6]);
    }
    evals_ += 6;
    {
      const double* s[] = {stages[0], stages[2], stages[3], stages[4], stages[5], stages[6]};
      const double c[] = {h * e1, h * e3, h * e4, h * e5, h * e6, h * e7};
      K.lincomb(n_, zeros_.data(), 6, c, s, err_.data());
    }
    const double err = std::sqrt(K.scaled_sumsq(n_, err_.data(), y.data(), ynew_.data(), atol, rtol) / nn);

    if (!std::isfinite(err)) {
      ++rejected_;
      h_ = 0.1 * h;
      continue;
    }
    if (err <= 1.0) {
      t = last ? t1 : t + h;
      std::copy(ynew_.begin(), ynew_.end(), y.begin());
      std::swap(k_[0], k_[6]);
      stages[0] = k_[0].data();
      stages[6] = k_[6].data();
      fsal_t_ = t;
      ++accepted_;
      const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      // Keep the natural step when the last one was shortened to land on t1.
      if (!last) h_ = h * fac;
      else h_ = std::max(h_, h * fac);
      if (observer && !observer(StepInfo{t, y, k_[0]})) return t;
    } else {
      ++rejected_;
      h_ = h * std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
    }
  }
  return t;
}

}  // namespace dpt::ode
