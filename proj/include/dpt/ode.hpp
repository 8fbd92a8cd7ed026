#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace dpt::ode {

struct Tolerances {
  double rtol = 1e-10;
  double atol = 1e-12;
};

struct Options {
  Tolerances tol;
  double h_init = 0.0;  // 0 picks a starting step automatically
  double h_max = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 100'000'000;
};

using Rhs = std::function<void(double t, std::span<const double> y, std::span<double> dy)>;

// State after an accepted step. dy is f(t, y), available for free through FSAL.
struct StepInfo {
  double t;
  std::span<const double> y;
  std::span<const double> dy;
};

// Return false to stop integration after this step.
using Observer = std::function<bool(const StepInfo&)>;

// Dormand-Prince 5(4) with FSAL and an RMS error norm over the real components.
// The step size is carried across integrate() calls, so a trajectory can be
// advanced segment by segment to hit sample times exactly.
class DormandPrince {
public:
  DormandPrince(std::size_t n, Rhs f, Options opts = {});

  // Advances y from t0 to t1 (t1 > t0). The observer is called after every
  // accepted step. Returns the time reached. Throws StiffnessError on step-size
  // underflow.
  double integrate(double t0, double t1, std::span<double> y, const Observer& observer = {});

  std::size_t accepted_steps() const { return accepted_; }
  std::size_t rejected_steps() const { return rejected_; }
  std::size_t rhs_evaluations() const { return evals_; }
  double last_step() const { return h_; }
  const Options& options() const { return opts_; }

private:
  double initial_step(double t0, std::span<const double> y, double span);

  std::size_t n_;
  Rhs f_;
  Options opts_;
  std::vector<std::vector<double>> k_;
  std::vector<double> ytmp_, ynew_, err_, zeros_;
  bool have_fsal_ = false;
  double fsal_t_ = 0.0;
  double h_ = 0.0;
  std::size_t accepted_ = 0, rejected_ = 0, evals_ = 0;
};

}  // namespace dpt::ode
