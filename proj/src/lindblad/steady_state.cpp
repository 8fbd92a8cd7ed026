#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>

#include "dpt/errors.hpp"
#include "dpt/kernels.hpp"
#include "internal.hpp"

namespace dpt::lindblad {

const char* to_string(SteadyMethod m) {
  switch (m) {
    case SteadyMethod::Auto: return "auto";
    case SteadyMethod::TimeMarch: return "time-march";
    case SteadyMethod::NullSpace: return "null-space";
    case SteadyMethod::DriveClosedForm: return "drive-closed-form";
  }
  return "?";
}

double default_time_cap(const ModelParams& p) {
  const double g = p.gamma_c > 0.0 ? p.gamma_c : p.gamma_i;
  if (p.model == Model::Driven && p.gamma_c > 0.0 && std::abs(p.omega) < 0.5 * p.gamma_c) {
    const double r = 2.0 * p.omega / p.gamma_c;
    return 50.0 * 2.0 / (p.gamma_c * std::sqrt(1.0 - r * r));
  }
  return g > 0.0 ? 500.0 / g : 500.0;
}

DensityMatrix drive_closed_form(int n, double omega, double gamma_c) {
  if (n < 1) throw InvalidParameter("n_atoms must be >= 1");
  if (!(gamma_c > 0.0)) throw DomainError("closed form needs gamma_c > 0");
  DensityMatrix rho = DensityMatrix::zeros(BasisTag::Dicke, n);
  if (omega == 0.0) {
    rho.blocks[0](0, 0) = 1.0;
    return rho;
  }
  // rho ∝ A A^dag with A = (1 - J-/conj(g))^-1, g = i Omega N / gamma_c.
  // Column n of A has entries prod_{r<k} l(n-r) / conj(g)^k at row n-k.
  const int d = n + 1;
  const HalfInt j(n);
  const std::vector<double> f = detail::lowering_amplitudes(j, d);
  const double log_g = std::log(std::abs(omega) * n / gamma_c);
  const cplx step_phase = omega > 0.0 ? cplx(0.0, 1.0) : cplx(0.0, -1.0);  // 1/conj(g) / |1/g|

  Eigen::MatrixXd logm = Eigen::MatrixXd::Constant(d, d, -std::numeric_limits<double>::infinity());
  Eigen::VectorXd colmax(d);
  for (int c = 0; c < d; ++c) {
    double acc = 0.0;
    logm(c, c) = 0.0;
    for (int k = 1; k <= c; ++k) {
      acc += std::log(f[c - k + 1]) - log_g;
      logm(c - k, c) = acc;
    }
    colmax(c) = logm.col(c).head(c + 1).maxCoeff();
  }
  const double gmax = colmax.maxCoeff();
  std::vector<cplx> phase(d);
  phase[0] = 1.0;
  for (int k = 1; k < d; ++k) phase[k] = phase[k - 1] * step_phase;

  Matrix a = Matrix::Zero(d, d);
  for (int c = 0; c < d; ++c) {
    for (int r = 0; r <= c; ++r) {
      const double lm = logm(r, c) - gmax;
      if (lm > -745.0) a(r, c) = std::exp(lm) * phase[c - r];
    }
  }
  Matrix& out = rho.blocks[0];
  out.noalias() = a.triangularView<Eigen::Upper>() * a.adjoint();
  rho.normalize();
  return rho;
}

namespace {

bool closed_form_applies(const Liouvillian& liou) {
  const ModelParams& p = liou.params();
  if (liou.tag() != BasisTag::Dicke || liou.size() != static_cast<std::size_t>(p.n_atoms + 1) * (p.n_atoms + 1)) {
    return false;
  }
  return p.vx == 0.0 && p.vy == 0.0 && p.gamma_i == 0.0 && p.gamma_c > 0.0;
}

// L with the ground-population row replaced by the trace functional; the
// steady state solves A x = e_0.
SparseMatrix trace_constrained(const Liouvillian& liou, const DensityMatrix& layout) {
  const SparseMatrix l = liou.to_sparse();
  const int r0 = 0;
  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(static_cast<std::size_t>(l.nonZeros()) + liou.size());
  for (int k = 0; k < l.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(l, k); it; ++it)
      if (it.row() != r0) trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  std::size_t off = 0;
  for (const auto& b : layout.blocks) {
    for (Eigen::Index i = 0; i < b.rows(); ++i) {
      trips.emplace_back(r0, static_cast<int>(off + i + i * b.rows()), 1.0);
    }
    off += static_cast<std::size_t>(b.size());
  }
  const int n = static_cast<int>(liou.size());
  SparseMatrix a(n, n);
  a.setFromTriplets(trips.begin(), trips.end());
  a.makeCompressed();
  return a;
}

SteadyResult null_space(const Liouvillian& liou, const SteadyOptions& opts) {
  const DensityMatrix layout = liou.zero_state();
  const SparseMatrix a = trace_constrained(liou, layout);
  const Eigen::Index n = a.rows();
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
  rhs(0) = 1.0;
  Eigen::VectorXcd x;
  std::string solver;

  if (liou.size() <= opts.direct_max_size) {
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(a);
    lu.factorize(a);
    if (lu.info() != Eigen::Success) {
      throw NonConvergence("sparse factorization failed: " + lu.lastErrorMessage(), 0.0,
                           std::numeric_limits<double>::infinity());
    }
    x = lu.solve(rhs);
    solver = "sparse-lu";
  } else {
    // LU fill grows too fast here; incomplete LU keeps memory near a few times nnz(A).
    Eigen::GMRES<SparseMatrix, Eigen::IncompleteLUT<cplx>> gm;
    gm.preconditioner().setDroptol(1e-4);
    gm.preconditioner().setFillfactor(10);
    gm.set_restart(200);
    gm.setTolerance(1e-13);
    gm.setMaxIterations(2000);
    gm.compute(a);
    if (gm.info() != Eigen::Success) {
      throw NonConvergence("incomplete factorization failed", 0.0, std::numeric_limits<double>::infinity());
    }
    x = gm.solve(rhs);
    solver = "gmres-ilut, " + std::to_string(gm.iterations()) + " iterations";
  }

  SteadyResult res;
  res.rho = layout;
  res.rho.from_flat(x.data());
  res.rho.normalize();
  res.method = SteadyMethod::NullSpace;
  res.residual = residual_norm(liou, res.rho);
  res.initial_state = "none";
  res.solver = solver;
  if (!(res.residual < opts.residual_tol)) {
    std::ostringstream msg;
    msg << "null-space solve (" << solver << ") left residual " << res.residual;
    throw NonConvergence(msg.str(), 0.0, res.residual);
  }
  return res;
}

SteadyResult time_march(const Liouvillian& liou, const SteadyOptions& opts) {
  const double t_max = opts.t_max > 0.0 ? opts.t_max : default_time_cap(liou.params());
  DensityMatrix rho = liou.zero_state();
  rho.blocks.front()(0, 0) = 1.0;
  const std::size_t n = liou.size();
  std::vector<cplx> y(n);
  rho.to_flat(y.data());

  ode::Options o;
  o.tol = opts.tol;
  ode::DormandPrince solver(
      2 * n,
      [&liou](double, std::span<const double> yy, std::span<double> dy) {
        liou.apply(reinterpret_cast<const cplx*>(yy.data()), reinterpret_cast<cplx*>(dy.data()));
      },
      o);
  const auto& K = kernels::active();
  double residual = std::numeric_limits<double>::infinity();
  const double target2 = opts.residual_tol * opts.residual_tol;
  std::span<double> view(reinterpret_cast<double*>(y.data()), 2 * n);
  const double t = solver.integrate(0.0, t_max, view, [&](const ode::StepInfo& s) {
    const double r2 = K.sumsq(s.dy.size(), s.dy.data());
    residual = std::sqrt(r2);
    return r2 >= target2;
  });

  rho.from_flat(y.data());
  rho.normalize();
  residual = residual_norm(liou, rho);
  if (residual >= opts.residual_tol) {
    std::ostringstream msg;
    msg << "steady state not reached by t = " << t << " (residual " << residual << ")";
    throw NonConvergence(msg.str(), t, residual);
  }
  SteadyResult res;
  res.rho = std::move(rho);
  res.method = SteadyMethod::TimeMarch;
  res.solver = "dormand-prince";
  res.residual = residual;
  res.t_reached = t;
  return res;
}

}  // namespace

SteadyResult steady_state(const Liouvillian& liou, const SteadyOptions& opts) {
  SteadyMethod m = opts.method;
  if (m == SteadyMethod::Auto) {
    const std::size_t size = liou.size();
    if (size <= opts.direct_max_size) {
      m = SteadyMethod::NullSpace;
    } else if (closed_form_applies(liou)) {
      m = SteadyMethod::DriveClosedForm;
    } else if (size <= opts.nullspace_max_size) {
      try {
        return null_space(liou, opts);
      } catch (const NonConvergence&) {
        m = SteadyMethod::TimeMarch;  // the iterative solve stalled; march instead
      }
    } else {
      m = SteadyMethod::TimeMarch;
    }
  }
  switch (m) {
    case SteadyMethod::NullSpace: return null_space(liou, opts);
    case SteadyMethod::TimeMarch: return time_march(liou, opts);
    case SteadyMethod::DriveClosedForm: {
      if (!closed_form_applies(liou)) {
        throw DomainError("closed form needs the unwindowed Dicke backend with Vx = Vy = 0");
      }
      const ModelParams& p = liou.params();
      SteadyResult res;
      res.rho = drive_closed_form(p.n_atoms, p.omega, p.gamma_c);
      res.method = SteadyMethod::DriveClosedForm;
      res.solver = "factorized";
      res.residual = residual_norm(liou, res.rho);
      res.initial_state = "none";
      return res;
    }
    case SteadyMethod::Auto: break;
  }
  return null_space(liou, opts);
}

}  // namespace dpt::lindblad
