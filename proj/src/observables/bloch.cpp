#include "dpt/errors.hpp"
#include "dpt/observables.hpp"
#include "../lindblad/internal.hpp"

namespace dpt::obs {
namespace {

using lindblad::Matrix;
using lindblad::SparseMatrix;

// Tr(rho S) for sparse S.
double expect(const Matrix& rho, const SparseMatrix& s) {
  lindblad::cplx acc = 0.0;
  for (int k = 0; k < s.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(s, k); it; ++it) acc += it.value() * rho(it.col(), it.row());
  return acc.real();
}

void accumulate(const Matrix& rho, const std::array<SparseMatrix, 3>& j, SpinMoments& m) {
  for (int a = 0; a < 3; ++a) m.mean[a] += expect(rho, j[a]);
  for (int a = 0; a < 3; ++a) {
    for (int b = a; b < 3; ++b) {
      const SparseMatrix ab = j[a] * j[b];
      const SparseMatrix sym = a == b ? ab : SparseMatrix(0.5 * (ab + SparseMatrix(j[b] * j[a])));
      const double v = expect(rho, sym);
      m.second[a][b] += v;
      if (a != b) m.second[b][a] += v;
    }
  }
}

}  // namespace

SpinMoments spin_moments(const lindblad::DensityMatrix& rho) {
  SpinMoments m;
  if (rho.tag == lindblad::BasisTag::Full) {
    const auto& ops = lindblad::detail::full_operators(rho.n_atoms);
    accumulate(rho.blocks.front(), {ops.jx, ops.jy, ops.jz}, m);
    return m;
  }
  for (std::size_t k = 0; k < rho.blocks.size(); ++k) {
    const HalfInt j = rho.spins[k];
    const Eigen::Index d = rho.blocks[k].rows();
    std::array<SparseMatrix, 3> ops;
    const spin::SpinKind kinds[3] = {spin::SpinKind::Jx, spin::SpinKind::Jy, spin::SpinKind::Jz};
    for (int a = 0; a < 3; ++a) {
      ops[a] = spin::spin_matrix(j, kinds[a]);
      if (d < ops[a].rows()) ops[a] = SparseMatrix(ops[a].topLeftCorner(d, d));
    }
    accumulate(rho.blocks[k], ops, m);
  }
  return m;
}

BlochResult bloch_from_rho(const lindblad::DensityMatrix& rho) {
  if (rho.n_atoms < 1) throw BasisMismatch("state has no atoms");
  const SpinMoments m = spin_moments(rho);
  const double j = 0.5 * rho.n_atoms;
  BlochResult r;
  r.raw = m.mean;
  r.normalized = {m.mean[0] / j, m.mean[1] / j, m.mean[2] / j};
  return r;
}

}  // namespace dpt::obs
