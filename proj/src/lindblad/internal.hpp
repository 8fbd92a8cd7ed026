#pragma once

#include <array>
#include <vector>

#include "dpt/lindblad.hpp"

namespace dpt::lindblad::detail {

// K = -iH - (anti-commutator part) restricted to one block, stored as five
// diagonals: band[b + 2][i] = K(i, i + b).
struct BandedBlock {
  int dim = 0;
  std::size_t offset = 0;
  std::array<std::vector<cplx>, 5> band;
};

// out_dst(i + shift, k + shift) += scale * f[i] * f[k] * rho_src(i, k).
struct Transfer {
  int src = 0;
  int dst = 0;
  int shift = 0;
  double scale = 0.0;
  std::vector<double> f;
};

// Shared engine of the Dicke and permutation-invariant backends.
class BlockLiouvillian final : public Liouvillian {
public:
  BlockLiouvillian(BasisTag tag, ModelParams params, std::vector<HalfInt> spins,
                   std::vector<BandedBlock> blocks, std::vector<Transfer> transfers, int window);

  void apply(const cplx* in, cplx* out) const override;
  SparseMatrix to_sparse() const override;
  DensityMatrix zero_state() const override;

  int window() const { return window_; }

private:
  std::vector<HalfInt> spins_;
  std::vector<BandedBlock> blocks_;
  std::vector<Transfer> transfers_;
  int window_;
};

// Banded K for spin j with N atoms, optionally truncated to the lowest `dim` levels.
BandedBlock make_block(HalfInt j, int n_atoms, const ModelParams& p, int dim);

// Lowering amplitudes <m-1|J-|m> indexed by the source level, truncated to dim.
std::vector<double> lowering_amplitudes(HalfInt j, int dim);

// Collective operators on the 2^N space. Bit n set = atom n excited.
struct FullOperators {
  int n_atoms = 0;
  std::vector<SparseMatrix> sigma_minus;  // one per site
  SparseMatrix jminus, jplus, jx, jy, jz;
};
const FullOperators& full_operators(int n_atoms);

SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b);
SparseMatrix identity(int dim);

}  // namespace dpt::lindblad::detail
