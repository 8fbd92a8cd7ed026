#include <cmath>

#include "dpt/errors.hpp"
#include "internal.hpp"

namespace dpt::lindblad {

// Local decay sum_n sigma_-^n rho sigma_+^n moves (j, m, m') to (j', m-1, m'-1),
// j' in {j, j-1, j+1}. Coupling one spin-1/2 to the (N-1)-atom remainder gives
// the rates below; in block-weight variables (d_j rho_j) the degeneracy ratio
// drops out.
LiouvillianPtr build_liouvillian_independent(const PermBasis& basis, const ModelParams& params) {
  params.validate();
  if (params.n_atoms != basis.n_atoms()) throw BasisMismatch("params.n_atoms differs from the basis");
  const int n = basis.n_atoms();
  const double half_n = 0.5 * n;
  const double gi = params.gamma_i;

  std::vector<HalfInt> spins;
  std::vector<detail::BandedBlock> blocks;
  for (const auto& b : basis.blocks()) {
    spins.push_back(b.j);
    blocks.push_back(detail::make_block(b.j, n, params, b.dim));
    blocks.back().offset = b.offset;
  }

  std::vector<detail::Transfer> transfers;
  const int nb = static_cast<int>(blocks.size());
  for (int k = 0; k < nb; ++k) {
    const HalfInt jh = spins[k];
    const double j = jh.value();
    const int dim = jh.twice + 1;
    if (params.gamma_c != 0.0 && dim > 1) {
      transfers.push_back({k, k, -1, params.gamma_c / n, detail::lowering_amplitudes(jh, dim)});
    }
    if (gi == 0.0) continue;

    std::vector<double> a(dim), bb(dim), dd(dim);
    for (int i = 0; i < dim; ++i) {
      const double m = -j + i;
      a[i] = std::sqrt(std::max(0.0, (j + m) * (j - m + 1.0)));
      bb[i] = std::sqrt(std::max(0.0, (j + m) * (j + m - 1.0)));
      dd[i] = std::sqrt(std::max(0.0, (j - m + 1.0) * (j - m + 2.0)));
    }
    if (j > 0.0) {
      transfers.push_back({k, k, -1, gi * (half_n + 1.0) / (2.0 * j * (j + 1.0)), a});
    }
    if (k + 1 < nb && j >= 1.0) {
      transfers.push_back({k, k + 1, -2, gi * (half_n + j + 1.0) / (2.0 * j * (2.0 * j + 1.0)), bb});
    }
    if (k > 0) {
      transfers.push_back({k, k - 1, 0, gi * (half_n - j) / (2.0 * (j + 1.0) * (2.0 * j + 1.0)), dd});
    }
  }
  return std::make_shared<detail::BlockLiouvillian>(BasisTag::Perm, params, std::move(spins),
                                                    std::move(blocks), std::move(transfers), 0);
}

}  // namespace dpt::lindblad
