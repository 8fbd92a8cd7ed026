#include "dpt/errors.hpp"
#include "internal.hpp"

namespace dpt::lindblad {

LiouvillianPtr build_liouvillian_collective(const spin::DickeBasis& basis, const ModelParams& params,
                                            int dicke_window) {
  params.validate();
  if (params.gamma_i != 0.0) {
    throw InvalidParameter("the Dicke backend needs gamma_i = 0 (independent decay leaves the manifold)");
  }
  if (params.n_atoms != basis.n_atoms()) throw BasisMismatch("params.n_atoms differs from the basis");
  if (dicke_window < 0) throw InvalidParameter("window must be >= 0");
  const int n = basis.n_atoms();
  const int dim = dicke_window > 0 ? std::min(dicke_window, n + 1) : n + 1;

  std::vector<detail::BandedBlock> blocks{detail::make_block(basis.j(), n, params, dim)};
  std::vector<detail::Transfer> transfers;
  if (params.gamma_c != 0.0) {
    transfers.push_back({0, 0, -1, params.gamma_c / n, detail::lowering_amplitudes(basis.j(), dim)});
  }
  return std::make_shared<detail::BlockLiouvillian>(BasisTag::Dicke, params,
                                                    std::vector<HalfInt>{basis.j()}, std::move(blocks),
                                                    std::move(transfers), dim < n + 1 ? dim : 0);
}

}  // namespace dpt::lindblad
