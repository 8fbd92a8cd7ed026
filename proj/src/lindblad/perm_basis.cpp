#include <cmath>

#include "dpt/errors.hpp"
#include "dpt/lindblad.hpp"

namespace dpt::lindblad {

double degeneracy(int n, HalfInt j) {
  const int a = (n + j.twice) / 2;  // N/2 + j
  const int b = (n - j.twice) / 2;  // N/2 - j
  const double lg = std::lgamma(n + 1.0) + std::log(j.twice + 1.0) - std::lgamma(a + 2.0) -
                    std::lgamma(b + 1.0);
  return n <= 62 ? static_cast<double>(degeneracy_exact(n, j)) : std::exp(lg);
}

std::uint64_t degeneracy_exact(int n, HalfInt j) {
  if (n > 62) throw SizeError("exact degeneracy limited to N <= 62");
  // d_j = C(N, N/2 - j) - C(N, N/2 - j - 1)
  auto binom = [](int nn, int k) -> std::uint64_t {
    if (k < 0 || k > nn) return 0;
    unsigned __int128 r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<unsigned>(nn - k + i) / static_cast<unsigned>(i);
    return static_cast<std::uint64_t>(r);
  };
  const int b = (n - j.twice) / 2;
  return binom(n, b) - binom(n, b - 1);
}

PermBasis::PermBasis(int n_atoms) : n_atoms_(n_atoms) {
  if (n_atoms < 1) throw InvalidParameter("n_atoms must be >= 1");
  std::size_t off = 0;
  for (int tj = n_atoms; tj >= 0; tj -= 2) {
    const HalfInt j(tj);
    const int dim = tj + 1;
    blocks_.push_back({j, dim, degeneracy(n_atoms, j), off});
    off += static_cast<std::size_t>(dim) * dim;
  }
  flat_size_ = off;
}

int PermBasis::block_index(HalfInt j) const {
  const int k = (n_atoms_ - j.twice);
  if (j.twice < 0 || k < 0 || k % 2 != 0) throw InvalidParameter("j not present in this basis");
  return k / 2;
}

std::size_t PermBasis::index(HalfInt j, HalfInt m, HalfInt mp) const {
  const Block& b = blocks_[block_index(j)];
  if (abs(m) > j || abs(mp) > j || (m - j).twice % 2 != 0 || (mp - j).twice % 2 != 0) {
    throw InvalidParameter("m outside the block");
  }
  const int i = (m.twice + j.twice) / 2;
  const int k = (mp.twice + j.twice) / 2;
  return b.offset + static_cast<std::size_t>(i) + static_cast<std::size_t>(k) * b.dim;
}

}  // namespace dpt::lindblad
