#include <algorithm>

#include "dpt/errors.hpp"
#include "dpt/kernels.hpp"
#include "internal.hpp"

namespace dpt::lindblad {

DensityMatrix Liouvillian::apply(const DensityMatrix& rho) const {
  if (rho.tag != tag_ || rho.n_atoms != params_.n_atoms || rho.flat_size() != size_) {
    throw BasisMismatch("state does not match the Liouvillian basis");
  }
  std::vector<cplx> in(size_), out(size_);
  rho.to_flat(in.data());
  apply(in.data(), out.data());
  DensityMatrix r = rho;
  r.from_flat(out.data());
  return r;
}

namespace detail {

namespace {
std::size_t total_size(const std::vector<BandedBlock>& blocks) {
  std::size_t s = 0;
  for (const auto& b : blocks) s += static_cast<std::size_t>(b.dim) * b.dim;
  return s;
}
}  // namespace

BlockLiouvillian::BlockLiouvillian(BasisTag tag, ModelParams params, std::vector<HalfInt> spins,
                                   std::vector<BandedBlock> blocks, std::vector<Transfer> transfers,
                                   int window)
    : Liouvillian(tag, params, total_size(blocks)), spins_(std::move(spins)),
      blocks_(std::move(blocks)), transfers_(std::move(transfers)), window_(window) {}

void BlockLiouvillian::apply(const cplx* in, cplx* out) const {
  const auto& K = kernels::active();
  std::fill(out, out + size(), cplx(0.0));
  for (const BandedBlock& blk : blocks_) {
    const int d = blk.dim;
    const cplx* rho = in + blk.offset;
    cplx* res = out + blk.offset;
    for (int k = 0; k < d; ++k) {
      cplx* col = res + static_cast<std::size_t>(k) * d;
      for (int b = -2; b <= 2; ++b) {
        // K rho: col(i) += K(i, i+b) rho(i+b, k)
        const int i0 = std::max(0, -b), i1 = std::min(d, d - b);
        if (i1 > i0) {
          K.cmul_acc(i1 - i0, blk.band[b + 2].data() + i0,
                     rho + static_cast<std::size_t>(k) * d + i0 + b, col + i0);
        }
        // rho K^dag: col += conj(K(k, k+b)) rho(:, k+b)
        const int c = k + b;
        if (c >= 0 && c < d) {
          const cplx coef = std::conj(blk.band[b + 2][k]);
          if (coef != 0.0) K.caxpy(d, coef, rho + static_cast<std::size_t>(c) * d, col);
        }
      }
    }
  }
  for (const Transfer& t : transfers_) {
    const BandedBlock& s = blocks_[t.src];
    const BandedBlock& dd = blocks_[t.dst];
    const int ds = s.dim, dt = dd.dim, sh = t.shift;
    const int i0 = std::max(0, -sh), i1 = std::min(ds, dt - sh);
    if (i1 <= i0) continue;
    for (int k = i0; k < i1; ++k) {
      const double fk = t.f[k];
      if (fk == 0.0) continue;
      K.caxpy_weighted(i1 - i0, cplx(t.scale * fk, 0.0), t.f.data() + i0,
                       in + s.offset + static_cast<std::size_t>(k) * ds + i0,
                       out + dd.offset + static_cast<std::size_t>(k + sh) * dt + i0 + sh);
    }
  }
}

SparseMatrix BlockLiouvillian::to_sparse() const {
  std::vector<Eigen::Triplet<cplx>> trips;
  for (const BandedBlock& blk : blocks_) {
    const int d = blk.dim;
    const auto at = [&](int i, int k) { return static_cast<int>(blk.offset + i + static_cast<std::size_t>(k) * d); };
    for (int k = 0; k < d; ++k) {
      for (int i = 0; i < d; ++i) {
        for (int b = -2; b <= 2; ++b) {
          if (i + b >= 0 && i + b < d) {
            const cplx v = blk.band[b + 2][i];
            if (v != 0.0) trips.emplace_back(at(i, k), at(i + b, k), v);
          }
          if (k + b >= 0 && k + b < d) {
            const cplx v = std::conj(blk.band[b + 2][k]);
            if (v != 0.0) trips.emplace_back(at(i, k), at(i, k + b), v);
          }
        }
      }
    }
  }
  for (const Transfer& t : transfers_) {
    const BandedBlock& s = blocks_[t.src];
    const BandedBlock& dd = blocks_[t.dst];
    const int sh = t.shift;
    for (int k = 0; k < s.dim; ++k) {
      if (k + sh < 0 || k + sh >= dd.dim || t.f[k] == 0.0) continue;
      for (int i = 0; i < s.dim; ++i) {
        if (i + sh < 0 || i + sh >= dd.dim || t.f[i] == 0.0) continue;
        const auto row = dd.offset + (i + sh) + static_cast<std::size_t>(k + sh) * dd.dim;
        const auto col = s.offset + i + static_cast<std::size_t>(k) * s.dim;
        trips.emplace_back(static_cast<int>(row), static_cast<int>(col), t.scale * t.f[i] * t.f[k]);
      }
    }
  }
  const int n = static_cast<int>(size());
  SparseMatrix m(n, n);
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

DensityMatrix BlockLiouvillian::zero_state() const {
  return DensityMatrix::zeros(tag(), n_atoms(), tag() == BasisTag::Dicke ? window_ : 0);
}

BandedBlock make_block(HalfInt j, int n, const ModelParams& p, int dim) {
  const int full = j.twice + 1;
  if (dim <= 0 || dim > full) dim = full;
  using spin::SpinKind;
  const SparseMatrix jx = spin::spin_matrix(j, SpinKind::Jx);
  const SparseMatrix jy = spin::spin_matrix(j, SpinKind::Jy);
  const SparseMatrix jz = spin::spin_matrix(j, SpinKind::Jz);
  const SparseMatrix jp = spin::spin_matrix(j, SpinKind::Jplus);
  const SparseMatrix jm = spin::spin_matrix(j, SpinKind::Jminus);
  const double inv_n = 1.0 / n;
  SparseMatrix h = SparseMatrix(p.vx * inv_n * (jx * jx)) + SparseMatrix(p.vy * inv_n * (jy * jy)) +
                   p.omega * jx;
  const double c = p.gamma_c / (2.0 * n);
  SparseMatrix k = cplx(0.0, -1.0) * h - c * SparseMatrix(jp * jm) -
                   (0.5 * p.gamma_i) * (jz + SparseMatrix((0.5 * n) * identity(full)));
  const Matrix dense = Matrix(k).topLeftCorner(dim, dim);

  BandedBlock blk;
  blk.dim = dim;
  for (int b = -2; b <= 2; ++b) {
    auto& band = blk.band[b + 2];
    band.assign(dim, cplx(0.0));
    for (int i = 0; i < dim; ++i) {
      if (i + b >= 0 && i + b < dim) band[i] = dense(i, i + b);
    }
  }
  return blk;
}

std::vector<double> lowering_amplitudes(HalfInt j, int dim) {
  std::vector<double> f(dim, 0.0);
  for (int i = 1; i < dim; ++i) f[i] = spin::ladder_up(j, HalfInt(2 * (i - 1) - j.twice));
  return f;
}

}  // namespace detail
}  // namespace dpt::lindblad
