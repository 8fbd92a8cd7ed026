#include <bit>
#include <map>
#include <mutex>

#include "dpt/errors.hpp"
#include "internal.hpp"

namespace dpt::lindblad {
namespace detail {

SparseMatrix identity(int dim) {
  SparseMatrix m(dim, dim);
  m.setIdentity();
  return m;
}

SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b) {
  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(static_cast<std::size_t>(a.nonZeros()) * b.nonZeros());
  for (int ka = 0; ka < a.outerSize(); ++ka)
    for (SparseMatrix::InnerIterator ia(a, ka); ia; ++ia)
      for (int kb = 0; kb < b.outerSize(); ++kb)
        for (SparseMatrix::InnerIterator ib(b, kb); ib; ++ib)
          trips.emplace_back(static_cast<int>(ia.row() * b.rows() + ib.row()),
                             static_cast<int>(ia.col() * b.cols() + ib.col()), ia.value() * ib.value());
  SparseMatrix m(a.rows() * b.rows(), a.cols() * b.cols());
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

const FullOperators& full_operators(int n) {
  if (n < 1 || n > kMaxBruteForceAtoms) throw SizeError("full space limited to 1 <= N <= 8");
  static std::mutex mutex;
  static std::map<int, FullOperators> cache;
  std::lock_guard<std::mutex> lock(mutex);
  if (auto it = cache.find(n); it != cache.end()) return it->second;

  const int dim = 1 << n;
  FullOperators ops;
  ops.n_atoms = n;
  ops.jminus = SparseMatrix(dim, dim);
  std::vector<Eigen::Triplet<cplx>> jz;
  for (int b = 0; b < dim; ++b) {
    jz.emplace_back(b, b, 0.5 * (2 * std::popcount(static_cast<unsigned>(b)) - n));
  }
  for (int site = 0; site < n; ++site) {
    std::vector<Eigen::Triplet<cplx>> t;
    for (int b = 0; b < dim; ++b) {
      if (b & (1 << site)) t.emplace_back(b ^ (1 << site), b, 1.0);
    }
    SparseMatrix s(dim, dim);
    s.setFromTriplets(t.begin(), t.end());
    ops.jminus += s;
    ops.sigma_minus.push_back(std::move(s));
  }
  ops.jplus = ops.jminus.adjoint();
  ops.jx = 0.5 * (ops.jplus + ops.jminus);
  ops.jy = cplx(0.0, -0.5) * (ops.jplus - ops.jminus);
  ops.jz = SparseMatrix(dim, dim);
  ops.jz.setFromTriplets(jz.begin(), jz.end());
  return cache.emplace(n, std::move(ops)).first->second;
}

namespace {

class FullLiouvillian final : public Liouvillian {
public:
  FullLiouvillian(const ModelParams& p)
      : Liouvillian(BasisTag::Full, p, static_cast<std::size_t>(1) << (2 * p.n_atoms)),
        dim_(1 << p.n_atoms) {
    const auto& ops = full_operators(p.n_atoms);
    const double inv_n = 1.0 / p.n_atoms;
    const SparseMatrix h = SparseMatrix(p.vx * inv_n * (ops.jx * ops.jx)) +
                           SparseMatrix(p.vy * inv_n * (ops.jy * ops.jy)) + p.omega * ops.jx;
    SparseMatrix k = cplx(0.0, -1.0) * h;
    if (p.gamma_i != 0.0) {
      for (const auto& s : ops.sigma_minus) jumps_.push_back({s, p.gamma_i});
    }
    if (p.gamma_c != 0.0) jumps_.push_back({ops.jminus, p.gamma_c * inv_n});
    for (const auto& [l, rate] : jumps_) k -= SparseMatrix((0.5 * rate) * SparseMatrix(l.adjoint() * l));
    k_ = k;
    k_.makeCompressed();
  }

  void apply(const cplx* in, cplx* out) const override {
    Eigen::Map<const Matrix> rho(in, dim_, dim_);
    Eigen::Map<Matrix> res(out, dim_, dim_);
    res = k_ * rho;
    res += rho * SparseMatrix(k_.adjoint());
    for (const auto& [l, rate] : jumps_) {
      const Matrix tmp = l * rho;
      res += rate * (tmp * SparseMatrix(l.adjoint()));
    }
  }

  SparseMatrix to_sparse() const override {
    const SparseMatrix id = identity(dim_);
    SparseMatrix m = kron(id, k_) + kron(SparseMatrix(k_.conjugate()), id);
    for (const auto& [l, rate] : jumps_) m += rate * kron(SparseMatrix(l.conjugate()), l);
    m.makeCompressed();
    return m;
  }

  DensityMatrix zero_state() const override { return DensityMatrix::zeros(BasisTag::Full, n_atoms()); }

private:
  int dim_;
  SparseMatrix k_;
  std::vector<std::pair<SparseMatrix, double>> jumps_;
};

}  // namespace
}  // namespace detail

LiouvillianPtr brute_force_liouvillian(int n_atoms, const ModelParams& params) {
  if (n_atoms < 1 || n_atoms > kMaxBruteForceAtoms) throw SizeError("brute force limited to N <= 8");
  ModelParams p = params;
  p.n_atoms = n_atoms;
  p.validate();
  return std::make_shared<detail::FullLiouvillian>(p);
}

}  // namespace dpt::lindblad
