#include <algorithm>
#include <bit>
#include <cmath>

#include "dpt/errors.hpp"
#include "internal.hpp"

namespace dpt::lindblad {

const char* to_string(BasisTag t) {
  switch (t) {
    case BasisTag::Dicke: return "dicke";
    case BasisTag::Perm: return "perm";
    case BasisTag::Full: return "full";
  }
  return "?";
}

BasisTag basis_from_string(const std::string& s) {
  if (s == "dicke") return BasisTag::Dicke;
  if (s == "perm") return BasisTag::Perm;
  if (s == "full") return BasisTag::Full;
  throw InvalidParameter("unknown basis tag: " + s);
}

DensityMatrix DensityMatrix::zeros(BasisTag tag, int n, int window) {
  if (n < 1) throw InvalidParameter("n_atoms must be >= 1");
  DensityMatrix r;
  r.tag = tag;
  r.n_atoms = n;
  switch (tag) {
    case BasisTag::Dicke: {
      const int dim = window > 0 ? std::min(window, n + 1) : n + 1;
      r.spins.push_back(HalfInt(n));
      r.blocks.push_back(Matrix::Zero(dim, dim));
      break;
    }
    case BasisTag::Perm:
      for (int tj = n; tj >= 0; tj -= 2) {
        r.spins.push_back(HalfInt(tj));
        r.blocks.push_back(Matrix::Zero(tj + 1, tj + 1));
      }
      break;
    case BasisTag::Full: {
      if (n > kMaxBruteForceAtoms) throw SizeError("full space limited to N <= 8");
      const int dim = 1 << n;
      r.spins.push_back(HalfInt(n));
      r.blocks.push_back(Matrix::Zero(dim, dim));
      break;
    }
  }
  return r;
}

DensityMatrix DensityMatrix::ground(BasisTag tag, int n, int window) {
  DensityMatrix r = zeros(tag, n, window);
  // Lowest index is m = -j in the Dicke/Perm blocks and the all-zero bit string in full space.
  r.blocks.front()(0, 0) = 1.0;
  return r;
}

std::size_t DensityMatrix::flat_size() const {
  std::size_t s = 0;
  for (const auto& b : blocks) s += static_cast<std::size_t>(b.size());
  return s;
}

void DensityMatrix::to_flat(cplx* out) const {
  for (const auto& b : blocks) {
    std::copy(b.data(), b.data() + b.size(), out);
    out += b.size();
  }
}

void DensityMatrix::from_flat(const cplx* in) {
  for (auto& b : blocks) {
    std::copy(in, in + b.size(), b.data());
    in += b.size();
  }
}

cplx DensityMatrix::trace() const {
  cplx t = 0.0;
  for (const auto& b : blocks) t += b.trace();
  return t;
}

double DensityMatrix::hermiticity_error() const {
  double e = 0.0;
  for (const auto& b : blocks) {
    if (b.size() == 0) continue;
    e = std::max(e, (b - b.adjoint()).cwiseAbs().maxCoeff());
  }
  return e;
}

double DensityMatrix::min_eigenvalue() const {
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const Matrix h = 0.5 * (blocks[k] + blocks[k].adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    const double w = tag == BasisTag::Perm ? degeneracy(n_atoms, spins[k]) : 1.0;
    lo = std::min(lo, es.eigenvalues()(0) / w);
  }
  return lo;
}

void DensityMatrix::normalize() {
  const double t = trace().real();
  if (!(std::abs(t) > 0.0)) throw DegenerateInput("zero trace");
  for (auto& b : blocks) b = (0.5 / t) * (b + b.adjoint()).eval();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.tag != b.tag || a.n_atoms != b.n_atoms || a.blocks.size() != b.blocks.size()) {
    throw BasisMismatch("trace distance needs states on the same basis");
  }
  double s = 0.0;
  for (std::size_t k = 0; k < a.blocks.size(); ++k) {
    if (a.blocks[k].rows() != b.blocks[k].rows()) throw BasisMismatch("block sizes differ");
    const Matrix d = a.blocks[k] - b.blocks[k];
    const Matrix h = 0.5 * (d + d.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    s += es.eigenvalues().cwiseAbs().sum();
  }
  return 0.5 * s;
}

namespace {

// Orthonormal copies |j, m, c> of the spin-j multiplets in the 2^N space;
// result(:, c * dim + i) is the state with m = -j + i.
Eigen::MatrixXd multiplet_vectors(int n, HalfInt j) {
  const auto& ops = detail::full_operators(n);
  const int full = 1 << n;
  const int dim = j.twice + 1;
  const int k_top = (n + j.twice) / 2;  // excitations at m = j

  std::vector<int> sector, upper;
  for (int b = 0; b < full; ++b) {
    if (std::popcount(static_cast<unsigned>(b)) == k_top) sector.push_back(b);
    if (std::popcount(static_cast<unsigned>(b)) == k_top + 1) upper.push_back(b);
  }
  const Eigen::MatrixXd jp = Eigen::MatrixXd(ops.jplus.real());
  Eigen::MatrixXd hw;
  if (upper.empty()) {
    hw = Eigen::MatrixXd::Identity(static_cast<int>(sector.size()), static_cast<int>(sector.size()));
  } else {
    Eigen::MatrixXd m(upper.size(), sector.size());
    for (std::size_t r = 0; r < upper.size(); ++r)
      for (std::size_t c = 0; c < sector.size(); ++c) m(r, c) = jp(upper[r], sector[c]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    hw = lu.kernel();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(hw);
  const int copies = static_cast<int>(hw.cols());
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(hw.rows(), copies);

  const Eigen::MatrixXd jm = Eigen::MatrixXd(ops.jminus.real());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(full, copies * dim);
  for (int c = 0; c < copies; ++c) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(full);
    for (std::size_t s = 0; s < sector.size(); ++s) v(sector[s]) = q(s, c);
    out.col(c * dim + dim - 1) = v;
    for (int i = dim - 1; i > 0; --i) {
      const double amp = spin::ladder_up(j, HalfInt(2 * (i - 1) - j.twice));
      v = jm * v / amp;
      out.col(c * dim + i - 1) = v;
    }
  }
  return out;
}

}  // namespace

DensityMatrix to_full(const DensityMatrix& rho) {
  if (rho.tag == BasisTag::Full) return rho;
  const int n = rho.n_atoms;
  DensityMatrix out = DensityMatrix::zeros(BasisTag::Full, n);
  Matrix& f = out.blocks.front();
  for (std::size_t k = 0; k < rho.blocks.size(); ++k) {
    const HalfInt j = rho.spins[k];
    const int dim = j.twice + 1;
    const Eigen::MatrixXd vecs = multiplet_vectors(n, j);
    const int copies = static_cast<int>(vecs.cols()) / dim;
    const double w = rho.tag == BasisTag::Perm ? 1.0 / copies : 1.0;
    Matrix blk = Matrix::Zero(dim, dim);
    const Matrix& src = rho.blocks[k];
    blk.topLeftCorner(src.rows(), src.cols()) = src;
    for (int c = 0; c < copies; ++c) {
      const Eigen::MatrixXd v = vecs.middleCols(c * dim, dim);
      f += w * (v.cast<cplx>() * blk * v.transpose().cast<cplx>());
    }
  }
  return out;
}

}  // namespace dpt::lindblad
