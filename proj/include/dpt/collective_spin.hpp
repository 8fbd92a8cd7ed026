#pragma once

#include <complex>
#include <memory>
#include <string_view>

#include <Eigen/Sparse>

#include "dpt/half_int.hpp"

namespace dpt::spin {

using cplx = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::ColMajor>;

// Maximal-j (Dicke) manifold of N spin-1/2 atoms. Index i <-> m = -j + i.
class DickeBasis {
public:
  explicit DickeBasis(int n_atoms);

  int n_atoms() const { return n_atoms_; }
  HalfInt j() const { return HalfInt(n_atoms_); }
  int dim() const { return n_atoms_ + 1; }

  // m for basis index i (ascending from -j).
  HalfInt m(int index) const { return HalfInt(2 * index - n_atoms_); }
  int index_of(HalfInt m) const;

  bool operator==(const DickeBasis& o) const { return n_atoms_ == o.n_atoms_; }

private:
  int n_atoms_;
};

DickeBasis build_basis(int n_atoms);

enum class SpinKind { Jx, Jy, Jz, Jplus, Jminus };
std::string_view to_string(SpinKind k);

// A collective spin operator on a Dicke basis. Immutable and shareable.
class SpinOperator {
public:
  SpinOperator(DickeBasis basis, SpinKind kind, SparseMatrix matrix)
      : basis_(basis), kind_(kind), matrix_(std::make_shared<const SparseMatrix>(std::move(matrix))) {}

  const DickeBasis& basis() const { return basis_; }
  SpinKind kind() const { return kind_; }
  const SparseMatrix& matrix() const { return *matrix_; }

private:
  DickeBasis basis_;
  SpinKind kind_;
  std::shared_ptr<const SparseMatrix> matrix_;
};

// Cached per (N, kind); safe to call concurrently.
SpinOperator build_operator(const DickeBasis& basis, SpinKind kind);

// <m+1|J+|m> = sqrt(j(j+1) - m(m+1)) for a spin-j representation.
double ladder_up(HalfInt j, HalfInt m);

// Spin-j matrices for an arbitrary j (used by the permutation-invariant blocks).
SparseMatrix spin_matrix(HalfInt j, SpinKind kind);

// Clebsch-Gordan coefficient <j1 m1; j2 m2 | J M> (Condon-Shortley). Exactly 0
// when a selection rule fails.
double coupling_coefficient(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M);
double coupling_coefficient(double j1, double m1, double j2, double m2, double J, double M);

}  // namespace dpt::spin
