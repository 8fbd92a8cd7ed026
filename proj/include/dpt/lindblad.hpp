#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "dpt/collective_spin.hpp"
#include "dpt/half_int.hpp"
#include "dpt/model.hpp"
#include "dpt/ode.hpp"

namespace dpt::lindblad {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using SparseMatrix = spin::SparseMatrix;

enum class BasisTag { Dicke, Perm, Full };
const char* to_string(BasisTag t);
BasisTag basis_from_string(const std::string& s);

// Permutation-invariant decomposition of N spins-1/2 into spin-j multiplets,
// j = N/2, N/2 - 1, ..., each appearing d_j times.
class PermBasis {
public:
  struct Block {
    HalfInt j;
    int dim;             // 2j + 1
    double degeneracy;   // d_j (exact below 2^53)
    std::size_t offset;  // start of this block in the flat vector
  };

  explicit PermBasis(int n_atoms);

  int n_atoms() const { return n_atoms_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  std::size_t flat_size() const { return flat_size_; }
  int block_index(HalfInt j) const;
  // Flat offset of element (m, m') in block j (column-major inside a block).
  std::size_t index(HalfInt j, HalfInt m, HalfInt mp) const;

private:
  int n_atoms_;
  std::vector<Block> blocks_;
  std::size_t flat_size_ = 0;
};

// d_j = N! (2j+1) / ((N/2+j+1)! (N/2-j)!), in floating point.
double degeneracy(int n_atoms, HalfInt j);
// Exact integer d_j for N <= 62.
std::uint64_t degeneracy_exact(int n_atoms, HalfInt j);

// A state on one of the three bases. Perm blocks hold the block weight
// d_j * rho_j, so the trace is the plain sum of block traces and the full
// state is the direct sum of (block / d_j) (x) I_{d_j}.
struct DensityMatrix {
  BasisTag tag = BasisTag::Dicke;
  int n_atoms = 0;
  std::vector<HalfInt> spins;  // j of each block
  std::vector<Matrix> blocks;

  // All spins down.
  static DensityMatrix ground(BasisTag tag, int n_atoms, int dicke_window = 0);
  // Zero state with the block layout of the given basis.
  static DensityMatrix zeros(BasisTag tag, int n_atoms, int dicke_window = 0);

  std::size_t flat_size() const;
  void to_flat(cplx* out) const;
  void from_flat(const cplx* in);

  cplx trace() const;
  double hermiticity_error() const;  // max |rho - rho^dag|
  double min_eigenvalue() const;     // over all blocks
  void normalize();                  // unit trace, Hermitian part kept
};

// 1/2 ||a - b||_1 on a common basis.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

// Embedding of a Dicke or Perm state into the 2^N space (N <= 8).
DensityMatrix to_full(const DensityMatrix& rho);

// L[rho] as a linear map on flat (column-major, block-concatenated) states.
class Liouvillian {
public:
  virtual ~Liouvillian() = default;

  BasisTag tag() const { return tag_; }
  int n_atoms() const { return params_.n_atoms; }
  const ModelParams& params() const { return params_; }
  std::size_t size() const { return size_; }

  virtual void apply(const cplx* in, cplx* out) const = 0;
  virtual SparseMatrix to_sparse() const = 0;
  // Layout of a state this map acts on.
  virtual DensityMatrix zero_state() const = 0;

  DensityMatrix apply(const DensityMatrix& rho) const;

protected:
  Liouvillian(BasisTag tag, ModelParams params, std::size_t size)
      : tag_(tag), params_(params), size_(size) {}

private:
  BasisTag tag_;
  ModelParams params_;
  std::size_t size_;
};

using LiouvillianPtr = std::shared_ptr<const Liouvillian>;

// Collective decay on the Dicke manifold. dicke_window > 0 keeps only the
// lowest levels (truncated ladder operators; trace is still preserved).
LiouvillianPtr build_liouvillian_collective(const spin::DickeBasis& basis, const ModelParams& params,
                                            int dicke_window = 0);

// Independent decay on the permutation-invariant blocks. Collective decay is
// also accepted and acts inside each block.
LiouvillianPtr build_liouvillian_independent(const PermBasis& basis, const ModelParams& params);

// Full 2^N construction with per-site operators, N <= 8. Both channels allowed.
LiouvillianPtr brute_force_liouvillian(int n_atoms, const ModelParams& params);

inline constexpr int kMaxBruteForceAtoms = 8;

struct StateTrajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  ode::Tolerances tolerances;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
};

// Adaptive integration sampled at the given times (ascending, >= 0). The
// initial state is included when times.front() == 0.
StateTrajectory evolve(const Liouvillian& liou, const DensityMatrix& rho0,
                       const std::vector<double>& times, ode::Tolerances tol = {});
// Convenience: num_samples equally spaced samples on [0, t_end].
StateTrajectory evolve(const Liouvillian& liou, const DensityMatrix& rho0, double t_end,
                       std::size_t num_samples, ode::Tolerances tol = {});

enum class SteadyMethod { Auto, TimeMarch, NullSpace, DriveClosedForm };
const char* to_string(SteadyMethod m);

struct SteadyOptions {
  SteadyMethod method = SteadyMethod::Auto;
  double residual_tol = 1e-9;       // ||L[rho]||_F at which marching stops
  double t_max = 0.0;               // 0: 50 tau when tau is finite, else 500 / gamma
  ode::Tolerances tol{1e-9, 1e-11};
  std::size_t direct_max_size = 20'000;      // sparse LU up to this flat length
  std::size_t nullspace_max_size = 250'000;  // preconditioned GMRES up to this one (Auto)
};

struct SteadyResult {
  DensityMatrix rho;
  SteadyMethod method = SteadyMethod::Auto;
  double residual = 0.0;
  double t_reached = 0.0;
  std::string initial_state = "all-down";
  std::string solver;  // e.g. "sparse-lu", "gmres-ilut, 31 iterations"
};

// Auto: sparse LU for small maps, then the factorized drive state when it
// applies, then preconditioned GMRES, then time marching. Throws
// NonConvergence when the time cap is hit or a solve misses residual_tol.
SteadyResult steady_state(const Liouvillian& liou, const SteadyOptions& opts = {});

// Default time cap for a parameter set.
double default_time_cap(const ModelParams& params);

// Exact steady state of H = Omega Jx with collective decay only (no J^2 terms).
DensityMatrix drive_closed_form(int n_atoms, double omega, double gamma_c);

// Frobenius norm of L[rho] over the flat representation.
double residual_norm(const Liouvillian& liou, const DensityMatrix& rho);

// Binary container: 8-byte magic, u64 header length, JSON header, then
// row-major complex doubles (re, im) for every block of every state.
struct StateFile {
  ModelParams params;
  ode::Tolerances tolerances;
  std::vector<double> times;  // one per state; empty for a single state
  std::vector<DensityMatrix> states;
  std::string note;
};

void write_states(const std::string& path, const StateFile& file);
StateFile read_states(const std::string& path);

}  // namespace dpt::lindblad
