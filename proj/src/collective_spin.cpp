#include "dpt/collective_spin.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "dpt/errors.hpp"

namespace dpt::spin {

DickeBasis::DickeBasis(int n_atoms) : n_atoms_(n_atoms) {
  if (n_atoms < 1) throw InvalidParameter("n_atoms must be >= 1");
}

int DickeBasis::index_of(HalfInt m) const {
  const int twice_i = m.twice + n_atoms_;
  if (twice_i < 0 || twice_i > 2 * n_atoms_ || twice_i % 2 != 0) {
    throw InvalidParameter("m outside the Dicke manifold");
  }
  return twice_i / 2;
}

DickeBasis build_basis(int n_atoms) { return DickeBasis(n_atoms); }

std::string_view to_string(SpinKind k) {
  switch (k) {
    case SpinKind::Jx: return "Jx";
    case SpinKind::Jy: return "Jy";
    case SpinKind::Jz: return "Jz";
    case SpinKind::Jplus: return "J+";
    case SpinKind::Jminus: return "J-";
  }
  return "?";
}

double ladder_up(HalfInt j, HalfInt m) {
  const double jj = j.value();
  const double mm = m.value();
  const double v = jj * (jj + 1.0) - mm * (mm + 1.0);
  return v > 0.0 ? std::sqrt(v) : 0.0;
}

SparseMatrix spin_matrix(HalfInt j, SpinKind kind) {
  const int dim = j.twice + 1;
  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(2 * dim);
  for (int i = 0; i < dim; ++i) {
    const HalfInt m(2 * i - j.twice);
    const double up = (i + 1 < dim) ? ladder_up(j, m) : 0.0;
    switch (kind) {
      case SpinKind::Jz:
        if (m.twice != 0) trips.emplace_back(i, i, cplx(m.value(), 0.0));
        break;
      case SpinKind::Jplus:
        if (up != 0.0) trips.emplace_back(i + 1, i, cplx(up, 0.0));
        break;
      case SpinKind::Jminus:
        if (up != 0.0) trips.emplace_back(i, i + 1, cplx(up, 0.0));
        break;
      case SpinKind::Jx:
        if (up != 0.0) {
          trips.emplace_back(i + 1, i, cplx(0.5 * up, 0.0));
          trips.emplace_back(i, i + 1, cplx(0.5 * up, 0.0));
        }
        break;
      case SpinKind::Jy:
        // (J+ - J-)/(2i): <m+1|Jy|m> = -i up/2, <m|Jy|m+1> = +i up/2.
        if (up != 0.0) {
          trips.emplace_back(i + 1, i, cplx(0.0, -0.5 * up));
          trips.emplace_back(i, i + 1, cplx(0.0, 0.5 * up));
        }
        break;
    }
  }
  SparseMatrix out(dim, dim);
  out.setFromTriplets(trips.begin(), trips.end());
  out.makeCompressed();
  return out;
}

SpinOperator build_operator(const DickeBasis& basis, SpinKind kind) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, SpinOperator> cache;
  const auto key = std::make_pair(basis.n_atoms(), static_cast<int>(kind));
  {
    std::lock_guard<std::mutex> lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  SpinOperator op(basis, kind, spin_matrix(basis.j(), kind));
  std::lock_guard<std::mutex> lock(mutex);
  auto [it, inserted] = cache.emplace(key, op);
  return it->second;
}

}  // namespace dpt::spin
