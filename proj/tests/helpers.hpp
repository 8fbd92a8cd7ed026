#pragma once

#include <random>

#include "dpt/lindblad.hpp"

namespace testutil {

// Random positive state with unit trace on the layout of `like`.
inline dpt::lindblad::DensityMatrix random_state(const dpt::lindblad::DensityMatrix& like, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  auto rho = like;
  for (auto& b : rho.blocks) {
    dpt::lindblad::Matrix a(b.rows(), b.cols());
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = {g(rng), g(rng)};
    b = a * a.adjoint();
  }
  const auto t = rho.trace();
  for (auto& b : rho.blocks) b /= t;
  return rho;
}

}  // namespace testutil
