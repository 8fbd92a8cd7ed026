#include <algorithm>
#include <cmath>

#include "dpt/kernels.hpp"

namespace dpt::kernels {
namespace {

void caxpy(std::size_t n, cplx a, const cplx* x, cplx* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void caxpy_weighted(std::size_t n, cplx a, const double* w, const cplx* x, cplx* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * (w[i] * x[i]);
}

void cmul_acc(std::size_t n, const cplx* c, const cplx* x, cplx* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += c[i] * x[i];
}

void lincomb(std::size_t n, const double* y, std::size_t k, const double* coef,
             const double* const* stages, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    double acc = y[i];
    for (std::size_t s = 0; s < k; ++s) acc += coef[s] * stages[s][i];
    out[i] = acc;
  }
}

double scaled_sumsq(std::size_t n, const double* err, const double* y0, const double* y1,
                    double atol, double rtol) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double r = err[i] / sc;
    acc += r * r;
  }
  return acc;
}

double sumsq(std::size_t n, const double* x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", caxpy, caxpy_weighted, cmul_acc,
                                 lincomb,  scaled_sumsq, sumsq};
  return table;
}

}  // namespace dpt::kernels
