#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

// Data-parallel inner loops. Every kernel has a scalar reference version and,
// where the CPU allows, a SIMD version picked once at runtime.
namespace dpt::kernels {

using cplx = std::complex<double>;

struct KernelTable {
  std::string_view name;

  // y[i] += a * x[i]
  void (*caxpy)(std::size_t n, cplx a, const cplx* x, cplx* y);
  // y[i] += a * w[i] * x[i], w real
  void (*caxpy_weighted)(std::size_t n, cplx a, const double* w, const cplx* x, cplx* y);
  // y[i] += c[i] * x[i]
  void (*cmul_acc)(std::size_t n, const cplx* c, const cplx* x, cplx* y);
  // out[i] = y[i] + sum_k coef[k] * stages[k][i]
  void (*lincomb)(std::size_t n, const double* y, std::size_t k, const double* coef,
                  const double* const* stages, double* out);
  // sum_i (err[i] / (atol + rtol * max(|y0[i]|, |y1[i]|)))^2
  double (*scaled_sumsq)(std::size_t n, const double* err, const double* y0, const double* y1,
                         double atol, double rtol);
  // sum_i x[i]^2
  double (*sumsq)(std::size_t n, const double* x);
};

const KernelTable& scalar_table();
// nullptr when the build or the CPU lacks AVX2+FMA.
const KernelTable* avx2_table();

// Table in use. Honors DPT_SIMD=scalar|avx2|auto (default auto).
const KernelTable& active();

// Force a table for the rest of the process (tests, benchmarks).
void set_active(const KernelTable& table);

}  // namespace dpt::kernels
