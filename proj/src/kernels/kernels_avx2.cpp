// AVX2 + FMA variants. Complex doubles are interleaved (re, im), two per __m256d.
#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "dpt/kernels.hpp"

namespace dpt::kernels {
namespace {

// (ar + i ai) * x for two packed complex values.
inline __m256d cmul_scalar(__m256d ar, __m256d ai, __m256d x) {
  const __m256d xs = _mm256_permute_pd(x, 0b0101);
  return _mm256_fmaddsub_pd(ar, x, _mm256_mul_pd(ai, xs));
}

// c * x elementwise for two packed complex values.
inline __m256d cmul_packed(__m256d c, __m256d x) {
  const __m256d cr = _mm256_movedup_pd(c);
  const __m256d ci = _mm256_permute_pd(c, 0b1111);
  const __m256d xs = _mm256_permute_pd(x, 0b0101);
  return _mm256_fmaddsub_pd(cr, x, _mm256_mul_pd(ci, xs));
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void caxpy(std::size_t n, cplx a, const cplx* x, cplx* y) {
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  auto* xd = reinterpret_cast<const double*>(x);
  auto* yd = reinterpret_cast<double*>(y);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
    const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
    _mm256_storeu_pd(yd + 2 * i, _mm256_add_pd(yv, cmul_scalar(ar, ai, xv)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void caxpy_weighted(std::size_t n, cplx a, const double* w, const cplx* x, cplx* y) {
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  auto* xd = reinterpret_cast<const double*>(x);
  auto* yd = reinterpret_cast<double*>(y);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m128d w2 = _mm_loadu_pd(w + i);
    const __m256d wv = _mm256_permute4x64_pd(_mm256_castpd128_pd256(w2), 0b01010000);
    const __m256d xv = _mm256_mul_pd(wv, _mm256_loadu_pd(xd + 2 * i));
    const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
    _mm256_storeu_pd(yd + 2 * i, _mm256_add_pd(yv, cmul_scalar(ar, ai, xv)));
  }
  for (; i < n; ++i) y[i] += a * (w[i] * x[i]);
}

void cmul_acc(std::size_t n, const cplx* c, const cplx* x, cplx* y) {
  auto* cd = reinterpret_cast<const double*>(c);
  auto* xd = reinterpret_cast<const double*>(x);
  auto* yd = reinterpret_cast<double*>(y);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d cv = _mm256_loadu_pd(cd + 2 * i);
    const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
    const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
    _mm256_storeu_pd(yd + 2 * i, _mm256_add_pd(yv, cmul_packed(cv, xv)));
  }
  for (; i < n; ++i) y[i] += c[i] * x[i];
}

void lincomb(std::size_t n, const double* y, std::size_t k, const double* coef,
             const double* const* stages, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_loadu_pd(y + i);
    for (std::size_t s = 0; s < k; ++s) {
      acc = _mm256_fmadd_pd(_mm256_set1_pd(coef[s]), _mm256_loadu_pd(stages[s] + i), acc);
    }
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < n; ++i) {
    double acc = y[i];
    for (std::size_t s = 0; s < k; ++s) acc = std::fma(coef[s], stages[s][i], acc);
    out[i] = acc;
  }
}

double scaled_sumsq(std::size_t n, const double* err, const double* y0, const double* y1,
                    double atol, double rtol) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  const __m256d va = _mm256_set1_pd(atol);
  const __m256d vr = _mm256_set1_pd(rtol);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a0 = _mm256_andnot_pd(sign, _mm256_loadu_pd(y0 + i));
    const __m256d a1 = _mm256_andnot_pd(sign, _mm256_loadu_pd(y1 + i));
    const __m256d sc = _mm256_fmadd_pd(vr, _mm256_max_pd(a0, a1), va);
    const __m256d r = _mm256_div_pd(_mm256_loadu_pd(err + i), sc);
    acc = _mm256_fmadd_pd(r, r, acc);
  }
  double tail = 0.0;
  for (; i < n; ++i) {
    const double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double r = err[i] / sc;
    tail += r * r;
  }
  return hsum(acc) + tail;
}

double sumsq(std::size_t n, const double* x) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += x[i] * x[i];
  return hsum(acc) + tail;
}

}  // namespace

const KernelTable& avx2_kernels() {
  static const KernelTable table{"avx2", caxpy, caxpy_weighted, cmul_acc,
                                 lincomb, scaled_sumsq, sumsq};
  return table;
}

}  // namespace dpt::kernels
