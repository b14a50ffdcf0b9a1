// Copyright 2026  The zcs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Compiled with -mavx2 -mfma; only reached after a CPUID check.
#include "kernels_impl.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace zcs::kernels::detail {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double gather_dot_avx2(const double* w, const std::int32_t* idx, const double* x,
                       std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m128i vi = _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + i));
    const __m256d vx = _mm256_i32gather_pd(x, vi, 8);
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), vx, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += w[i] * x[idx[i]];
  return s;
}

void scatter_axpy_avx2(double alpha, const double* w, const std::int32_t* idx, double* y,
                       std::size_t n) {
  // AVX2 has no scatter: vector multiply, scalar stores.
  const __m256d va = _mm256_set1_pd(alpha);
  alignas(32) double prod[4];
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_store_pd(prod, _mm256_mul_pd(va, _mm256_loadu_pd(w + i)));
    y[idx[i]] += prod[0];
    y[idx[i + 1]] += prod[1];
    y[idx[i + 2]] += prod[2];
    y[idx[i + 3]] += prod[3];
  }
  for (; i < n; ++i) y[idx[i]] += alpha * w[i];
}

SumMinMax sum_min_max_avx2(const double* x, std::size_t n) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  __m256d vs = _mm256_setzero_pd();
  __m256d vmin = _mm256_set1_pd(inf);
  __m256d vmax = _mm256_set1_pd(-inf);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    vs = _mm256_add_pd(vs, v);
    vmin = _mm256_min_pd(vmin, v);
    vmax = _mm256_max_pd(vmax, v);
  }
  alignas(32) double lo[4], hi[4];
  _mm256_store_pd(lo, vmin);
  _mm256_store_pd(hi, vmax);
  SumMinMax r{hsum(vs), std::min({lo[0], lo[1], lo[2], lo[3]}),
              std::max({hi[0], hi[1], hi[2], hi[3]})};
  for (; i < n; ++i) {
    r.sum += x[i];
    r.min = std::min(r.min, x[i]);
    r.max = std::max(r.max, x[i]);
  }
  return r;
}

// Four rotating phasors, reseeded from cos/sin every kReseed samples to
// bound the drift of repeated complex multiplication.
std::complex<double> phasor_sum_avx2(const double* g, std::size_t n, double k0, double dk,
                                     double omega) {
  constexpr std::size_t kReseed = 256;
  const double step = -omega * 4.0 * dk;
  const __m256d rot_re = _mm256_set1_pd(std::cos(step));
  const __m256d rot_im = _mm256_set1_pd(std::sin(step));
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  while (i + 4 <= n) {
    alignas(32) double zr[4], zi[4];
    for (int l = 0; l < 4; ++l) {
      const double arg = -omega * (k0 + static_cast<double>(i + l) * dk);
      zr[l] = std::cos(arg);
      zi[l] = std::sin(arg);
    }
    __m256d vr = _mm256_load_pd(zr);
    __m256d vi = _mm256_load_pd(zi);
    const std::size_t end = std::min(n - (n - i) % 4, i + kReseed);
    for (; i < end; i += 4) {
      const __m256d vg = _mm256_loadu_pd(g + i);
      acc_re = _mm256_fmadd_pd(vg, vr, acc_re);
      acc_im = _mm256_fmadd_pd(vg, vi, acc_im);
      const __m256d nr = _mm256_fmsub_pd(vr, rot_re, _mm256_mul_pd(vi, rot_im));
      const __m256d ni = _mm256_fmadd_pd(vr, rot_im, _mm256_mul_pd(vi, rot_re));
      vr = nr;
      vi = ni;
    }
  }
  double re = hsum(acc_re), im = hsum(acc_im);
  for (; i < n; ++i) {
    const double arg = omega * (k0 + static_cast<double>(i) * dk);
    re += g[i] * std::cos(arg);
    im -= g[i] * std::sin(arg);
  }
  return {re, im};
}

}  // namespace

const KernelTable kAvx2Table{
    "avx2",          dot_avx2,         axpy_avx2,      gather_dot_avx2,
    scatter_axpy_avx2, sum_min_max_avx2, phasor_sum_avx2,
};

}  // namespace zcs::kernels::detail
