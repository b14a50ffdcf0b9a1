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

#pragma once

// Polynomial-root oracle for exponential sums with integer frequencies.

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

// Zeros of g(z) = sum_j c_j e^{i j z} (integer frequencies 0..n-1) with
// Re z in [re_lo, re_hi]: roots w of the polynomial sum c_j w^j give
// z = arg w + 2 pi m - i ln|w|.
inline std::vector<cplx> poly_exp_zeros(const std::vector<cplx>& c, double re_lo, double re_hi) {
  const int deg = static_cast<int>(c.size()) - 1;
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -c[i] / c[deg];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp);
  std::vector<cplx> zeros;
  for (int r = 0; r < deg; ++r) {
    const cplx w = es.eigenvalues()[r];
    const double base = std::arg(w), im = -std::log(std::abs(w));
    const double two_pi = 2.0 * std::numbers::pi;
    for (long m = static_cast<long>(std::floor((re_lo - base) / two_pi)) - 1;
         base + two_pi * m <= re_hi + two_pi; ++m) {
      const double re = base + two_pi * m;
      if (re >= re_lo && re <= re_hi) zeros.emplace_back(re, im);
    }
  }
  return zeros;
}

}  // namespace oracle
