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

#include "kernels_impl.hpp"

#include <cmath>
#include <limits>

namespace zcs::kernels::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double gather_dot_scalar(const double* w, const std::int32_t* idx, const double* x,
                         std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * x[idx[i]];
  return s;
}

void scatter_axpy_scalar(double alpha, const double* w, const std::int32_t* idx, double* y,
                         std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[idx[i]] += alpha * w[i];
}

SumMinMax sum_min_max_scalar(const double* x, std::size_t n) {
  SumMinMax r{0.0, std::numeric_limits<double>::infinity(),
              -std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < n; ++i) {
    r.sum += x[i];
    r.min = std::min(r.min, x[i]);
    r.max = std::max(r.max, x[i]);
  }
  return r;
}

std::complex<double> phasor_sum_scalar(const double* g, std::size_t n, double k0, double dk,
                                       double omega) {
  double re = 0.0, im = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double arg = omega * (k0 + static_cast<double>(j) * dk);
    re += g[j] * std::cos(arg);
    im -= g[j] * std::sin(arg);
  }
  return {re, im};
}

}  // namespace

const KernelTable kScalarTable{
    "scalar",          dot_scalar,         axpy_scalar,      gather_dot_scalar,
    scatter_axpy_scalar, sum_min_max_scalar, phasor_sum_scalar,
};

}  // namespace zcs::kernels::detail
