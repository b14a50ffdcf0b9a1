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

// Data-parallel inner loops used by the tomography solvers and the
// travel-time estimators. Every kernel has a portable scalar reference and,
// on x86-64, an AVX2+FMA variant. The variant is chosen once at startup from
// CPUID; ZCS_SIMD=scalar|avx2 forces a choice.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace zcs::kernels {

struct SumMinMax {
  double sum;
  double min;
  double max;
};

// Function table for one instruction-set level. All pointers are non-null.
struct KernelTable {
  std::string_view name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // sum_i w[i] * x[idx[i]]
  double (*gather_dot)(const double* w, const std::int32_t* idx, const double* x,
                       std::size_t n);
  // y[idx[i]] += alpha * w[i]; idx entries must be distinct
  void (*scatter_axpy)(double alpha, const double* w, const std::int32_t* idx, double* y,
                       std::size_t n);
  SumMinMax (*sum_min_max)(const double* x, std::size_t n);
  // sum_j g[j] * exp(-i * omega * (k0 + j * dk))
  std::complex<double> (*phasor_sum)(const double* g, std::size_t n, double k0, double dk,
                                     double omega);
};

const KernelTable& scalar_table();
// nullptr when the binary was built without AVX2 support or the CPU lacks it.
const KernelTable* avx2_table();

// Table used by the span wrappers below.
const KernelTable& active();
// Override the active table (tests, benchmarks). Not thread-safe against
// concurrent kernel calls.
void set_active(const KernelTable& table);

double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
double gather_dot(std::span<const double> w, std::span<const std::int32_t> idx,
                  std::span<const double> x);
void scatter_axpy(double alpha, std::span<const double> w, std::span<const std::int32_t> idx,
                  std::span<double> y);
SumMinMax sum_min_max(std::span<const double> x);
std::complex<double> phasor_sum(std::span<const double> g, double k0, double dk, double omega);

}  // namespace zcs::kernels
