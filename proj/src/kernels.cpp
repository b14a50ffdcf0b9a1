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

#include <atomic>
#include <cassert>
#include <cstdlib>
#include <string_view>

namespace zcs::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(ZCS_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* pick_default() {
  const char* env = std::getenv("ZCS_SIMD");
  const std::string_view want = env ? env : "auto";
  if (want == "scalar") return &scalar_table();
  const KernelTable* simd = avx2_table();
  return simd ? simd : &scalar_table();
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> table{pick_default()};
  return table;
}

}  // namespace

const KernelTable& scalar_table() { return detail::kScalarTable; }

const KernelTable* avx2_table() {
#if defined(ZCS_HAVE_AVX2)
  static const bool ok = cpu_has_avx2();
  return ok ? &detail::kAvx2Table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

void set_active(const KernelTable& table) { slot().store(&table, std::memory_order_release); }

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active().dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active().axpy(alpha, x.data(), y.data(), x.size());
}

double gather_dot(std::span<const double> w, std::span<const std::int32_t> idx,
                  std::span<const double> x) {
  assert(w.size() == idx.size());
  return active().gather_dot(w.data(), idx.data(), x.data(), w.size());
}

void scatter_axpy(double alpha, std::span<const double> w, std::span<const std::int32_t> idx,
                  std::span<double> y) {
  assert(w.size() == idx.size());
  active().scatter_axpy(alpha, w.data(), idx.data(), y.data(), w.size());
}

SumMinMax sum_min_max(std::span<const double> x) {
  return active().sum_min_max(x.data(), x.size());
}

std::complex<double> phasor_sum(std::span<const double> g, double k0, double dk, double omega) {
  return active().phasor_sum(g.data(), g.size(), k0, dk, omega);
}

}  // namespace zcs::kernels
