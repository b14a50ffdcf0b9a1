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

// Zeros of finite exponential sums: argument-principle counting on
// rectangles, the Dickson strip bound, empirical zero densities, and
// travel-time recovery from the dip structure of real-axis phaseless data.

#include <functional>
#include <utility>
#include <vector>

#include "zcs/forward.hpp"

namespace zcs {

// g(k) = sum_j A_j exp(i w_j k), the k-plane form of sum_j A_j exp(w_j z) under z = i k.
class ExpSum {
 public:
  // Requires n >= 2, nonzero coefficients and strictly increasing frequencies.
  ExpSum(std::vector<cplx> coeffs, std::vector<double> freqs);
  // A e^{ik phi} - e^{ik x.nu}; requires tau > 0.
  static ExpSum from_two_term(const TwoTermModel& model);

  cplx operator()(cplx k) const;
  // sum_j |A_j e^{i w_j k}|, the natural magnitude scale at k.
  double scale(cplx k) const;

  std::size_t terms() const { return coeffs_.size(); }
  const std::vector<cplx>& coeffs() const { return coeffs_; }
  const std::vector<double>& freqs() const { return freqs_; }
  double bandwidth() const { return freqs_.back() - freqs_.front(); }
  double max_abs_freq() const;

 private:
  std::vector<cplx> coeffs_;
  std::vector<double> freqs_;
};

// Re k in [alpha, alpha + s], Im k in [h_lo, h_hi].
struct StripRegion {
  double alpha = 0.0;
  double s = 1.0;
  double h_lo = -1.0;
  double h_hi = 1.0;

  static StripRegion make(double alpha, double s, double h_lo, double h_hi);
  bool contains(cplx z) const {
    return z.real() >= alpha && z.real() <= alpha + s && z.imag() >= h_lo && z.imag() <= h_hi;
  }
};

struct ZeroCountOptions {
  // Relative modulus below which a boundary sample counts as touching a zero.
  double proximity_tol = 1e-6;
  // Bisections allowed per initial boundary step.
  int max_refinement = 12;
  int min_samples_per_edge = 32;
  // Initial step along the contour; <= 0 derives it from the frequencies.
  double max_step = 0.0;
};

using AnalyticFn = std::function<cplx(cplx)>;

// Winding number of f around the rectangle. proximity is measured against
// max |f| over the initial contour samples.
int count_zeros_rect(const AnalyticFn& f, const StripRegion& rect, double max_step,
                     const ZeroCountOptions& opts = {});
int count_zeros_rect(const ExpSum& sum, const StripRegion& rect, const ZeroCountOptions& opts = {});

// k_m = 2 pi m / tau + i ln(A) / tau for m in [m_first, m_last].
std::vector<cplx> analytic_zeros_two_term(double A, double tau, int m_first, int m_last);
// Index range of analytic zeros whose real part falls in [re_lo, re_hi], widened by `margin`.
std::pair<int, int> zero_index_range(double tau, double re_lo, double re_hi, int margin = 2);

// Strip half-height containing every zero: 2 max_j |ln|A_j|| / min gap + 1.
double dickson_height(const ExpSum& sum);

struct DicksonResult {
  int count = 0;
  double expected = 0.0;  // s (w_n - w_1) / (2 pi)
  bool satisfied = false;
  double slack = 0.0;  // (n - 1) - |count - expected|
  StripRegion rect;
  int nudges = 0;
};

// Counts zeros in Re k in [alpha, alpha + s], |Im k| <= K and checks
// |N - s (w_n - w_1) / (2 pi)| <= n - 1. A boundary touching a zero is
// nudged by 1e-3 of the zero spacing towards +Re.
DicksonResult dickson_check(const ExpSum& sum, double alpha, double s,
                            const ZeroCountOptions& opts = {});

struct DensityEstimate {
  double radius_r = 0.0;
  int count_N = 0;
  int rho = 1;
  double density = 0.0;
  std::pair<double, double> angle{0.0, 0.0};
};

// Zeros with |z| <= r and arg z in the open sector (lo, hi); multiplicity is
// counted by repetition in the list.
DensityEstimate cartwright_density(const std::vector<cplx>& zeros, std::pair<double, double> angle,
                                   double r);

struct TauEstimate {
  double tau_hat = 0.0;
  double amp_hat = 1.0;
  double method_agreement = 0.0;
  double tau_dips = 0.0;      // from dip spacing
  double tau_spectral = 0.0;  // from the periodogram peak
  int dips = 0;
  bool low_confidence = false;
  bool constant = false;
  double mean_mismatch = 0.0;  // |mean - (amp_hat^2 + 1)| / mean
};

struct TauOptions {
  double dip_depth = 0.9;        // dips lie below mean - depth * (mean - min)
  double max_disagreement = 0.05;
  int min_dips = 5;
  double flat_tol = 1e-9;
};

// Throws PreconditionError for fewer than 64 samples and AmbiguityError when the
// two estimators disagree by more than max_disagreement.
TauEstimate estimate_tau(const PhaselessSignal& signal, const TauOptions& opts = {});

struct UnitFit {
  double tau = 0.0;
  double amp = 1.0;
  double rms = 0.0;  // residual, relative to the rms of the data
};

// Least-squares fit of f = A^2 + 1 - 2 A cos(k tau) over tau in [0, tau_max],
// A in [0, 2]. Unlike estimate_tau this relies on the unit incident intensity,
// so it stays usable on windows shorter than a period.
UnitFit fit_two_term_unit(const PhaselessSignal& signal, double tau_max);

}  // namespace zcs
