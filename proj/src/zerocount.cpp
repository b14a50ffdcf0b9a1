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

#include "zcs/zerocount.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "zcs/error.hpp"
#include "zcs/kernels.hpp"

namespace zcs {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

ExpSum::ExpSum(std::vector<cplx> coeffs, std::vector<double> freqs)
    : coeffs_(std::move(coeffs)), freqs_(std::move(freqs)) {
  if (coeffs_.size() != freqs_.size()) throw PreconditionError("exp sum: size mismatch");
  if (coeffs_.size() < 2) throw PreconditionError("exp sum: need at least two terms");
  for (std::size_t j = 0; j < coeffs_.size(); ++j) {
    if (coeffs_[j] == cplx(0.0, 0.0)) throw PreconditionError("exp sum: zero coefficient");
    if (j > 0 && !(freqs_[j] > freqs_[j - 1]))
      throw PreconditionError("exp sum: frequencies must be strictly increasing");
  }
}

ExpSum ExpSum::from_two_term(const TwoTermModel& model) {
  if (!(model.tau() > 0.0)) throw PreconditionError("exp sum: two-term model needs tau > 0");
  return ExpSum({cplx(-1.0, 0.0), cplx(model.amp_A, 0.0)}, {model.phase_inc, model.phase_phi});
}

cplx ExpSum::operator()(cplx k) const {
  const cplx i(0.0, 1.0);
  cplx v = 0.0;
  for (std::size_t j = 0; j < coeffs_.size(); ++j) v += coeffs_[j] * std::exp(i * freqs_[j] * k);
  return v;
}

double ExpSum::scale(cplx k) const {
  double s = 0.0;
  for (std::size_t j = 0; j < coeffs_.size(); ++j)
    s += std::abs(coeffs_[j]) * std::exp(-freqs_[j] * k.imag());
  return s;
}

double ExpSum::max_abs_freq() const {
  return std::max(std::abs(freqs_.front()), std::abs(freqs_.back()));
}

StripRegion StripRegion::make(double alpha, double s, double h_lo, double h_hi) {
  if (!(s > 0.0)) throw PreconditionError("strip region: s must be positive");
  if (!(h_lo < h_hi)) throw PreconditionError("strip region: need h_lo < h_hi");
  return StripRegion{alpha, s, h_lo, h_hi};
}

namespace {

using NearZero = std::function<bool(cplx z, cplx fz)>;

class PhaseTracker {
 public:
  PhaseTracker(const AnalyticFn& f, const NearZero& near_zero, int max_refinement)
      : f_(f), near_zero_(near_zero), max_refinement_(max_refinement) {}

  double track(cplx za, cplx fa, cplx zb, cplx fb, int depth) const {
    const double d = std::arg(fb / fa);
    if (std::abs(d) < 0.5 * std::numbers::pi) return d;
    if (depth >= max_refinement_) {
      // |f| comparable to its change across a tiny segment: a zero lies within
      // a few segment lengths of the contour.
      const double m = std::min(std::abs(fa), std::abs(fb));
      if (m <= 2.0 * std::abs(fb - fa))
        throw BoundaryProximityError("count_zeros_rect: zero on the contour near k = (" +
                                         std::to_string(za.real()) + ", " +
                                         std::to_string(za.imag()) + ")",
                                     m);
      throw NumericalError("count_zeros_rect: phase step exceeds pi/2 after maximal refinement");
    }
    const cplx zm = 0.5 * (za + zb);
    const cplx fm = f_(zm);
    check(zm, fm);
    return track(za, fa, zm, fm, depth + 1) + track(zm, fm, zb, fb, depth + 1);
  }

  void check(cplx z, cplx fz) const {
    if (near_zero_(z, fz))
      throw BoundaryProximityError("count_zeros_rect: zero on or near the contour at k = (" +
                                       std::to_string(z.real()) + ", " +
                                       std::to_string(z.imag()) + ")",
                                   std::abs(fz));
  }

 private:
  const AnalyticFn& f_;
  const NearZero& near_zero_;
  int max_refinement_;
};

struct Contour {
  std::vector<cplx> z;
  std::vector<cplx> f;
};

Contour sample_contour(const AnalyticFn& f, const StripRegion& rect, double max_step,
                       int min_samples) {
  const std::array<cplx, 5> corners{cplx(rect.alpha, rect.h_lo), cplx(rect.alpha + rect.s, rect.h_lo),
                                    cplx(rect.alpha + rect.s, rect.h_hi), cplx(rect.alpha, rect.h_hi),
                                    cplx(rect.alpha, rect.h_lo)};
  Contour c;
  for (int e = 0; e < 4; ++e) {
    const cplx a = corners[e], b = corners[e + 1];
    const double len = std::abs(b - a);
    int n = min_samples;
    if (max_step > 0.0) n = std::max(n, static_cast<int>(std::ceil(len / max_step)));
    for (int i = 0; i < n; ++i) {
      const cplx z = a + (b - a) * (static_cast<double>(i) / n);
      c.z.push_back(z);
      c.f.push_back(f(z));
    }
  }
  c.z.push_back(corners[4]);
  c.f.push_back(c.f.front());
  return c;
}

int winding(const AnalyticFn& f, const NearZero& near_zero, const Contour& c,
            const ZeroCountOptions& opts) {
  PhaseTracker tracker(f, near_zero, opts.max_refinement);
  for (std::size_t i = 0; i + 1 < c.z.size(); ++i) tracker.check(c.z[i], c.f[i]);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < c.z.size(); ++i)
    total += tracker.track(c.z[i], c.f[i], c.z[i + 1], c.f[i + 1], 0);
  const double turns = total / kTwoPi;
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 1e-6)
    throw NumericalError("count_zeros_rect: non-integer winding " + std::to_string(turns));
  if (rounded < 0) throw NumericalError("count_zeros_rect: negative winding number");
  return static_cast<int>(rounded);
}

}  // namespace

int count_zeros_rect(const AnalyticFn& f, const StripRegion& rect, double max_step,
                     const ZeroCountOptions& opts) {
  const Contour c = sample_contour(f, rect, max_step, opts.min_samples_per_edge);
  double peak = 0.0;
  for (const cplx v : c.f) peak = std::max(peak, std::abs(v));
  const double threshold = opts.proximity_tol * peak;
  const NearZero near_zero = [threshold](cplx, cplx fz) { return std::abs(fz) <= threshold; };
  return winding(f, near_zero, c, opts);
}

int count_zeros_rect(const ExpSum& sum, const StripRegion& rect, const ZeroCountOptions& opts) {
  const AnalyticFn f = [&sum](cplx k) { return sum(k); };
  double step = opts.max_step;
  if (step <= 0.0)
    step = std::numbers::pi / (4.0 * std::max(sum.max_abs_freq(), sum.bandwidth()));
  const Contour c = sample_contour(f, rect, step, opts.min_samples_per_edge);
  const double tol = opts.proximity_tol;
  const NearZero near_zero = [&sum, tol](cplx z, cplx fz) {
    return std::abs(fz) <= tol * sum.scale(z);
  };
  return winding(f, near_zero, c, opts);
}

std::vector<cplx> analytic_zeros_two_term(double A, double tau, int m_first, int m_last) {
  if (!(tau > 0.0)) throw PreconditionError("analytic zeros: tau = 0, no zeros");
  if (!(A > 0.0)) throw PreconditionError("analytic zeros: A must be positive");
  std::vector<cplx> zeros;
  const double im = std::log(A) / tau;
  for (int m = m_first; m <= m_last; ++m) zeros.emplace_back(kTwoPi * m / tau, im);
  return zeros;
}

std::pair<int, int> zero_index_range(double tau, double re_lo, double re_hi, int margin) {
  const double spacing = kTwoPi / tau;
  return {static_cast<int>(std::floor(re_lo / spacing)) - margin,
          static_cast<int>(std::ceil(re_hi / spacing)) + margin};
}

double dickson_height(const ExpSum& sum) {
  double max_log = 0.0;
  for (const cplx a : sum.coeffs()) max_log = std::max(max_log, std::abs(std::log(std::abs(a))));
  double min_gap = sum.bandwidth();
  for (std::size_t j = 1; j < sum.freqs().size(); ++j)
    min_gap = std::min(min_gap, sum.freqs()[j] - sum.freqs()[j - 1]);
  return 2.0 * max_log / min_gap + 1.0;
}

DicksonResult dickson_check(const ExpSum& sum, double alpha, double s,
                            const ZeroCountOptions& opts) {
  constexpr int kMaxNudges = 16;
  const double K = dickson_height(sum);
  const double nudge = 1e-3 * kTwoPi / sum.bandwidth();
  DicksonResult r;
  r.expected = s * sum.bandwidth() / kTwoPi;
  for (int attempt = 0;; ++attempt) {
    r.rect = StripRegion::make(alpha + attempt * nudge, s, -K, K);
    try {
      r.count = count_zeros_rect(sum, r.rect, opts);
      r.nudges = attempt;
      break;
    } catch (const BoundaryProximityError&) {
      if (attempt >= kMaxNudges) throw;
    }
  }
  const double bound = static_cast<double>(sum.terms() - 1);
  r.slack = bound - std::abs(r.count - r.expected);
  r.satisfied = r.slack >= -1e-12;
  return r;
}

DensityEstimate cartwright_density(const std::vector<cplx>& zeros, std::pair<double, double> angle,
                                   double r) {
  if (!(r > 0.0)) throw PreconditionError("cartwright density: r must be positive");
  DensityEstimate d;
  d.radius_r = r;
  d.angle = angle;
  for (const cplx z : zeros) {
    if (std::abs(z) > r) continue;
    const double a = std::arg(z);
    if (a > angle.first && a < angle.second) ++d.count_N;
  }
  d.density = d.count_N / r;
  return d;
}

namespace {

std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

// Angular frequency of the largest non-DC bin of the zero-padded spectrum.
double coarse_peak(std::span<const double> g, double dk, double& bin_width) {
  std::size_t M = 1;
  while (M < 4 * g.size()) M <<= 1;
  double* in = fftw_alloc_real(M);
  fftw_complex* out = fftw_alloc_complex(M / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_plan_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(M), in, out, FFTW_ESTIMATE);
  }
  std::fill(in, in + M, 0.0);
  std::copy(g.begin(), g.end(), in);
  fftw_execute(plan);
  std::size_t best = 1;
  double best_power = -1.0;
  for (std::size_t b = 1; b <= M / 2; ++b) {
    const double p = out[b][0] * out[b][0] + out[b][1] * out[b][1];
    if (p > best_power) {
      best_power = p;
      best = b;
    }
  }
  {
    std::lock_guard lock(fftw_plan_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  bin_width = kTwoPi / (static_cast<double>(M) * dk);
  return bin_width * static_cast<double>(best);
}

double refine_peak(std::span<const double> g, double dk, double lo, double hi) {
  auto power = [&](double w) { return std::norm(kernels::phasor_sum(g, 0.0, dk, w)); };
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = std::max(lo, 0.0), b = hi;
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  double pc = power(c), pd = power(d);
  for (int it = 0; it < 200 && (b - a) > 1e-13 * b; ++it) {
    if (pc > pd) {
      b = d;
      d = c;
      pd = pc;
      c = b - ratio * (b - a);
      pc = power(c);
    } else {
      a = c;
      c = d;
      pc = pd;
      d = a + ratio * (b - a);
      pd = power(d);
    }
  }
  return 0.5 * (a + b);
}

// Least-squares fit f ~ c0 + c1 cos(w t) + c2 sin(w t), t = k - k_min.
std::array<double, 3> fit_sinusoid(const PhaselessSignal& s, double w) {
  std::array<std::array<double, 4>, 3> m{};
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double t = s.k(j) - s.k_min;
    const std::array<double, 3> row{1.0, std::cos(w * t), std::sin(w * t)};
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) m[a][b] += row[a] * row[b];
      m[a][3] += row[a] * s.values[j];
    }
  }
  for (int p = 0; p < 3; ++p) {
    int piv = p;
    for (int r = p + 1; r < 3; ++r)
      if (std::abs(m[r][p]) > std::abs(m[piv][p])) piv = r;
    std::swap(m[p], m[piv]);
    if (m[p][p] == 0.0) return {0.0, 0.0, 0.0};
    for (int r = 0; r < 3; ++r) {
      if (r == p) continue;
      const double factor = m[r][p] / m[p][p];
      for (int c = p; c < 4; ++c) m[r][c] -= factor * m[p][c];
    }
  }
  return {m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]};
}

}  // namespace

TauEstimate estimate_tau(const PhaselessSignal& signal, const TauOptions& opts) {
  const std::size_t N = signal.size();
  if (N < 64) throw PreconditionError("estimate_tau: need at least 64 samples");
  TauEstimate est;
  const kernels::SumMinMax stats = kernels::sum_min_max(signal.values);
  const double mean = stats.sum / static_cast<double>(N);
  const double swing = 0.5 * (stats.max - stats.min);
  if (mean <= 0.0 || swing <= opts.flat_tol * mean) {
    est.constant = true;
    est.low_confidence = false;
    return est;
  }

  // Dips: groups of consecutive samples that are below the threshold or are
  // local minima whose parabolic vertex is. Testing the vertex keeps dips
  // falling between samples when a period spans only a handful of them;
  // grouping keeps shallow wiggles inside one dip from counting twice. Each
  // group is located at its lowest vertex; groups touching the window edge
  // are counted but not used for spacing.
  const double threshold = mean - opts.dip_depth * (mean - stats.min);
  const auto& f = signal.values;
  const double dk = signal.dk();
  std::vector<double> interior;
  bool open = false, at_start = false, has_min = false;
  double best_value = 0.0, best_k = 0.0;
  auto close = [&](bool at_end) {
    ++est.dips;
    if (has_min && !at_start && !at_end) interior.push_back(best_k);
    open = false;
  };
  for (std::size_t j = 0; j < N; ++j) {
    bool candidate = false;
    double vertex = f[j], delta = 0.0;
    if (j > 0 && j + 1 < N && f[j] <= f[j - 1] && f[j] < f[j + 1]) {
      const double y0 = f[j - 1], y2 = f[j + 1];
      delta = std::clamp(0.5 * (y0 - y2) / (y0 - 2.0 * f[j] + y2), -0.5, 0.5);
      vertex = std::min(f[j], f[j] - 0.25 * (y0 - y2) * delta);
      candidate = vertex < threshold;
    }
    if (!(f[j] < threshold) && !candidate) {
      if (open) close(false);
      continue;
    }
    if (!open) {
      open = true;
      at_start = j == 0;
      has_min = false;
    }
    if (candidate && (!has_min || vertex < best_value)) {
      has_min = true;
      best_value = vertex;
      best_k = signal.k(j) + delta * dk;
    }
  }
  if (open) close(true);
  if (interior.size() >= 2)
    est.tau_dips = kTwoPi * static_cast<double>(interior.size() - 1) /
                   (interior.back() - interior.front());

  std::vector<double> g(N);
  for (std::size_t j = 0; j < N; ++j) g[j] = f[j] - mean;
  double bin = 0.0;
  const double coarse = coarse_peak(g, dk, bin);
  est.tau_spectral = refine_peak(g, dk, coarse - bin, coarse + bin);

  // Fewer than min_dips expected from the spectral peak means the window is
  // too short for this chord, whatever shallow wiggles the dip pass found.
  const double expected = est.tau_spectral * (signal.k_max - signal.k_min) / kTwoPi;
  est.low_confidence = est.dips < opts.min_dips || expected < opts.min_dips;
  if (est.tau_dips > 0.0) {
    est.method_agreement = std::abs(est.tau_dips - est.tau_spectral) / est.tau_dips;
    if (!est.low_confidence && est.method_agreement > opts.max_disagreement)
      throw AmbiguityError("estimate_tau: dip and spectral estimates disagree by " +
                           std::to_string(100.0 * est.method_agreement) + "%");
    est.tau_hat = est.low_confidence ? est.tau_spectral : 0.5 * (est.tau_dips + est.tau_spectral);
  } else {
    est.tau_hat = est.tau_spectral;
  }

  const auto c = fit_sinusoid(signal, est.tau_hat);
  est.amp_hat = 0.5 * std::hypot(c[1], c[2]);
  est.mean_mismatch = std::abs(c[0] - (est.amp_hat * est.amp_hat + 1.0)) / std::abs(c[0]);
  return est;
}

namespace {

struct Moments {
  double n = 0, c = 0, cc = 0, d = 0, cd = 0, dd = 0;
};

Moments moments(const PhaselessSignal& s, double tau) {
  Moments m;
  for (std::size_t j = 0; j < s.values.size(); ++j) {
    const double c = std::cos(s.k(j) * tau), d = 1.0 - s.values[j];
    m.n += 1.0;
    m.c += c;
    m.cc += c * c;
    m.d += d;
    m.cd += c * d;
    m.dd += d * d;
  }
  return m;
}

// sum_j (A^2 + d_j - 2 A c_j)^2
double sse(const Moments& m, double A) {
  const double A2 = A * A;
  return m.n * A2 * A2 - 4.0 * m.c * A2 * A + (4.0 * m.cc + 2.0 * m.d) * A2 - 4.0 * m.cd * A +
         m.dd;
}

template <class F>
double golden(F&& fn, double lo, double hi, int iters) {
  constexpr double g = 0.6180339887498949;
  double a = lo, b = hi, x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = fn(x1), f2 = fn(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 < f2) {
      b = x2; x2 = x1; f2 = f1; x1 = b - g * (b - a); f1 = fn(x1);
    } else {
      a = x1; x1 = x2; f1 = f2; x2 = a + g * (b - a); f2 = fn(x2);
    }
  }
  return 0.5 * (a + b);
}

// Best A for fixed moments: coarse scan then golden refinement (the quartic
// can have two local minima).
std::pair<double, double> best_amp(const Moments& m) {
  constexpr int kScan = 64;
  constexpr double kMax = 2.0;
  int best = 0;
  double best_v = sse(m, 0.0);
  for (int i = 1; i <= kScan; ++i) {
    const double v = sse(m, kMax * i / kScan);
    if (v < best_v) best = i, best_v = v;
  }
  const double lo = kMax * std::max(0, best - 1) / kScan, hi = kMax * std::min(kScan, best + 1) / kScan;
  const double A = golden([&](double a) { return sse(m, a); }, lo, hi, 60);
  return {A, std::max(0.0, sse(m, A))};
}

}  // namespace

UnitFit fit_two_term_unit(const PhaselessSignal& signal, double tau_max) {
  if (signal.values.size() < 2 || !(tau_max > 0.0))
    throw PreconditionError("fit_two_term_unit: need samples and tau_max > 0");
  auto cost = [&](double tau) { return best_amp(moments(signal, tau)).second; };
  constexpr int kScan = 256;
  int best = 0;
  double best_v = cost(0.0);
  for (int i = 1; i <= kScan; ++i) {
    const double v = cost(tau_max * i / kScan);
    if (v < best_v) best = i, best_v = v;
  }
  UnitFit fit;
  const double lo = tau_max * std::max(0, best - 1) / kScan,
               hi = tau_max * std::min(kScan, best + 1) / kScan;
  fit.tau = golden(cost, lo, hi, 60);
  if (best_v <= cost(fit.tau)) fit.tau = tau_max * best / kScan;
  const auto [A, e] = best_amp(moments(signal, fit.tau));
  fit.amp = A;
  double ff = 0.0;
  for (double v : signal.values) ff += v * v;
  fit.rms = ff > 0.0 ? std::sqrt(e / ff) : 0.0;
  return fit;
}

}  // namespace zcs
