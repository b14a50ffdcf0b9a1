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

// Leading-order scattered field u(k) = A e^{ik phi} - e^{ik x.nu} and its
// squared modulus sampled on a real wavenumber grid.

#include <complex>
#include <cstdint>
#include <vector>

#include "json.hpp"

namespace zcs {

using cplx = std::complex<double>;

struct TwoTermModel {
  double amp_A = 1.0;
  double phase_phi = 0.0;
  double phase_inc = 0.0;

  // Throws PreconditionError unless amp_A > 0 and phase_phi >= phase_inc.
  static TwoTermModel make(double amp_A, double phase_phi, double phase_inc);
  double tau() const { return phase_phi - phase_inc; }

  bool operator==(const TwoTermModel&) const = default;
};

void to_json(nlohmann::json& j, const TwoTermModel& m);
void from_json(const nlohmann::json& j, TwoTermModel& m);

cplx leading_term(const TwoTermModel& model, cplx k);

// Smooth pseudo-random phase theta(k) = theta0 + sum_m a_m sin(w_m (k - k_min) + c_m),
// with w_m at most four cycles over the window and at most kMaxFreq. Entire in
// k; the frequency cap keeps |e^{i theta}| of order one in a unit strip about
// the real axis, so the tail stays O(1/k) where zeros are counted.
class TailPhase {
 public:
  TailPhase() = default;
  TailPhase(std::uint64_t seed, double k_min, double k_max);
  cplx operator()(cplx k) const;
  double operator()(double k) const { return (*this)(cplx(k, 0.0)).real(); }

 private:
  static constexpr int kModes = 4;
  static constexpr double kMaxFreq = 0.1;
  double k_ref_ = 0.0;
  double theta0_ = 0.0;
  double amp_[kModes]{};
  double freq_[kModes]{};
  double shift_[kModes]{};
};

// leading_term(k) + tail_c * e^{i theta(k)} / k
cplx perturbed_field(const TwoTermModel& model, const TailPhase& phase, double tail_c, cplx k);

struct PhaselessSignal {
  double k_min = 0.0;
  double k_max = 0.0;
  std::vector<double> values;
  TwoTermModel model;
  double tail_c = 0.0;
  std::uint64_t seed = 0;

  std::size_t size() const { return values.size(); }
  double dk() const { return (k_max - k_min) / static_cast<double>(values.size() - 1); }
  double k(std::size_t j) const {
    return j + 1 == values.size() ? k_max : k_min + static_cast<double>(j) * dk();
  }
};

void to_json(nlohmann::json& j, const PhaselessSignal& s);
void from_json(const nlohmann::json& j, PhaselessSignal& s);
void write_signal_csv(std::ostream& os, const PhaselessSignal& s);

// f(k_j) = |u(k_j) + tail|^2 on N_k uniformly spaced k in [k_min, k_max].
PhaselessSignal synth_phaseless(const TwoTermModel& model, double k_min, double k_max,
                                std::size_t N_k, double tail_c, std::uint64_t seed = 0);

// Zeros of u paired with their reflections across the real axis; both are
// zeros of the continuation F(k) = u(k) * conj(u(conj k)) of f.
struct MirrorPair {
  cplx zero;
  cplx mirror;
  double F_at_zero;
  double F_at_mirror;
};
struct MirrorCheck {
  bool degenerate = false;  // A == 1: zeros on the real axis, pairs coincide
  std::vector<MirrorPair> pairs;
  double max_F = 0.0;
};
cplx continued_phaseless(const TwoTermModel& model, cplx k);
MirrorCheck mirror_zero_check(const TwoTermModel& model, int m_first = 1, int m_last = 10);

}  // namespace zcs
