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

#include "zcs/forward.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include "zcs/error.hpp"
#include "zcs/io.hpp"
#include "zcs/zerocount.hpp"

namespace zcs {

TwoTermModel TwoTermModel::make(double amp_A, double phase_phi, double phase_inc) {
  if (!(amp_A > 0.0)) throw PreconditionError("two-term model: amplitude must be positive");
  if (!(phase_phi >= phase_inc))
    throw PreconditionError("two-term model: phi must be >= x.nu");
  return TwoTermModel{amp_A, phase_phi, phase_inc};
}

void to_json(nlohmann::json& j, const TwoTermModel& m) {
  j = nlohmann::json{{"amp_A", m.amp_A}, {"phase_phi", m.phase_phi}, {"phase_inc", m.phase_inc}};
}

void from_json(const nlohmann::json& j, TwoTermModel& m) {
  m = TwoTermModel::make(j.at("amp_A").get<double>(), j.at("phase_phi").get<double>(),
                         j.at("phase_inc").get<double>());
}

cplx leading_term(const TwoTermModel& model, cplx k) {
  const cplx i(0.0, 1.0);
  return model.amp_A * std::exp(i * k * model.phase_phi) - std::exp(i * k * model.phase_inc);
}

namespace {

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

TailPhase::TailPhase(std::uint64_t seed, double k_min, double k_max) : k_ref_(k_min) {
  std::mt19937_64 rng(seed);
  const double two_pi = 2.0 * std::numbers::pi;
  const double span = k_max > k_min ? k_max - k_min : 1.0;
  theta0_ = two_pi * unit_uniform(rng);
  for (int m = 0; m < kModes; ++m) {
    amp_[m] = std::numbers::pi * unit_uniform(rng);
    freq_[m] = std::min(kMaxFreq, two_pi * 4.0 / span) * unit_uniform(rng);
    shift_[m] = two_pi * unit_uniform(rng);
  }
}

cplx TailPhase::operator()(cplx k) const {
  cplx theta = theta0_;
  for (int m = 0; m < kModes; ++m) theta += amp_[m] * std::sin(freq_[m] * (k - k_ref_) + shift_[m]);
  return theta;
}

cplx perturbed_field(const TwoTermModel& model, const TailPhase& phase, double tail_c, cplx k) {
  cplx u = leading_term(model, k);
  if (tail_c != 0.0) u += tail_c * std::exp(cplx(0.0, 1.0) * phase(k)) / k;
  return u;
}

PhaselessSignal synth_phaseless(const TwoTermModel& model, double k_min, double k_max,
                                std::size_t N_k, double tail_c, std::uint64_t seed) {
  if (!(k_min > 0.0) || !(k_max > k_min))
    throw PreconditionError("synth_phaseless: need 0 < k_min < k_max");
  if (N_k < 2) throw PreconditionError("synth_phaseless: need at least 2 samples");
  if (!(tail_c >= 0.0)) throw PreconditionError("synth_phaseless: tail_c must be >= 0");
  PhaselessSignal s;
  s.k_min = k_min;
  s.k_max = k_max;
  s.model = model;
  s.tail_c = tail_c;
  s.seed = seed;
  s.values.resize(N_k);
  const TailPhase phase(seed, k_min, k_max);
  const double A = model.amp_A, tau = model.tau();
  for (std::size_t j = 0; j < N_k; ++j) {
    const double k = s.k(j);
    if (tail_c == 0.0) {
      // |A e^{ik tau} - 1|^2 in closed form; the common factor e^{ik x.nu} drops out.
      s.values[j] = A * A + 1.0 - 2.0 * A * std::cos(k * tau);
    } else {
      s.values[j] = std::norm(perturbed_field(model, phase, tail_c, k));
    }
  }
  return s;
}

void to_json(nlohmann::json& j, const PhaselessSignal& s) {
  j = nlohmann::json{{"model", s.model},   {"k_min", s.k_min},   {"k_max", s.k_max},
                     {"N_k", s.size()},    {"tail_c", s.tail_c}, {"seed", s.seed},
                     {"values", s.values}};
}

void from_json(const nlohmann::json& j, PhaselessSignal& s) {
  s.model = j.at("model").get<TwoTermModel>();
  s.k_min = j.at("k_min").get<double>();
  s.k_max = j.at("k_max").get<double>();
  s.tail_c = j.value("tail_c", 0.0);
  s.seed = j.value("seed", std::uint64_t{0});
  s.values = j.at("values").get<std::vector<double>>();
  if (s.values.size() < 2) throw PreconditionError("signal: need at least 2 samples");
}

void write_signal_csv(std::ostream& os, const PhaselessSignal& s) {
  os << "k,f\n";
  for (std::size_t j = 0; j < s.size(); ++j)
    os << io::format_double(s.k(j)) << ',' << io::format_double(s.values[j]) << '\n';
}

cplx continued_phaseless(const TwoTermModel& model, cplx k) {
  return leading_term(model, k) * std::conj(leading_term(model, std::conj(k)));
}

MirrorCheck mirror_zero_check(const TwoTermModel& model, int m_first, int m_last) {
  if (!(model.tau() > 0.0)) throw PreconditionError("mirror check: tau = 0, no zeros");
  MirrorCheck check;
  check.degenerate = model.amp_A == 1.0;
  const auto zeros = analytic_zeros_two_term(model.amp_A, model.tau(), m_first, m_last);
  for (const cplx z : zeros) {
    // Zeros of A e^{ik phi} - e^{ik x.nu} depend on tau only.
    MirrorPair p{z, std::conj(z), std::abs(continued_phaseless(model, z)),
                 std::abs(continued_phaseless(model, std::conj(z)))};
    check.max_F = std::max({check.max_F, p.F_at_zero, p.F_at_mirror});
    check.pairs.push_back(p);
  }
  return check;
}

}  // namespace zcs
