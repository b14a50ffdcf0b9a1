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

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "zcs/error.hpp"
#include "zcs/forward.hpp"

using namespace zcs;

namespace {

constexpr double kPi = std::numbers::pi;

// Local minima below the midpoint A^2 + 1 of the oscillation.
int count_dips(const PhaselessSignal& s, double A) {
  int dips = 0;
  for (std::size_t j = 1; j + 1 < s.size(); ++j) {
    const double v = s.values[j];
    if (v < s.values[j - 1] && v <= s.values[j + 1] && v < A * A + 1.0) ++dips;
  }
  return dips;
}

}  // namespace

TEST_CASE("two-term model validation") {
  const TwoTermModel m = TwoTermModel::make(0.5, kPi, 0.0);
  CHECK(m.tau() == kPi);
  CHECK_THROWS_AS(TwoTermModel::make(0.0, 1.0, 0.0), PreconditionError);
  CHECK_THROWS_AS(TwoTermModel::make(0.5, 0.0, 1.0), PreconditionError);
  const nlohmann::json j = m;
  CHECK(j.get<TwoTermModel>() == m);
}

TEST_CASE("leading term examples") {
  CHECK(std::abs(leading_term(TwoTermModel::make(1.0, 0.3, 0.3), cplx(17.0, 0.2))) == 0.0);
  const TwoTermModel m = TwoTermModel::make(0.5, kPi, 0.0);
  const cplx v = leading_term(m, 2.0);
  CHECK(v.real() == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(std::abs(v.imag()) < 1e-14);
  CHECK(std::abs(leading_term(m, cplx(2.0, std::log(0.5) / kPi))) <= 1e-12);
}

TEST_CASE("synth_phaseless examples") {
  const TwoTermModel m = TwoTermModel::make(0.5, kPi, 0.0);
  // Grid hits k = 1 and k = 2 exactly.
  const PhaselessSignal s = synth_phaseless(m, 1.0, 2.0, 2, 0.0);
  CHECK(s.values[0] == doctest::Approx(2.25).epsilon(1e-15));
  CHECK(s.values[1] == doctest::Approx(0.25).epsilon(1e-14));

  const PhaselessSignal z = synth_phaseless(TwoTermModel::make(1.0, 0.4, 0.4), 1.0, 100.0, 500, 0.0);
  for (double v : z.values) CHECK(v == 0.0);

  CHECK_THROWS_AS(synth_phaseless(m, 0.0, 2.0, 10, 0.0), PreconditionError);
  CHECK_THROWS_AS(synth_phaseless(m, 3.0, 2.0, 10, 0.0), PreconditionError);
  CHECK_THROWS_AS(synth_phaseless(m, 1.0, 2.0, 1, 0.0), PreconditionError);
  CHECK_THROWS_AS(synth_phaseless(m, 1.0, 2.0, 10, -1.0), PreconditionError);
}

TEST_CASE("closed form, bounds and complex evaluation agree") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ua(0.05, 2.0), ut(0.0, 5.0), ui(-1.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const double A = ua(rng), inc = ui(rng);
    const TwoTermModel m = TwoTermModel::make(A, inc + ut(rng), inc);
    const double tau = m.tau();
    const PhaselessSignal s = synth_phaseless(m, 1.0, 50.0, 257, 0.0);
    for (std::size_t j = 0; j < s.size(); ++j) {
      const double k = s.k(j), f = s.values[j];
      const double closed = A * A + 1.0 - 2.0 * A * std::cos(k * tau);
      CHECK(std::abs(f - closed) <= 1e-14 * (A + 1.0) * (A + 1.0));
      CHECK(f >= (A - 1.0) * (A - 1.0) - 1e-14);
      CHECK(f <= (A + 1.0) * (A + 1.0) + 1e-14);
      CHECK(f >= 0.0);
      // Phase round-off of e^{ik phi} is ~ k * ulp, hence the looser bound.
      const cplx u = A * std::exp(cplx(0.0, k * m.phase_phi)) - std::exp(cplx(0.0, k * inc));
      CHECK(std::abs(f - std::norm(u)) <= 1e-12 * (A + 1.0) * (A + 1.0));
    }
  }
}

TEST_CASE("consecutive dips are 2 pi / tau apart") {
  const double A = 0.7, tau = 1.3;
  const PhaselessSignal s = synth_phaseless(TwoTermModel::make(A, tau, 0.0), 5.0, 105.0, 8001, 0.0);
  std::vector<double> mins;
  for (std::size_t j = 1; j + 1 < s.size(); ++j)
    if (s.values[j] < s.values[j - 1] && s.values[j] <= s.values[j + 1]) mins.push_back(s.k(j));
  REQUIRE(mins.size() > 10);
  for (std::size_t i = 1; i < mins.size(); ++i)
    CHECK(std::abs(mins[i] - mins[i - 1] - 2.0 * kPi / tau) <= 2.0 * s.dk());
}

TEST_CASE("dip count is stable under the admissible tail") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ua(0.1, 0.9), ut(0.5, 5.0);
  for (int t = 0; t < 100; ++t) {
    const double A = ua(rng), tau = ut(rng), k_min = 20.0 / tau;
    const double k_max = k_min + 30.0 * 2.0 * kPi / tau;
    const TwoTermModel m = TwoTermModel::make(A, tau, 0.0);
    const double c = 0.1 * (1.0 - A) * k_min * A;
    const auto exact = synth_phaseless(m, k_min, k_max, 4096, 0.0);
    const auto tail = synth_phaseless(m, k_min, k_max, 4096, c, 1000 + t);
    CHECK(count_dips(exact, A) == count_dips(tail, A));
  }
}

TEST_CASE("tail synthesis is deterministic and seed dependent") {
  const TwoTermModel m = TwoTermModel::make(0.6, 2.0, 0.1);
  const auto a = synth_phaseless(m, 10.0, 80.0, 600, 0.5, 42);
  const auto b = synth_phaseless(m, 10.0, 80.0, 600, 0.5, 42);
  const auto c = synth_phaseless(m, 10.0, 80.0, 600, 0.5, 43);
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);
  const auto exact = synth_phaseless(m, 10.0, 80.0, 600, 0.0);
  for (std::size_t j = 0; j < a.size(); ++j) {
    // |u + t|^2 - |u|^2 is bounded by 2 |u| |t| + |t|^2 with |t| = c / k.
    const double tk = 0.5 / a.k(j);
    CHECK(std::abs(a.values[j] - exact.values[j]) <= 2.0 * 1.6 * tk + tk * tk + 1e-12);
  }
}

TEST_CASE("tail phase is smooth on the real axis and entire") {
  const TailPhase p(5, 100.0, 200.0);
  double max_jump = 0.0;
  for (int j = 0; j < 1000; ++j) {
    const double k = 100.0 + 0.1 * j;
    max_jump = std::max(max_jump, std::abs(p(k + 0.1) - p(k)));
  }
  // At most 4 cycles of amplitude pi per mode over the window.
  CHECK(max_jump < 4 * kPi * 4.0 * 2.0 * kPi / 100.0 * 0.1 + 1e-12);
  const cplx z(150.0, 0.5);
  // Cauchy-Riemann on a small square: derivative consistent in both directions.
  const double e = 1e-5;
  const cplx dx = (p(z + e) - p(z - e)) / (2 * e);
  const cplx dy = (p(z + cplx(0, e)) - p(z - cplx(0, e))) / (2 * e);
  CHECK(std::abs(dx - dy / cplx(0, 1)) < 1e-6);
}

TEST_CASE("signal serialization") {
  const auto s = synth_phaseless(TwoTermModel::make(0.5, kPi, 0.0), 1.0, 2.0, 5, 0.0);
  const nlohmann::json j = s;
  const auto r = j.get<PhaselessSignal>();
  CHECK(r.values == s.values);
  CHECK(r.model == s.model);
  CHECK(r.k(4) == 2.0);
  std::ostringstream os;
  write_signal_csv(os, s);
  CHECK(os.str().rfind("k,f\n1,2.25\n", 0) == 0);
}

TEST_CASE("mirror zero check examples") {
  const MirrorCheck c = mirror_zero_check(TwoTermModel::make(0.5, kPi, 0.0), 1, 5);
  CHECK_FALSE(c.degenerate);
  REQUIRE(c.pairs.size() == 5);
  for (std::size_t i = 0; i < c.pairs.size(); ++i) {
    const auto& p = c.pairs[i];
    CHECK(p.zero.real() == doctest::Approx(2.0 * (i + 1)));
    CHECK(p.zero.imag() == doctest::Approx(-0.2206).epsilon(1e-3));
    CHECK(p.mirror == std::conj(p.zero));
    CHECK(p.F_at_zero <= 1e-10);
    CHECK(p.F_at_mirror <= 1e-10);
  }
  const MirrorCheck d = mirror_zero_check(TwoTermModel::make(1.0, kPi, 0.0), 1, 3);
  CHECK(d.degenerate);
  for (std::size_t i = 0; i < d.pairs.size(); ++i) {
    CHECK(d.pairs[i].zero.imag() == 0.0);
    CHECK(d.pairs[i].zero.real() == doctest::Approx(2.0 * (i + 1)));
  }
  CHECK_THROWS_AS(mirror_zero_check(TwoTermModel::make(0.5, 0.0, 0.0)), PreconditionError);
}

TEST_CASE("continued phaseless function restricts to f") {
  const TwoTermModel m = TwoTermModel::make(0.8, 2.3, -0.4);
  const auto s = synth_phaseless(m, 1.0, 30.0, 100, 0.0);
  for (std::size_t j = 0; j < s.size(); ++j) {
    const cplx F = continued_phaseless(m, s.k(j));
    CHECK(std::abs(F.imag()) < 1e-13);
    CHECK(F.real() == doctest::Approx(s.values[j]).epsilon(1e-12));
  }
}
