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
#include <limits>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "zcs/eikonal.hpp"
#include "zcs/error.hpp"
#include "zcs/tomo.hpp"

using namespace zcs;

namespace {

constexpr double kPi = std::numbers::pi;

Medium gaussian(double beta0, int n = 129, double sigma = 0.5) {
  return make_phantom(PhantomKind::gaussian, {0.0, 0.0, sigma, beta0}, 2, 1.0, n);
}

Point direction(double a) { return {std::cos(a), std::sin(a), 0.0}; }

// Max error of fast sweeping against phi = |x - x0| (unit speed) with Dirichlet
// data on the two bottom rows.
double point_source_error(int n, int order) {
  const Grid g(2, 1.0, n);
  const Point x0{0.3, -5.0, 0.0};
  std::vector<double> refr(g.size(), 1.0);
  std::vector<double> fixed(g.size(), std::numeric_limits<double>::quiet_NaN());
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < n; ++i) fixed[g.index(i, j)] = norm(g.node(g.index(i, j)) - x0);
  EikonalOptions opts;
  opts.order = order;
  const FastSweepResult r = fast_sweep(g, refr, fixed, opts);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(r.phi[i] - norm(g.node(i) - x0)));
  return err;
}

}  // namespace

TEST_CASE("zero phantom gives the plane wave") {
  const Medium m = make_phantom(PhantomKind::zero, {}, 2, 1.0, 65);
  for (double a : {kPi / 2, 0.0, 0.7, 2.5}) {
    const Point nu = direction(a);
    const TravelTimeField f = solve_eikonal(m, nu);
    for (std::size_t i = 0; i < f.phi.size(); ++i)
      CHECK(std::abs(f.phi[i] - dot(m.grid().node(i), nu)) <= 1e-8);
    for (double v : f.amp) CHECK(v == 1.0);
  }
}

TEST_CASE("gaussian central travel time against the straight-ray value") {
  const Medium m = gaussian(0.01);
  const Point nu{0.0, 1.0, 0.0};
  const TravelTimeField f = solve_eikonal(m, nu);
  const Geometry g = Geometry::make(nu, {0.0, 1.0, 0.0}, 1.0, f.B);
  const double tau = f.phi_at(g.x_obs) - 1.0;
  CHECK(std::abs(tau - linearized_travel_time(m, g)) <= 2.0 * 0.01 * 0.01 * 2.0);
}

TEST_CASE("travel-time perturbation grows with beta0") {
  const Point nu{0.0, 1.0, 0.0}, x{0.0, 1.0, 0.0};
  const double t1 = solve_eikonal(gaussian(0.01), nu).phi_at(x) - 1.0;
  const double t2 = solve_eikonal(gaussian(0.02), nu).phi_at(x) - 1.0;
  CHECK(t2 > t1);
  CHECK(t1 > 0.0);
}

TEST_CASE("phi lower bound and unperturbed region") {
  const Medium m = gaussian(0.01);
  const double supp = kCutoffOuter;  // beta vanishes beyond 0.95 R
  for (int order : {1, 3})
  for (double a : {kPi / 2, 0.3, kPi / 4, 2.0}) {
    const Point nu = direction(a);
    EikonalOptions opts;
    opts.order = order;
    const TravelTimeField f = solve_eikonal(m, nu, opts);
    double tau_max = 0.0;
    for (std::size_t i = 0; i < f.phi.size(); ++i)
      tau_max = std::max(tau_max, f.phi[i] - dot(m.grid().node(i), nu));
    for (std::size_t i = 0; i < f.phi.size(); ++i) {
      const Point x = m.grid().node(i);
      const double s = dot(x, nu);
      const double p = -x[0] * nu[1] + x[1] * nu[0];
      CHECK(f.phi[i] - s >= -1e-12);
      CHECK(f.amp[i] > 0.0);
      const bool ray_misses = std::abs(p) >= 1.0 || s < -std::sqrt(1.0 - p * p);
      if (ray_misses) CHECK(std::abs(f.phi[i] - s) <= 2e-3 * tau_max);
      // The upwind stencil draws on the whole quadrant behind x, not just the
      // ray; outside that cone the first-order plane wave is reproduced to
      // round-off. The WENO stencil also reads downwind nodes and leaks a
      // little further.
      // Distance from the origin to that quadrant (a half-plane along an axis
      // direction, where both neighbours compete).
      double q2 = 0.0;
      for (int d = 0; d < 2; ++d) {
        const bool free_axis = std::abs(nu[d]) < 1e-14;
        const bool origin_behind = (nu[d] > 0 && x[d] >= 0.0) || (nu[d] < 0 && x[d] <= 0.0);
        if (!free_axis && !origin_behind) q2 += x[d] * x[d];
      }
      if (std::sqrt(q2) >= supp) CHECK(std::abs(f.phi[i] - s) <= (order == 1 ? 1e-12 : 5e-6 * tau_max));
    }
  }
}

TEST_CASE("grid convergence on a curved wavefront") {
  const double e1 = point_source_error(37, 1), e2 = point_source_error(69, 1), e3 = point_source_error(133, 1);
  MESSAGE("first-order errors " << e1 << " " << e2 << " " << e3);
  CHECK(e1 / e2 >= 1.8);
  CHECK(e2 / e3 >= 1.8);
  // The first-order rows next to the boundary cap the WENO pass near second order.
  const double w1 = point_source_error(37, 3), w2 = point_source_error(69, 3), w3 = point_source_error(133, 3);
  MESSAGE("third-order errors " << w1 << " " << w2 << " " << w3);
  CHECK(w1 / w2 >= 3.0);
  CHECK(w2 / w3 >= 3.0);
  CHECK(w3 < e3 / 10.0);
}

TEST_CASE("eikonal against linearization along one direction") {
  const Medium m = gaussian(0.01);
  const double h = m.spacing();
  for (double a : {0.0, 1.1}) {
    const TravelTimeField f = solve_eikonal(m, direction(a));
    for (int j = 0; j < 64; ++j) {
      const Geometry g = Geometry::parallel_beam(a, sinogram_offset(j, 64, 1.0), 1.0, f.B);
      const double tau = f.phi_at(g.x_obs) - dot(g.x_obs, g.nu);
      CHECK(std::abs(tau - linearized_travel_time(m, g)) <= 2.0 * 1e-4 * 2.0 + 5.0 * h * h);
    }
  }
}

TEST_CASE("linearized travel time examples") {
  const Medium z = make_phantom(PhantomKind::zero, {}, 2, 1.0, 65);
  CHECK(linearized_travel_time(z, Geometry::parallel_beam(0.4, 0.2, 1.0, 1.1)) == 0.0);

  const Medium m = gaussian(0.01);
  const double oracle_central = oracle::gaussian_chord(kPi / 2, 0.0, 0.0, 0.0, 0.5, 0.01);
  // Untruncated value beta0 sigma sqrt(pi) erf(R / sigma) exceeds the cut-off one.
  CHECK(oracle_central < 0.01 * 0.5 * std::sqrt(kPi) * std::erf(2.0));
  CHECK(oracle_central == doctest::Approx(0.0087415).epsilon(1e-4));
  const double tau = linearized_travel_time(m, Geometry::parallel_beam(kPi / 2, 0.0, 1.0, 1.1));
  CHECK(std::abs(tau - oracle_central) <= 1e-6);

  // Offset 3 sigma: exact decay e^-9; the bilinear interpolant overshoots a
  // convex tail by at most h^2/8 |b''| / b = 4.25 (h / sigma)^2 relative.
  const double sigma = 0.2;
  const Medium narrow = gaussian(0.01, 129, sigma);
  const double c = linearized_travel_time(narrow, Geometry::parallel_beam(kPi / 2, 0.0, 1.0, 1.1));
  const double o = linearized_travel_time(narrow, Geometry::parallel_beam(kPi / 2, 3 * sigma, 1.0, 1.1));
  const double oc = oracle::gaussian_chord(kPi / 2, 0.0, 0.0, 0.0, sigma, 0.01);
  const double oo = oracle::gaussian_chord(kPi / 2, 3 * sigma, 0.0, 0.0, sigma, 0.01);
  CHECK(oo <= std::exp(-9.0) * oc * (1.0 + 1e-9));
  const double hs = narrow.spacing() / sigma;
  CHECK(o <= std::exp(-9.0) * c * (1.0 + 4.25 * hs * hs));
  CHECK(o >= 0.0);
}

TEST_CASE("chord quadrature step and weights") {
  const Chord c{{0.0, 1.0, 0.0}, {0.0, -1.0, 0.0}};
  const auto q = chord_quadrature(c, 0.1);
  double wsum = 0.0;
  for (const auto& p : q) wsum += p.w;
  CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(q.size() >= 41u);
  CHECK(norm(q[1].p - q[0].p) <= 0.05 + 1e-15);
}

TEST_CASE("amplitude") {
  const Medium z = make_phantom(PhantomKind::zero, {}, 2, 1.0, 65);
  const TravelTimeField fz = solve_eikonal(z, {0.0, 1.0, 0.0});
  CHECK(amplitude(z, fz, Geometry::parallel_beam(kPi / 2, 0.1, 1.0, fz.B)) == 1.0);

  const Medium m = gaussian(0.01);
  const TravelTimeField f = solve_eikonal(m, {0.0, 1.0, 0.0});
  for (int j = 0; j < 64; ++j) {
    const double A = amplitude(m, f, Geometry::parallel_beam(kPi / 2, sinogram_offset(j, 64, 1.0), 1.0, f.B));
    CHECK(A > 0.0);
    CHECK(std::abs(A - 1.0) <= 0.05);
  }

  // First order in beta: Laplacian(phi) ~ d_s beta + int (d_pp beta) behind x,
  // so along the central ray ln A ~ -1/2 [beta(x) + int_t0^s (s - t) b_pp(t) dt].
  auto bpp = [](double t) {
    const double e = 1e-3;
    auto b = [&](double p) { return oracle::gaussian2d(p, t, 0.0, 0.0, 0.5, 0.01); };
    return (b(e) - 2.0 * b(0.0) + b(-e)) / (e * e);
  };
  const double s = 1.0;
  const double I = oracle::integrate([&](double t) { return (s - t) * bpp(t); }, -1.0, s, 1e-9);
  const double A_lin = std::exp(-0.5 * I);
  const double A = amplitude(m, f, Geometry::parallel_beam(kPi / 2, 0.0, 1.0, f.B));
  MESSAGE("amplitude " << A << " first-order oracle " << A_lin);
  CHECK(std::abs(A - A_lin) <= 0.1 * std::abs(A_lin - 1.0));

  CHECK_THROWS_AS(amplitude(m, solve_eikonal(m, {1.0, 0.0, 0.0}),
                            Geometry::parallel_beam(kPi / 2, 0.0, 1.0, f.B)),
                  PreconditionError);
}

TEST_CASE("amplitude positive across the phantom corpus") {
  for (const Medium& m :
       {gaussian(0.01), gaussian(0.02), make_phantom(PhantomKind::gaussian, {0.3, -0.2, 0.3, 0.02}, 2, 1.0, 97),
        make_phantom(PhantomKind::two_balls, {0.4, 0.0, 0.2, 0.01, -0.4, 0.0, 0.2, 0.01}, 2, 1.0, 129)}) {
    for (double a : {0.0, 0.9, 2.2}) {
      const TravelTimeField f = solve_eikonal(m, direction(a));
      for (int j = 0; j < 16; ++j) {
        const Geometry g = Geometry::parallel_beam(a, sinogram_offset(j, 16, 1.0), 1.0, f.B);
        CHECK(amplitude(m, f, g) > 0.0);
      }
    }
  }
}

TEST_CASE("non-convergence raises with the residual") {
  const Medium m = gaussian(0.01, 65);
  EikonalOptions opts;
  opts.max_iterations = 1;
  try {
    solve_eikonal(m, direction(0.4), opts);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.residual() > opts.sweep_tol);
  }
  CHECK_THROWS_AS(solve_eikonal(m, {0.0, 2.0, 0.0}), PreconditionError);
}

TEST_CASE("3D solve on a coarse grid") {
  const Medium m = make_phantom(PhantomKind::gaussian, {0.0, 0.0, 0.0, 0.4, 0.01}, 3, 1.0, 25);
  const TravelTimeField f = solve_eikonal(m, {0.0, 0.0, 1.0});
  const Geometry g = Geometry::make({0.0, 0.0, 1.0}, {0.0, 0.0, 1.0}, 1.0, f.B);
  const double tau = f.phi_at(g.x_obs) - 1.0;
  CHECK(tau > 0.0);
  CHECK(std::abs(tau - linearized_travel_time(m, g)) <= 4e-4 + 5.0 * m.spacing() * m.spacing());
}

TEST_CASE("field CSV export") {
  const Medium m = make_phantom(PhantomKind::zero, {}, 2, 1.0, 9);
  std::ostringstream os;
  write_field_csv(os, solve_eikonal(m, {0.0, 1.0, 0.0}));
  CHECK(os.str().rfind("x,y,phi,amp\n", 0) == 0);
}
