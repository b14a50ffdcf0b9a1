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

#include "zcs/eikonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "zcs/error.hpp"
#include "zcs/io.hpp"

namespace zcs {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Solves the upwind quadratic for sorted neighbour minima a[0] <= a[1] <= a[2].
double godunov_update(std::array<double, 3> a, int dim, double fh) {
  std::sort(a.begin(), a.begin() + dim);
  double u = a[0] + fh;
  if (dim >= 2 && u > a[1]) {
    const double d = a[0] - a[1];
    u = 0.5 * (a[0] + a[1] + std::sqrt(std::max(0.0, 2.0 * fh * fh - d * d)));
    if (dim == 3 && u > a[2]) {
      const double s = a[0] + a[1] + a[2];
      const double q = a[0] * a[0] + a[1] * a[1] + a[2] * a[2] - fh * fh;
      u = (s + std::sqrt(std::max(0.0, s * s - 3.0 * q))) / 3.0;
    }
  }
  return u;
}

// One-sided WENO3 estimates of h * u' at c from five values u[c-2..c+2]; NaN
// or inf entries are not allowed. Returns {backward, forward}.
std::array<double, 2> weno3(double um2, double um1, double u0, double up1, double up2) {
  constexpr double eps = 1e-6;
  const double central = 0.5 * (up1 - um1);
  const double mid = up1 - 2.0 * u0 + um1;
  const double lo = u0 - 2.0 * um1 + um2;
  const double hi = u0 - 2.0 * up1 + up2;
  const double rm = (eps + lo * lo) / (eps + mid * mid);
  const double rp = (eps + hi * hi) / (eps + mid * mid);
  const double wm = 1.0 / (1.0 + 2.0 * rm * rm);
  const double wp = 1.0 / (1.0 + 2.0 * rp * rp);
  const double back = (1.0 - wm) * central + wm * 0.5 * (3.0 * u0 - 4.0 * um1 + um2);
  const double fwd = (1.0 - wp) * central + wp * 0.5 * (-3.0 * u0 + 4.0 * up1 - up2);
  return {back, fwd};
}

}  // namespace

FastSweepResult fast_sweep(const Grid& grid, std::span<const double> refraction,
                           std::span<const double> fixed, const EikonalOptions& opts) {
  const std::size_t total = grid.size();
  if (refraction.size() != total || fixed.size() != total)
    throw PreconditionError("fast_sweep: field size mismatch");
  const int n = grid.n();
  const int dim = grid.dim();
  const int nz = dim == 3 ? n : 1;
  const double h = grid.spacing();

  FastSweepResult out;
  out.phi.assign(total, kInf);
  std::vector<char> is_fixed(total, 0);
  for (std::size_t i = 0; i < total; ++i) {
    if (!std::isnan(fixed[i])) {
      out.phi[i] = fixed[i];
      is_fixed[i] = 1;
    }
  }

  auto& u = out.phi;
  auto neighbour_min = [&](int i, int j, int k, int axis) {
    std::array<int, 3> c{i, j, k};
    double m = kInf;
    for (int s : {-1, 1}) {
      std::array<int, 3> q = c;
      q[axis] += s;
      if (q[axis] < 0 || q[axis] >= n) continue;
      m = std::min(m, u[grid.index(q[0], q[1], q[2])]);
    }
    return m;
  };

  if (opts.order != 1 && opts.order != 3)
    throw PreconditionError("fast_sweep: order must be 1 or 3");
  const int orderings = 1 << dim;
  int iter = 1;
  for (; iter <= opts.max_iterations; ++iter) {
    double change = 0.0;
    for (int o = 0; o < orderings; ++o) {
      const bool rx = o & 1, ry = o & 2, rz = o & 4;
      for (int kk = 0; kk < nz; ++kk) {
        const int k = rz ? nz - 1 - kk : kk;
        for (int jj = 0; jj < n; ++jj) {
          const int j = ry ? n - 1 - jj : jj;
          for (int ii = 0; ii < n; ++ii) {
            const int i = rx ? n - 1 - ii : ii;
            const std::size_t idx = grid.index(i, j, k);
            if (is_fixed[idx]) continue;
            std::array<double, 3> a{kInf, kInf, kInf};
            for (int d = 0; d < dim; ++d) a[d] = neighbour_min(i, j, k, d);
            if (a[0] == kInf && a[1] == kInf && a[2] == kInf) continue;
            const double cand = godunov_update(a, dim, refraction[idx] * h);
            if (cand < u[idx]) {
              const double delta = u[idx] == kInf ? kInf : u[idx] - cand;
              change = std::max(change, delta);
              u[idx] = cand;
            }
          }
        }
      }
    }
    out.iterations = iter;
    out.residual = change;
    if (change <= opts.sweep_tol) break;
  }
  if (iter > opts.max_iterations) throw ConvergenceError("fast_sweep: no convergence after " +
                             std::to_string(opts.max_iterations) + " iterations, residual " +
                             std::to_string(out.residual),
                         out.residual);
  if (opts.order == 1) return out;

  // Third-order pass: the WENO differences replace the upwind neighbour
  // minima wherever the five-point stencil fits; the update is not clipped
  // by the old value, so the residual is the max |change|.
  auto at = [&](std::array<int, 3> c, int axis, int s) {
    c[axis] += s;
    return u[grid.index(c[0], c[1], c[2])];
  };
  for (++iter; iter <= opts.max_iterations; ++iter) {
    double change = 0.0;
    for (int o = 0; o < orderings; ++o) {
      const bool rx = o & 1, ry = o & 2, rz = o & 4;
      for (int kk = 0; kk < nz; ++kk) {
        const int k = rz ? nz - 1 - kk : kk;
        for (int jj = 0; jj < n; ++jj) {
          const int j = ry ? n - 1 - jj : jj;
          for (int ii = 0; ii < n; ++ii) {
            const int i = rx ? n - 1 - ii : ii;
            const std::size_t idx = grid.index(i, j, k);
            if (is_fixed[idx]) continue;
            const std::array<int, 3> c{i, j, k};
            std::array<double, 3> a{kInf, kInf, kInf};
            for (int d = 0; d < dim; ++d) {
              if (c[d] < 2 || c[d] > n - 3) {
                a[d] = neighbour_min(i, j, k, d);
                continue;
              }
              const auto [back, fwd] =
                  weno3(at(c, d, -2), at(c, d, -1), u[idx], at(c, d, 1), at(c, d, 2));
              a[d] = std::min(u[idx] - back, u[idx] + fwd);
            }
            const double cand = godunov_update(a, dim, refraction[idx] * h);
            change = std::max(change, std::abs(cand - u[idx]));
            u[idx] = cand;
          }
        }
      }
    }
    out.iterations = iter;
    out.residual = change;
    if (change <= opts.sweep_tol) return out;
  }
  throw ConvergenceError("fast_sweep: third-order pass did not converge after " +
                             std::to_string(opts.max_iterations) + " iterations, residual " +
                             std::to_string(out.residual),
                         out.residual);
}

namespace {

std::vector<double> central_laplacian(const Grid& grid, std::span<const double> phi) {
  const int n = grid.n(), dim = grid.dim();
  const int nz = dim == 3 ? n : 1;
  const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
  std::vector<double> lap(grid.size(), 0.0);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        // Boundary nodes take the value of the nearest interior node.
        std::array<int, 3> c{std::clamp(i, 1, n - 2), std::clamp(j, 1, n - 2),
                             dim == 3 ? std::clamp(k, 1, n - 2) : 0};
        const double centre = phi[grid.index(c[0], c[1], c[2])];
        double s = 0.0;
        for (int d = 0; d < dim; ++d) {
          std::array<int, 3> lo = c, hi = c;
          --lo[d];
          ++hi[d];
          s += phi[grid.index(lo[0], lo[1], lo[2])] + phi[grid.index(hi[0], hi[1], hi[2])] -
               2.0 * centre;
        }
        lap[grid.index(i, j, k)] = s * inv_h2;
      }
  return lap;
}

// Portion t in [0, t_max] of x - t * nu that stays inside the grid box.
double box_exit(const Grid& grid, const Point& x, const Point& nu, double t_max) {
  double t_hi = t_max;
  for (int d = 0; d < grid.dim(); ++d) {
    if (std::abs(nu[d]) < 1e-15) continue;
    // lower <= x_d - t nu_d <= upper
    const double t_lower = (x[d] - grid.lower()) / nu[d];
    const double t_upper = (x[d] - grid.upper()) / nu[d];
    t_hi = std::min(t_hi, std::max(t_lower, t_upper));
  }
  return std::max(0.0, t_hi);
}

double ray_amplitude(const Grid& grid, std::span<const double> beta,
                     std::span<const double> laplacian, const Point& x, const Point& nu,
                     double B) {
  const double length = box_exit(grid, x, nu, dot(x, nu) + B);
  if (length <= 0.0) return 1.0;
  const double h = grid.spacing();
  const int steps = std::max(1, static_cast<int>(std::ceil(length / h - 1e-9)));
  const double dt = length / steps;
  double integral = 0.0;
  for (int s = 0; s <= steps; ++s) {
    const Point p = x - (s * dt) * nu;
    const double refr = 1.0 + interpolate(grid, beta, p);
    const double w = (s == 0 || s == steps) ? 0.5 : 1.0;
    // n^-2 * lap * dtau with dtau = n ds
    integral += w * interpolate(grid, laplacian, p) / refr;
  }
  return std::exp(-0.5 * integral * dt);
}

}  // namespace

TravelTimeField solve_eikonal(const Medium& medium, const Point& nu, const EikonalOptions& opts) {
  if (std::abs(norm(nu) - 1.0) > 1e-12) throw PreconditionError("eikonal: nu must be unit");
  const Grid& grid = medium.grid();
  const double B = opts.B > 0.0 ? opts.B : medium.radius() + 2.0 * grid.spacing();
  if (B < medium.radius()) throw PreconditionError("eikonal: B must be >= R");

  const std::size_t total = grid.size();
  std::vector<double> refraction(total), fixed(total, std::numeric_limits<double>::quiet_NaN());
  const auto beta = medium.beta();
  const int n = grid.n();
  for (std::size_t i = 0; i < total; ++i) {
    refraction[i] = 1.0 + beta[i];
    const Point x = grid.node(i);
    const double plane = dot(x, nu);
    bool inflow = plane <= -B;
    // On an inflow face the backward ray leaves the box, so it never meets
    // supp beta and the plane-wave value is exact.
    std::array<int, 3> ijk{static_cast<int>(i % n), static_cast<int>((i / n) % n),
                           static_cast<int>(i / (static_cast<std::size_t>(n) * n))};
    for (int d = 0; d < grid.dim() && !inflow; ++d) {
      if (nu[d] > 1e-14 && ijk[d] == 0) inflow = true;
      if (nu[d] < -1e-14 && ijk[d] == n - 1) inflow = true;
    }
    if (inflow) fixed[i] = plane;
  }

  FastSweepResult sweep = fast_sweep(grid, refraction, fixed, opts);
  TravelTimeField field;
  field.grid = grid;
  field.nu = nu;
  field.B = B;
  field.phi = std::move(sweep.phi);
  // beta >= 0, so no arrival beats the plane wave; the WENO pass can
  // undershoot that bound by its truncation error.
  for (std::size_t i = 0; i < total; ++i)
    field.phi[i] = std::max(field.phi[i], dot(grid.node(i), nu));
  field.residual = sweep.residual;
  field.iterations = sweep.iterations;
  // Laplacian of the perturbation phi - x.nu, which equals that of phi since the
  // plane wave is harmonic; round-off of the plane wave is flushed to zero.
  std::vector<double> pert(total);
  for (std::size_t i = 0; i < total; ++i) {
    const double d = field.phi[i] - dot(grid.node(i), nu);
    pert[i] = std::abs(d) <= 16.0 * kEps * std::max(1.0, std::abs(field.phi[i])) ? 0.0 : d;
  }
  field.laplacian = central_laplacian(grid, pert);
  field.amp.resize(total);
  for (std::size_t i = 0; i < total; ++i)
    field.amp[i] = ray_amplitude(grid, beta, field.laplacian, grid.node(i), nu, B);
  return field;
}

double amplitude(const Medium& medium, const TravelTimeField& field, const Geometry& geometry) {
  if (!(field.grid == medium.grid())) throw PreconditionError("amplitude: grid mismatch");
  if (norm(field.nu - geometry.nu) > 1e-12)
    throw PreconditionError("amplitude: field solved for a different direction");
  if (!field.grid.contains(geometry.x_obs))
    throw PreconditionError("amplitude: observation point outside grid");
  return ray_amplitude(field.grid, medium.beta(), field.laplacian, geometry.x_obs, geometry.nu,
                       field.B);
}

std::vector<QuadraturePoint> chord_quadrature(const Chord& chord, double spacing) {
  const double length = chord.length();
  const int steps = std::max(1, static_cast<int>(std::ceil(2.0 * length / spacing - 1e-9)));
  const double dt = length / steps;
  const Point dir = length > 0.0 ? (1.0 / length) * (chord.p1 - chord.p0) : Point{};
  std::vector<QuadraturePoint> q;
  q.reserve(steps + 1);
  for (int s = 0; s <= steps; ++s) {
    const Point p = s == steps ? chord.p1 : chord.p0 + (s * dt) * dir;
    q.push_back({p, (s == 0 || s == steps) ? 0.5 * dt : dt});
  }
  return q;
}

double linearized_travel_time(const Medium& medium, const Geometry& geometry) {
  const Chord chord = chord_for(geometry);
  double tau = 0.0;
  for (const auto& q : chord_quadrature(chord, medium.spacing()))
    tau += q.w * medium.eval_beta(q.p);
  return std::max(0.0, tau);
}

void write_field_csv(std::ostream& os, const TravelTimeField& field) {
  const Grid& grid = field.grid;
  os << (grid.dim() == 3 ? "x,y,z,phi,amp\n" : "x,y,phi,amp\n");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point p = grid.node(i);
    os << io::format_double(p[0]) << ',' << io::format_double(p[1]) << ',';
    if (grid.dim() == 3) os << io::format_double(p[2]) << ',';
    os << io::format_double(field.phi[i]) << ',' << io::format_double(field.amp[i]) << '\n';
  }
}

}  // namespace zcs
