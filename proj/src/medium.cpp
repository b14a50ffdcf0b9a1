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

#include "zcs/medium.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "zcs/error.hpp"
#include "zcs/io.hpp"

namespace zcs {

double norm(const Point& a) { return std::sqrt(dot(a, a)); }
Point operator+(const Point& a, const Point& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Point operator-(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Point operator*(double s, const Point& a) { return {s * a[0], s * a[1], s * a[2]}; }

Grid::Grid(int dim, double radius_R, int nodes_per_axis)
    : dim_(dim), n_(nodes_per_axis), radius_(radius_R) {
  if (dim != 2 && dim != 3) throw PreconditionError("grid: dim must be 2 or 3");
  if (!(radius_R > 0.0)) throw PreconditionError("grid: radius must be positive");
  if (nodes_per_axis < 8) throw PreconditionError("grid: need at least 8 nodes per axis");
  // (n - 1) h = 2 (R + 2 h)
  spacing_ = 2.0 * radius_R / (nodes_per_axis - 5);
  lower_ = -(radius_R + 2.0 * spacing_);
}

std::size_t Grid::size() const {
  std::size_t s = 1;
  for (int d = 0; d < dim_; ++d) s *= static_cast<std::size_t>(n_);
  return s;
}

Point Grid::node(std::size_t flat) const {
  const auto n = static_cast<std::size_t>(n_);
  Point p{coord(static_cast<int>(flat % n)), coord(static_cast<int>((flat / n) % n)), 0.0};
  if (dim_ == 3) p[2] = coord(static_cast<int>(flat / (n * n)));
  return p;
}

bool Grid::contains(const Point& p, double slack) const {
  const double lo = lower_ - slack, hi = upper() + slack;
  for (int d = 0; d < dim_; ++d)
    if (!(p[d] >= lo && p[d] <= hi)) return false;
  return true;
}

Stencil interpolation_stencil(const Grid& grid, const Point& p) {
  if (!grid.contains(p, 1e-9 * grid.spacing()))
    throw PreconditionError("interpolation: point outside grid box");
  std::array<int, 3> base{0, 0, 0};
  std::array<double, 3> frac{0.0, 0.0, 0.0};
  for (int d = 0; d < grid.dim(); ++d) {
    const double u = std::clamp((p[d] - grid.lower()) / grid.spacing(), 0.0,
                                static_cast<double>(grid.n() - 1));
    int i = std::min(static_cast<int>(std::floor(u)), grid.n() - 2);
    double f = u - i;
    // Round-off off a node must not leak weight onto its neighbour.
    if (f < 1e-10) f = 0.0;
    if (f > 1.0 - 1e-10) f = 1.0;
    base[d] = i;
    frac[d] = f;
  }
  Stencil s;
  const int corners = 1 << grid.dim();
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    std::array<int, 3> idx{0, 0, 0};
    for (int d = 0; d < grid.dim(); ++d) {
      const bool up = (c >> d) & 1;
      idx[d] = base[d] + (up ? 1 : 0);
      w *= up ? frac[d] : 1.0 - frac[d];
    }
    s.index[s.count] = grid.index(idx[0], idx[1], idx[2]);
    s.weight[s.count] = w;
    ++s.count;
  }
  return s;
}

double interpolate(const Grid& grid, std::span<const double> field, const Point& p) {
  const Stencil s = interpolation_stencil(grid, p);
  double v = 0.0;
  for (int c = 0; c < s.count; ++c) v += s.weight[c] * field[s.index[c]];
  return v;
}

std::string to_string(PhantomKind kind) {
  switch (kind) {
    case PhantomKind::zero: return "zero";
    case PhantomKind::gaussian: return "gaussian";
    case PhantomKind::two_balls: return "two_balls";
  }
  return "zero";
}

PhantomKind phantom_kind_from_string(const std::string& s) {
  if (s == "zero") return PhantomKind::zero;
  if (s == "gaussian") return PhantomKind::gaussian;
  if (s == "two_balls") return PhantomKind::two_balls;
  throw PreconditionError("unknown phantom kind '" + s + "'");
}

void to_json(nlohmann::json& j, const PhantomDescriptor& d) {
  j = nlohmann::json{{"kind", to_string(d.kind)},
                     {"params", d.params},
                     {"dim", d.dim},
                     {"R", d.radius_R},
                     {"grid_n", d.grid_n}};
}

void from_json(const nlohmann::json& j, PhantomDescriptor& d) {
  try {
    d.kind = phantom_kind_from_string(j.at("kind").get<std::string>());
    d.params = j.value("params", std::vector<double>{});
    d.dim = j.value("dim", 2);
    d.radius_R = j.value("R", 1.0);
    d.grid_n = j.value("grid_n", 129);
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("phantom descriptor: ") + e.what());
  }
}

double radial_cutoff(double radius, double radius_R) {
  const double r0 = kCutoffInner * radius_R, r1 = kCutoffOuter * radius_R;
  if (radius <= r0) return 1.0;
  if (radius >= r1) return 0.0;
  const double t = (radius - r0) / (r1 - r0);
  return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

namespace {

Point center_from(std::span<const double> params, int dim) {
  Point c{0.0, 0.0, 0.0};
  for (int d = 0; d < dim; ++d) c[d] = params[d];
  return c;
}

double bump(const Point& p, const Point& c, double radius, double height) {
  const Point q = p - c;
  const double t2 = dot(q, q) / (radius * radius);
  if (t2 >= 1.0) return 0.0;
  const double u = 1.0 - t2;
  return height * u * u * u;
}

void validate(const PhantomDescriptor& d) {
  if (d.dim != 2 && d.dim != 3) throw PreconditionError("phantom: dim must be 2 or 3");
  if (!(d.radius_R > 0.0)) throw PreconditionError("phantom: R must be positive");
  const auto dim = static_cast<std::size_t>(d.dim);
  switch (d.kind) {
    case PhantomKind::zero:
      if (!d.params.empty()) throw PreconditionError("phantom zero: takes no parameters");
      break;
    case PhantomKind::gaussian: {
      if (d.params.size() != dim + 2)
        throw PreconditionError("phantom gaussian: expected dim + 2 parameters");
      const double sigma = d.params[dim], beta0 = d.params[dim + 1];
      if (!(sigma > 0.0)) throw PreconditionError("phantom gaussian: sigma must be positive");
      if (!(beta0 >= 0.0)) throw PreconditionError("phantom gaussian: beta0 must be >= 0");
      // The peak must survive the cutoff untouched.
      if (norm(center_from(d.params, d.dim)) >= kCutoffInner * d.radius_R)
        throw PreconditionError("phantom gaussian: support violation, center outside 0.8 R");
      break;
    }
    case PhantomKind::two_balls: {
      if (d.params.size() != 2 * (dim + 2))
        throw PreconditionError("phantom two_balls: expected 2 * (dim + 2) parameters");
      for (int b = 0; b < 2; ++b) {
        std::span<const double> ball(d.params.data() + b * (dim + 2), dim + 2);
        const double radius = ball[dim], height = ball[dim + 1];
        if (!(radius > 0.0)) throw PreconditionError("phantom two_balls: radius must be positive");
        if (!(height >= 0.0)) throw PreconditionError("phantom two_balls: height must be >= 0");
        if (norm(center_from(ball, d.dim)) + radius >= d.radius_R)
          throw PreconditionError("phantom two_balls: support violation, ball reaches |x| = R");
      }
      break;
    }
  }
}

}  // namespace

double analytic_beta(const PhantomDescriptor& d, const Point& p) {
  const auto dim = static_cast<std::size_t>(d.dim);
  switch (d.kind) {
    case PhantomKind::zero: return 0.0;
    case PhantomKind::gaussian: {
      const Point q = p - center_from(d.params, d.dim);
      const double sigma = d.params[dim], beta0 = d.params[dim + 1];
      return beta0 * std::exp(-dot(q, q) / (sigma * sigma)) * radial_cutoff(norm(p), d.radius_R);
    }
    case PhantomKind::two_balls: {
      double v = 0.0;
      for (int b = 0; b < 2; ++b) {
        std::span<const double> ball(d.params.data() + b * (dim + 2), dim + 2);
        v += bump(p, center_from(ball, d.dim), ball[dim], ball[dim + 1]);
      }
      return v;
    }
  }
  return 0.0;
}

Medium::Medium(Grid grid, std::vector<double> beta, std::optional<PhantomDescriptor> phantom)
    : grid_(std::move(grid)), beta_(std::move(beta)), phantom_(std::move(phantom)) {
  if (beta_.size() != grid_.size()) throw PreconditionError("medium: field size mismatch");
  for (std::size_t i = 0; i < beta_.size(); ++i) {
    if (!(beta_[i] >= 0.0)) throw PreconditionError("medium: beta must be nonnegative");
    if (beta_[i] != 0.0 && norm(grid_.node(i)) >= grid_.radius())
      throw PreconditionError("medium: beta must vanish for |x| >= R");
  }
}

double Medium::max_beta() const {
  return beta_.empty() ? 0.0 : *std::max_element(beta_.begin(), beta_.end());
}

Medium make_phantom(const PhantomDescriptor& d) {
  validate(d);
  Grid grid(d.dim, d.radius_R, d.grid_n);
  std::vector<double> beta(grid.size());
  for (std::size_t i = 0; i < beta.size(); ++i) {
    const Point x = grid.node(i);
    beta[i] = norm(x) >= d.radius_R ? 0.0 : analytic_beta(d, x);
  }
  return Medium(std::move(grid), std::move(beta), d);
}

Medium make_phantom(PhantomKind kind, std::vector<double> params, int dim, double radius_R,
                    int grid_n) {
  return make_phantom(PhantomDescriptor{kind, std::move(params), dim, radius_R, grid_n});
}

Geometry Geometry::make(const Point& nu, const Point& x_obs, double radius_R, double B) {
  if (std::abs(norm(nu) - 1.0) > 1e-12) throw PreconditionError("geometry: nu must be unit");
  if (std::abs(norm(x_obs) - radius_R) > 1e-9)
    throw PreconditionError("geometry: observation point must lie on |x| = R");
  if (!(B >= radius_R)) throw PreconditionError("geometry: inflow offset B must be >= R");
  return Geometry{nu, x_obs, B};
}

Geometry Geometry::parallel_beam(double angle, double offset, double radius_R, double B) {
  if (!(std::abs(offset) < radius_R))
    throw PreconditionError("geometry: offset must lie in (-R, R)");
  const Point nu{std::cos(angle), std::sin(angle), 0.0};
  const Point perp{-nu[1], nu[0], 0.0};
  const double along = std::sqrt(radius_R * radius_R - offset * offset);
  Point x = offset * perp + along * nu;
  // Project back onto the sphere to absorb rounding.
  x = (radius_R / norm(x)) * x;
  return make(nu, x, radius_R, B);
}

Chord chord_for(const Geometry& g) {
  const double proj = dot(g.x_obs, g.nu);
  if (!(proj > 0.0))
    throw PreconditionError("chord: observation point must lie on S+(nu), x.nu > 0");
  return Chord{g.x_obs, g.x_obs - (2.0 * proj) * g.nu};
}

void write_grid_csv(std::ostream& os, const Grid& grid, std::span<const double> values,
                    const std::string& value_name) {
  os << (grid.dim() == 3 ? "x,y,z," : "x,y,") << value_name << '\n';
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point p = grid.node(i);
    os << io::format_double(p[0]) << ',' << io::format_double(p[1]) << ',';
    if (grid.dim() == 3) os << io::format_double(p[2]) << ',';
    os << io::format_double(values[i]) << '\n';
  }
}

}  // namespace zcs
