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

// Refractive perturbation n = 1 + beta on a uniform grid, its analytic
// phantoms, and the scattering geometry (ball of radius R, hemispheres,
// chords).

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace zcs {

// Points are stored with three components; the third is zero when dim == 2.
using Point = std::array<double, 3>;

inline double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double norm(const Point& a);
Point operator+(const Point& a, const Point& b);
Point operator-(const Point& a, const Point& b);
Point operator*(double s, const Point& a);

// Uniform Cartesian grid covering [-R-m, R+m]^dim with margin m = 2 * spacing.
class Grid {
 public:
  Grid() = default;
  Grid(int dim, double radius_R, int nodes_per_axis);

  int dim() const { return dim_; }
  int n() const { return n_; }
  double spacing() const { return spacing_; }
  // Coordinate of node 0 on every axis.
  double lower() const { return lower_; }
  double upper() const { return lower_ + spacing_ * (n_ - 1); }
  double radius() const { return radius_; }
  std::size_t size() const;

  std::size_t index(int i, int j, int k = 0) const {
    return (static_cast<std::size_t>(k) * n_ + j) * n_ + i;
  }
  double coord(int i) const { return lower_ + spacing_ * i; }
  Point node(std::size_t flat) const;
  bool contains(const Point& p, double slack = 1e-12) const;

  bool operator==(const Grid& other) const = default;

 private:
  int dim_ = 2;
  int n_ = 0;
  double radius_ = 0.0;
  double spacing_ = 0.0;
  double lower_ = 0.0;
};

// Bilinear (trilinear for dim 3) interpolation of a node field. Throws
// PreconditionError outside the grid box.
double interpolate(const Grid& grid, std::span<const double> field, const Point& p);

// Interpolation stencil: up to 2^dim node indices with nonnegative weights
// summing to one.
struct Stencil {
  std::array<std::size_t, 8> index{};
  std::array<double, 8> weight{};
  int count = 0;
};
Stencil interpolation_stencil(const Grid& grid, const Point& p);

enum class PhantomKind { zero, gaussian, two_balls };

std::string to_string(PhantomKind kind);
PhantomKind phantom_kind_from_string(const std::string& s);

// Analytic description of a phantom. Parameter layout:
//   zero:      []
//   gaussian:  [c_1..c_dim, sigma, beta0]   beta0 * exp(-|x-c|^2 / sigma^2) * cutoff(|x|)
//   two_balls: [c_1..c_dim, radius, height] x 2, each a C2 bump height * (1 - |x-c|^2/r^2)^3
struct PhantomDescriptor {
  PhantomKind kind = PhantomKind::zero;
  std::vector<double> params;
  int dim = 2;
  double radius_R = 1.0;
  int grid_n = 65;

  bool operator==(const PhantomDescriptor& other) const = default;
};

void to_json(nlohmann::json& j, const PhantomDescriptor& d);
void from_json(const nlohmann::json& j, PhantomDescriptor& d);

// Smooth radial cutoff: 1 for |x| <= 0.8 R, 0 for |x| >= 0.95 R, C2 in between.
double radial_cutoff(double radius, double radius_R);
inline constexpr double kCutoffInner = 0.80;
inline constexpr double kCutoffOuter = 0.95;

// Exact phantom value at p. Validates nothing; see make_phantom.
double analytic_beta(const PhantomDescriptor& d, const Point& p);

class Medium {
 public:
  Medium(Grid grid, std::vector<double> beta, std::optional<PhantomDescriptor> phantom = {});

  const Grid& grid() const { return grid_; }
  int dim() const { return grid_.dim(); }
  double radius() const { return grid_.radius(); }
  double spacing() const { return grid_.spacing(); }
  std::span<const double> beta() const { return beta_; }
  const std::optional<PhantomDescriptor>& phantom() const { return phantom_; }
  double max_beta() const;

  double eval_beta(const Point& p) const { return interpolate(grid_, beta_, p); }

 private:
  Grid grid_;
  std::vector<double> beta_;
  std::optional<PhantomDescriptor> phantom_;
};

Medium make_phantom(const PhantomDescriptor& d);
Medium make_phantom(PhantomKind kind, std::vector<double> params, int dim, double radius_R,
                    int grid_n);

// Incident direction, observation point on the sphere |x| = R, inflow plane offset.
struct Geometry {
  Point nu{};
  Point x_obs{};
  double B = 0.0;

  // Validates |nu| = 1 and |x_obs| = R; B defaults to R + 2 * spacing.
  static Geometry make(const Point& nu, const Point& x_obs, double radius_R, double B);
  // dim-2 chord family: nu = (cos a, sin a), x_obs = p nu_perp + sqrt(R^2 - p^2) nu.
  static Geometry parallel_beam(double angle, double offset, double radius_R, double B);
};

struct Chord {
  Point p0{};
  Point p1{};
  double length() const { return norm(p1 - p0); }
};

// Segment from x_obs to its reflection x_obs - 2 (x_obs . nu) nu.
Chord chord_for(const Geometry& g);

void write_grid_csv(std::ostream& os, const Grid& grid, std::span<const double> values,
                    const std::string& value_name = "value");

}  // namespace zcs
