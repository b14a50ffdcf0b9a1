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

// First-arrival travel time |grad phi| = n for a plane wave entering along nu,
// the geometric amplitude carried along straight rays, and the straight-ray
// travel-time perturbation used as an independent check.

#include <span>
#include <vector>

#include "zcs/medium.hpp"

namespace zcs {

struct EikonalOptions {
  double sweep_tol = 1e-8;
  int max_iterations = 500;
  // Inflow plane offset; <= 0 selects R + 2 * spacing.
  double B = 0.0;
  // 1: first-order upwind differences. 3: third-order WENO differences,
  // started from the converged first-order solution.
  int order = 3;
};

struct FastSweepResult {
  std::vector<double> phi;
  double residual = 0.0;
  int iterations = 0;
};

// Godunov upwind fast sweeping on an arbitrary index-of-refraction field.
// fixed[i] is the Dirichlet value at node i, or NaN for a free node.
// Throws ConvergenceError after max_iterations.
FastSweepResult fast_sweep(const Grid& grid, std::span<const double> refraction,
                           std::span<const double> fixed, const EikonalOptions& opts = {});

struct TravelTimeField {
  Grid grid;
  Point nu{};
  double B = 0.0;
  std::vector<double> phi;
  std::vector<double> laplacian;  // central-difference Laplacian of phi
  std::vector<double> amp;        // A at every node
  double residual = 0.0;
  int iterations = 0;

  double phi_at(const Point& p) const { return interpolate(grid, phi, p); }
};

TravelTimeField solve_eikonal(const Medium& medium, const Point& nu,
                              const EikonalOptions& opts = {});

// A(x, nu) = exp(-1/2 * integral over the ray of n^-2 * Laplacian(phi) dtau), dtau = n ds,
// with the ray replaced by the straight segment from the inflow plane to x.
double amplitude(const Medium& medium, const TravelTimeField& field, const Geometry& geometry);

// Quadrature nodes and weights of the composite trapezoid rule along a chord
// with step <= spacing / 2.
struct QuadraturePoint {
  Point p;
  double w;
};
std::vector<QuadraturePoint> chord_quadrature(const Chord& chord, double spacing);

// integral of beta over chord_for(geometry).
double linearized_travel_time(const Medium& medium, const Geometry& geometry);

void write_field_csv(std::ostream& os, const TravelTimeField& field);

}  // namespace zcs
