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

// Parallel-beam travel-time sinograms and their algebraic inversion.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "zcs/eikonal.hpp"
#include "zcs/forward.hpp"
#include "zcs/medium.hpp"
#include "zcs/zerocount.hpp"

namespace zcs {

struct SinogramRecord {
  double angle = 0.0;   // nu = (cos angle, sin angle)
  double offset = 0.0;  // signed distance of the chord from the origin along nu_perp
  double tau = 0.0;
  double weight = 1.0;
};

struct Sinogram {
  std::vector<SinogramRecord> records;
  int n_dirs = 0;
  int n_offsets = 0;
  double radius_R = 1.0;

  Geometry geometry(std::size_t i, double B) const;
};

// Directions i * pi / n_dirs, offsets -R + (j + 1/2) 2R / n_offsets; record
// index i * n_offsets + j.
double sinogram_angle(int i, int n_dirs);
double sinogram_offset(int j, int n_offsets, double radius_R);

Sinogram xray_forward(const Medium& medium, int n_dirs, int n_offsets);

struct ChordSignal {
  double angle = 0.0;
  double offset = 0.0;
  PhaselessSignal signal;
};

// tau from estimate_tau per chord; weight 1 - 0.9 * disagreement / 5%, halved
// for low-confidence chords. Errors name the offending chord.
Sinogram sinogram_from_signals(const std::vector<ChordSignal>& signals, int n_dirs, int n_offsets,
                               double radius_R, const TauOptions& opts = {});

void write_sinogram_csv(std::ostream& os, const Sinogram& s);
Sinogram read_sinogram_csv(const std::string& path, double radius_R);

// Row-compressed line-integral operator: row i integrates the bilinear
// interpolant of a node field along chord i with the chord quadrature rule.
struct SystemMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::size_t> row_ptr;
  std::vector<std::int32_t> col;
  std::vector<double> val;

  void apply(std::span<const double> b, std::span<double> t) const;
  void apply_transpose(std::span<const double> t, std::span<double> b) const;
};
SystemMatrix build_system_matrix(const Grid& grid, const Sinogram& sinogram);

enum class ReconMethod { kaczmarz, cgls };
std::string to_string(ReconMethod m);
ReconMethod recon_method_from_string(const std::string& s);

struct ReconOptions {
  ReconMethod method = ReconMethod::kaczmarz;
  int sweeps = 20;
  double relax = 0.25;
  std::uint64_t seed = 1;
};

struct Reconstruction {
  Grid grid;
  std::vector<double> beta_hat;
  int iterations = 0;
  std::vector<double> residual_history;  // entry 0 is the residual of beta_hat = 0
  std::optional<double> rel_l2_error;
};

Reconstruction reconstruct(const Sinogram& sinogram, int grid_n, const ReconOptions& opts = {});

// Relative L2 error of a reconstruction against a field on the same grid.
double relative_l2(std::span<const double> estimate, std::span<const double> truth);

struct MediaComparison {
  double linf_diff = 0.0;
  double rel_l2_diff = 0.0;
};
// rel_l2_diff = |a - b| / max(|a|, |b|), 0 when both vanish.
MediaComparison compare_media(const Reconstruction& a, const Reconstruction& b);

void write_reconstruction_csv(std::ostream& os, const Reconstruction& r);

}  // namespace zcs
