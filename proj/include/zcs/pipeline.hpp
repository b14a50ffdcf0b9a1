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

// End-to-end experiment: phantom -> travel times -> phaseless signals ->
// travel-time estimates -> reconstruction, plus the data/medium uniqueness
// comparison between two experiments.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "zcs/eikonal.hpp"
#include "zcs/forward.hpp"
#include "zcs/medium.hpp"
#include "zcs/tomo.hpp"

namespace zcs {

struct GeometryProtocol {
  int n_dirs = 60;
  int n_offsets = 64;
  double B = 0.0;  // <= 0: R + 2 * spacing
};

struct SignalProtocol {
  double k_min = 1000.0;
  double k_max = 61000.0;
  std::size_t N_k = 1024;
  double tail_c = 0.0;
  std::uint64_t seed = 7;
};

struct SolverProtocol {
  ReconMethod method = ReconMethod::kaczmarz;
  int sweeps = 20;
  double relax = 0.25;
  int grid_n = 64;
  std::uint64_t seed = 1;
};

struct Tolerances {
  double eq_tol = 0.0;      // <= 0: 1e-12 max f without tail, 1e-3 max f with tail
  double tau_tol = 1e-3;    // relative to the largest estimated tau
  double solver_floor = 0.02;
};

struct ExperimentConfig {
  PhantomDescriptor phantom{PhantomKind::gaussian, {0.0, 0.0, 0.5, 0.01}, 2, 1.0, 129};
  GeometryProtocol geometry;
  SignalProtocol signal;
  SolverProtocol solver;
  Tolerances tolerances;
  double sweep_tol = 1e-8;
  int eikonal_order = 3;  // 1 or 3, see EikonalOptions

  void validate() const;
  double resolved_B(const Grid& grid) const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);
ExperimentConfig load_config(const std::filesystem::path& path);

struct ChordTruth {
  double angle = 0.0;
  double offset = 0.0;
  TwoTermModel model;
  double tau_linear = 0.0;  // straight-ray quadrature of beta
};

struct ForwardData {
  Medium medium;
  std::vector<ChordTruth> chords;
  std::vector<ChordSignal> signals;
};

// In-memory forward stage. Throws PreconditionError naming the chord when the
// k window spans fewer than 5 dips at the largest-tau chord.
ForwardData synthesize(const ExperimentConfig& config);

// Writes manifest.json, medium.csv, chords.csv, signals.csv, sinogram.csv
// (straight-line integrals of beta) and travel_times.csv (eikonal tau, the
// values the signals carry) into out_dir.
ForwardData run_forward(const ExperimentConfig& config, const std::filesystem::path& out_dir);

struct RecoverResult {
  ExperimentConfig config;
  Sinogram sinogram;
  Reconstruction reconstruction;
  nlohmann::json report;
};

// Verifies manifest hashes (IntegrityError on mismatch), estimates tau per chord
// and reconstructs. With out_dir non-empty, writes sinogram_estimated.csv,
// reconstruction.csv and report.json there.
RecoverResult run_recover(const std::filesystem::path& bundle_dir,
                          const std::filesystem::path& out_dir = {});

// In-memory recovery stage shared with run_recover.
Reconstruction recover_from_signals(const ExperimentConfig& config,
                                    const std::vector<ChordSignal>& signals, Sinogram* estimated);

enum class Verdict { indistinguishable_data_identical_media, distinguishable_data, inconsistent };
std::string to_string(Verdict v);

struct UniquenessReport {
  bool data_equal = false;
  double eq_tol = 0.0;
  double max_f_discrepancy = 0.0;
  double central_f_discrepancy = 0.0;
  double tau_discrepancy = 0.0;
  double recon_discrepancy = 0.0;
  double recon_linf = 0.0;
  Verdict verdict = Verdict::distinguishable_data;
};
void to_json(nlohmann::json& j, const UniquenessReport& r);

// Throws PreconditionError when the geometry, signal window or solver
// protocols differ (seeds excepted). Both data sets are reconstructed with the
// solver protocol of `a`.
UniquenessReport uniqueness_test(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace zcs
