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

// zcs command-line driver.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "zcs/error.hpp"
#include "zcs/io.hpp"
#include "zcs/pipeline.hpp"
#include "zcs/zerocount.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> tail_seed;
  std::optional<double> sweep_tol;
  std::optional<int> eikonal_order;
  std::optional<std::string> method;
  std::optional<int> sweeps;
  std::optional<double> relax;
  std::optional<std::uint64_t> seed;
};

void add_solver_flags(CLI::App* app, Common& c) {
  app->add_option("--method", c.method, "kaczmarz or cgls");
  app->add_option("--sweeps", c.sweeps, "solver sweeps / iterations");
  app->add_option("--relax", c.relax, "Kaczmarz relaxation in (0, 2)");
  app->add_option("--seed", c.seed, "Kaczmarz row-order seed");
}

zcs::ExperimentConfig resolve_config(const Common& c) {
  zcs::ExperimentConfig cfg = c.config.empty() ? zcs::ExperimentConfig{} : zcs::load_config(c.config);
  if (c.tail_seed) cfg.signal.seed = *c.tail_seed;
  if (c.sweep_tol) cfg.sweep_tol = *c.sweep_tol;
  if (c.eikonal_order) cfg.eikonal_order = *c.eikonal_order;
  if (c.method) cfg.solver.method = zcs::recon_method_from_string(*c.method);
  if (c.sweeps) cfg.solver.sweeps = *c.sweeps;
  if (c.relax) cfg.solver.relax = *c.relax;
  if (c.seed) cfg.solver.seed = *c.seed;
  cfg.validate();
  return cfg;
}

void emit(const std::string& out, const std::string& name, const std::string& content) {
  if (out.empty()) {
    std::cout << content;
    return;
  }
  fs::create_directories(out);
  zcs::io::write_file(fs::path(out) / name, content);
}

int cmd_forward(const Common& c) {
  if (c.out.empty()) throw zcs::PreconditionError("forward: --out is required");
  const zcs::ExperimentConfig cfg = resolve_config(c);
  const zcs::ForwardData d = zcs::run_forward(cfg, c.out);
  std::cout << "wrote " << d.chords.size() << " chords to " << c.out << "\n";
  return 0;
}

int cmd_recover(const std::string& bundle, const Common& c) {
  const zcs::RecoverResult r = zcs::run_recover(bundle, c.out);
  std::cout << r.report.dump(2) << "\n";
  return 0;
}

struct ZerosArgs {
  double amp = 0.5;
  double tau = 1.0;
  double phase_inc = 0.0;
  double alpha = 0.0;
  double s = 100.0;
  std::optional<double> h_lo, h_hi;
  double sector = 0.5;
};

int cmd_zeros(const ZerosArgs& z, const Common& c) {
  if (!(z.tau > 0.0)) throw zcs::PreconditionError("zeros: --tau must be positive");
  const zcs::TwoTermModel model = zcs::TwoTermModel::make(z.amp, z.phase_inc + z.tau, z.phase_inc);
  const zcs::ExpSum sum = zcs::ExpSum::from_two_term(model);
  const double K = zcs::dickson_height(sum);
  const zcs::StripRegion rect =
      zcs::StripRegion::make(z.alpha, z.s, z.h_lo.value_or(-K), z.h_hi.value_or(K));
  const int count = zcs::count_zeros_rect(sum, rect);

  const auto [m0, m1] = zcs::zero_index_range(z.tau, rect.alpha, rect.alpha + rect.s);
  std::vector<zcs::cplx> inside;
  for (const zcs::cplx k : zcs::analytic_zeros_two_term(z.amp, z.tau, m0, m1)) {
    if (rect.contains(k)) inside.push_back(k);
  }
  std::ostringstream zs;
  zs << "Re,Im\n";
  for (const zcs::cplx k : inside)
    zs << zcs::io::format_double(k.real()) << ',' << zcs::io::format_double(k.imag()) << '\n';

  // Density over the zeros of the window, radii stepped to its right edge.
  const double r_max = std::abs(zcs::cplx(rect.alpha + rect.s, std::max(std::abs(rect.h_lo), std::abs(rect.h_hi))));
  std::ostringstream ds;
  ds << "r,N,density\n";
  for (int i = 1; i <= 10; ++i) {
    const double r = r_max * i / 10.0;
    const zcs::DensityEstimate e = zcs::cartwright_density(inside, {-z.sector, z.sector}, r);
    ds << zcs::io::format_double(r) << ',' << e.count_N << ',' << zcs::io::format_double(e.density)
       << '\n';
  }

  const json summary{{"count", count},
                     {"analytic_count", inside.size()},
                     {"expected", z.s * z.tau / (2.0 * std::numbers::pi)},
                     {"rect", {{"alpha", rect.alpha}, {"s", rect.s}, {"h_lo", rect.h_lo}, {"h_hi", rect.h_hi}}}};
  if (c.out.empty()) {
    std::cout << summary.dump(2) << "\n" << zs.str();
  } else {
    emit(c.out, "zeros.csv", zs.str());
    emit(c.out, "density.csv", ds.str());
    emit(c.out, "zeros.json", summary.dump(2) + "\n");
  }
  return 0;
}

std::string sinogram_csv(const zcs::Sinogram& s) {
  std::ostringstream os;
  zcs::write_sinogram_csv(os, s);
  return os.str();
}

int cmd_sinogram(const std::string& bundle, const Common& c) {
  if (!bundle.empty()) {
    const zcs::RecoverResult r = zcs::run_recover(bundle);
    emit(c.out, "sinogram_estimated.csv", sinogram_csv(r.sinogram));
    return 0;
  }
  const zcs::ExperimentConfig cfg = resolve_config(c);
  const zcs::Medium medium = zcs::make_phantom(cfg.phantom);
  const zcs::Sinogram s = zcs::xray_forward(medium, cfg.geometry.n_dirs, cfg.geometry.n_offsets);
  emit(c.out, "sinogram.csv", sinogram_csv(s));
  return 0;
}

int cmd_reconstruct(const std::string& sino, int grid_n, double radius, const Common& c) {
  if (sino.empty()) throw zcs::PreconditionError("reconstruct: --sinogram is required");
  zcs::ReconOptions opts;
  if (c.method) opts.method = zcs::recon_method_from_string(*c.method);
  if (c.sweeps) opts.sweeps = *c.sweeps;
  if (c.relax) opts.relax = *c.relax;
  if (c.seed) opts.seed = *c.seed;
  const zcs::Sinogram s = zcs::read_sinogram_csv(sino, radius);
  const zcs::Reconstruction r = zcs::reconstruct(s, grid_n, opts);
  std::ostringstream os;
  zcs::write_reconstruction_csv(os, r);
  emit(c.out, "reconstruction.csv", os.str());
  std::cerr << "residual " << r.residual_history.front() << " -> " << r.residual_history.back()
            << " after " << r.iterations << " sweeps\n";
  return 0;
}

int cmd_uniq(const std::string& a, const std::string& b, const Common& c) {
  const zcs::UniquenessReport r = zcs::uniqueness_test(zcs::load_config(a), zcs::load_config(b));
  emit(c.out, "uniqueness.json", json(r).dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zcs: travel-time tomography from phaseless scattering data"};
  app.require_subcommand(1);
  Common common;
  ZerosArgs zargs;
  std::string bundle, sinogram, config_b;
  int grid_n = 64;
  double radius = 1.0;

  auto* fwd = app.add_subcommand("forward", "synthesize phaseless data into a bundle");
  fwd->add_option("--config", common.config, "experiment JSON");
  fwd->add_option("--out", common.out, "bundle directory")->required();
  fwd->add_option("--tail-seed", common.tail_seed, "seed of the tail phase");
  fwd->add_option("--sweep-tol", common.sweep_tol, "fast-sweeping residual tolerance");
  fwd->add_option("--eikonal-order", common.eikonal_order, "1 (upwind) or 3 (WENO)");

  auto* rec = app.add_subcommand("recover", "estimate travel times and reconstruct from a bundle");
  rec->add_option("--bundle", bundle, "bundle directory")->required();
  rec->add_option("--out", common.out, "output directory");

  auto* zer = app.add_subcommand("zeros", "count zeros of a two-term exponential sum");
  zer->add_option("--amp", zargs.amp, "amplitude A");
  zer->add_option("--tau", zargs.tau, "travel-time perturbation");
  zer->add_option("--phase-inc", zargs.phase_inc, "incident phase x.nu");
  zer->add_option("--alpha", zargs.alpha, "left edge of the rectangle");
  zer->add_option("--s", zargs.s, "width of the rectangle");
  zer->add_option("--h-lo", zargs.h_lo, "lower imaginary edge (default -K)");
  zer->add_option("--h-hi", zargs.h_hi, "upper imaginary edge (default K)");
  zer->add_option("--sector", zargs.sector, "half-angle of the density sector");
  zer->add_option("--out", common.out, "output directory");

  auto* sng = app.add_subcommand("sinogram", "straight-ray sinogram of a phantom or a bundle");
  sng->add_option("--config", common.config, "experiment JSON (oracle sinogram)");
  sng->add_option("--bundle", bundle, "bundle directory (estimated sinogram)");
  sng->add_option("--out", common.out, "output directory");

  auto* rcn = app.add_subcommand("reconstruct", "reconstruct beta from a sinogram CSV");
  rcn->add_option("--sinogram", sinogram, "sinogram CSV")->required();
  rcn->add_option("--grid-n", grid_n, "nodes per axis");
  rcn->add_option("--radius", radius, "support radius R");
  rcn->add_option("--out", common.out, "output directory");
  add_solver_flags(rcn, common);

  auto* unq = app.add_subcommand("uniq", "compare two experiments");
  unq->add_option("--config", common.config, "first experiment JSON")->required();
  unq->add_option("--config-b", config_b, "second experiment JSON")->required();
  unq->add_option("--out", common.out, "output directory");

  for (auto* sub : {fwd, sng}) add_solver_flags(sub, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*fwd) return cmd_forward(common);
    if (*rec) return cmd_recover(bundle, common);
    if (*zer) return cmd_zeros(zargs, common);
    if (*sng) return cmd_sinogram(bundle, common);
    if (*rcn) return cmd_reconstruct(sinogram, grid_n, radius, common);
    if (*unq) return cmd_uniq(common.config, config_b, common);
  } catch (const zcs::PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const zcs::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
