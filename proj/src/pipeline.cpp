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

#include "zcs/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "zcs/error.hpp"
#include "zcs/io.hpp"
#include "zcs/parallel.hpp"

namespace zcs {

namespace fs = std::filesystem;
using nlohmann::json;

void ExperimentConfig::validate() const {
  if (phantom.dim != 2) throw PreconditionError("config: the pipeline runs on 2D media");
  if (geometry.n_dirs < 1 || geometry.n_offsets < 1)
    throw PreconditionError("config: n_dirs and n_offsets must be >= 1");
  if (geometry.B > 0.0 && geometry.B < phantom.radius_R)
    throw PreconditionError("config: B must be >= R");
  if (!(signal.k_min > 0.0) || !(signal.k_max > signal.k_min))
    throw PreconditionError("config: need 0 < k_min < k_max");
  if (signal.N_k < 64) throw PreconditionError("config: N_k must be >= 64");
  if (!(signal.tail_c >= 0.0)) throw PreconditionError("config: tail_c must be >= 0");
  if (solver.sweeps < 1) throw PreconditionError("config: sweeps must be >= 1");
  if (!(solver.relax > 0.0 && solver.relax < 2.0))
    throw PreconditionError("config: relax must lie in (0, 2)");
  if (tolerances.eq_tol < 0.0) throw PreconditionError("config: eq_tol must be > 0");
  if (!(sweep_tol > 0.0)) throw PreconditionError("config: sweep_tol must be > 0");
  if (eikonal_order != 1 && eikonal_order != 3)
    throw PreconditionError("config: eikonal_order must be 1 or 3");
}

double ExperimentConfig::resolved_B(const Grid& grid) const {
  return geometry.B > 0.0 ? geometry.B : phantom.radius_R + 2.0 * grid.spacing();
}

void to_json(json& j, const ExperimentConfig& c) {
  j = json{{"phantom", c.phantom},
           {"geometry", {{"n_dirs", c.geometry.n_dirs},
                         {"n_offsets", c.geometry.n_offsets},
                         {"B", c.geometry.B}}},
           {"signal", {{"k_min", c.signal.k_min},
                       {"k_max", c.signal.k_max},
                       {"N_k", c.signal.N_k},
                       {"tail_c", c.signal.tail_c},
                       {"seed", c.signal.seed}}},
           {"solver", {{"method", to_string(c.solver.method)},
                       {"sweeps", c.solver.sweeps},
                       {"relax", c.solver.relax},
                       {"grid_n", c.solver.grid_n},
                       {"seed", c.solver.seed}}},
           {"tolerances", {{"eq_tol", c.tolerances.eq_tol},
                           {"tau_tol", c.tolerances.tau_tol},
                           {"solver_floor", c.tolerances.solver_floor}}},
           {"sweep_tol", c.sweep_tol},
           {"eikonal_order", c.eikonal_order}};
}

void from_json(const json& j, ExperimentConfig& c) {
  try {
    c = ExperimentConfig{};
    if (j.contains("phantom")) c.phantom = j.at("phantom").get<PhantomDescriptor>();
    if (j.contains("geometry")) {
      const auto& g = j.at("geometry");
      c.geometry.n_dirs = g.value("n_dirs", c.geometry.n_dirs);
      c.geometry.n_offsets = g.value("n_offsets", c.geometry.n_offsets);
      c.geometry.B = g.value("B", c.geometry.B);
    }
    if (j.contains("signal")) {
      const auto& s = j.at("signal");
      c.signal.k_min = s.value("k_min", c.signal.k_min);
      c.signal.k_max = s.value("k_max", c.signal.k_max);
      c.signal.N_k = s.value("N_k", c.signal.N_k);
      c.signal.tail_c = s.value("tail_c", c.signal.tail_c);
      c.signal.seed = s.value("seed", c.signal.seed);
    }
    if (j.contains("solver")) {
      const auto& s = j.at("solver");
      c.solver.method = recon_method_from_string(s.value("method", to_string(c.solver.method)));
      c.solver.sweeps = s.value("sweeps", c.solver.sweeps);
      c.solver.relax = s.value("relax", c.solver.relax);
      c.solver.grid_n = s.value("grid_n", c.solver.grid_n);
      c.solver.seed = s.value("seed", c.solver.seed);
    }
    if (j.contains("tolerances")) {
      const auto& t = j.at("tolerances");
      c.tolerances.eq_tol = t.value("eq_tol", c.tolerances.eq_tol);
      c.tolerances.tau_tol = t.value("tau_tol", c.tolerances.tau_tol);
      c.tolerances.solver_floor = t.value("solver_floor", c.tolerances.solver_floor);
    }
    c.sweep_tol = j.value("sweep_tol", c.sweep_tol);
    c.eikonal_order = j.value("eikonal_order", c.eikonal_order);
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config(const fs::path& path) {
  json j;
  try {
    j = json::parse(io::read_file(path));
  } catch (const json::exception& e) {
    throw PreconditionError("config " + path.string() + ": " + e.what());
  }
  ExperimentConfig c = j.get<ExperimentConfig>();
  c.validate();
  return c;
}

namespace {

std::string chord_label(const ChordTruth& c) {
  return "chord (angle " + io::format_double(c.angle) + ", offset " + io::format_double(c.offset) +
         ")";
}

std::uint64_t chord_seed(std::uint64_t seed, std::size_t idx) {
  return seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(idx);
}

}  // namespace

ForwardData synthesize(const ExperimentConfig& config) {
  config.validate();
  ForwardData data{make_phantom(config.phantom), {}, {}};
  const Medium& medium = data.medium;
  const auto& gp = config.geometry;
  const double R = medium.radius();
  const double B = config.resolved_B(medium.grid());
  const std::size_t total = static_cast<std::size_t>(gp.n_dirs) * gp.n_offsets;
  data.chords.resize(total);

  EikonalOptions eik;
  eik.sweep_tol = config.sweep_tol;
  eik.order = config.eikonal_order;
  eik.B = B;
  parallel_for(static_cast<std::size_t>(gp.n_dirs), [&](std::size_t i) {
    const double angle = sinogram_angle(static_cast<int>(i), gp.n_dirs);
    const Point nu{std::cos(angle), std::sin(angle), 0.0};
    const TravelTimeField field = solve_eikonal(medium, nu, eik);
    for (int j = 0; j < gp.n_offsets; ++j) {
      const double offset = sinogram_offset(j, gp.n_offsets, R);
      const Geometry geo = Geometry::parallel_beam(angle, offset, R, B);
      const double inc = dot(geo.x_obs, geo.nu);
      // First arrivals cannot beat the unperturbed plane wave; a lead at
      // round-off level is no perturbation.
      double phi = std::max(field.phi_at(geo.x_obs), inc);
      if (phi - inc <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(phi)))
        phi = inc;
      ChordTruth& c = data.chords[i * gp.n_offsets + j];
      c.angle = angle;
      c.offset = offset;
      c.model = TwoTermModel::make(amplitude(medium, field, geo), phi, inc);
      c.tau_linear = linearized_travel_time(medium, geo);
    }
  });

  const auto& sp = config.signal;
  const auto widest = std::max_element(data.chords.begin(), data.chords.end(),
                                       [](const auto& a, const auto& b) {
                                         return a.model.tau() < b.model.tau();
                                       });
  const double dips = (sp.k_max - sp.k_min) * widest->model.tau() / (2.0 * std::numbers::pi);
  if (widest->model.tau() > 0.0 && dips < 5.0)
    throw PreconditionError("forward: k window covers " + std::to_string(dips) +
                            " dips (< 5) at " + chord_label(*widest));

  data.signals.resize(total);
  parallel_for(total, [&](std::size_t idx) {
    const ChordTruth& c = data.chords[idx];
    data.signals[idx] = ChordSignal{
        c.angle, c.offset,
        synth_phaseless(c.model, sp.k_min, sp.k_max, sp.N_k, sp.tail_c, chord_seed(sp.seed, idx))};
  });
  return data;
}

namespace {

constexpr const char* kBundleFormat = "zcs-bundle-1";

std::string chords_csv(const ForwardData& d) {
  std::ostringstream os;
  os << "chord,angle,offset,amp_A,phase_phi,phase_inc,tau,tau_linear\n";
  for (std::size_t i = 0; i < d.chords.size(); ++i) {
    const auto& c = d.chords[i];
    os << i << ',' << io::format_double(c.angle) << ',' << io::format_double(c.offset) << ','
       << io::format_double(c.model.amp_A) << ',' << io::format_double(c.model.phase_phi) << ','
       << io::format_double(c.model.phase_inc) << ',' << io::format_double(c.model.tau()) << ','
       << io::format_double(c.tau_linear) << '\n';
  }
  return os.str();
}

std::string signals_csv(const ForwardData& d) {
  std::ostringstream os;
  const std::size_t n = d.signals.empty() ? 0 : d.signals.front().signal.size();
  os << "chord";
  for (std::size_t k = 0; k < n; ++k) os << ",f" << k;
  os << '\n';
  for (std::size_t i = 0; i < d.signals.size(); ++i) {
    os << i;
    for (const double v : d.signals[i].signal.values) os << ',' << io::format_double(v);
    os << '\n';
  }
  return os.str();
}

Sinogram sinogram_of(const ForwardData& d, int n_dirs, int n_offsets, bool linear) {
  Sinogram s;
  s.n_dirs = n_dirs;
  s.n_offsets = n_offsets;
  s.radius_R = d.medium.radius();
  for (const auto& c : d.chords)
    s.records.push_back({c.angle, c.offset, linear ? c.tau_linear : c.model.tau(), 1.0});
  return s;
}

std::string to_csv(const Sinogram& s) {
  std::ostringstream os;
  write_sinogram_csv(os, s);
  return os.str();
}

}  // namespace

ForwardData run_forward(const ExperimentConfig& config, const fs::path& out_dir) {
  ForwardData data = synthesize(config);
  fs::create_directories(out_dir);
  std::vector<std::pair<std::string, std::string>> files;
  {
    std::ostringstream os;
    write_grid_csv(os, data.medium.grid(), data.medium.beta(), "beta");
    files.emplace_back("medium.csv", os.str());
  }
  files.emplace_back("chords.csv", chords_csv(data));
  files.emplace_back("signals.csv", signals_csv(data));
  files.emplace_back("sinogram.csv",
                     to_csv(sinogram_of(data, config.geometry.n_dirs, config.geometry.n_offsets, true)));
  files.emplace_back("travel_times.csv",
                     to_csv(sinogram_of(data, config.geometry.n_dirs, config.geometry.n_offsets, false)));

  json manifest{{"format", kBundleFormat}, {"config", config}, {"files", json::object()}};
  for (const auto& [name, content] : files) {
    io::write_file(out_dir / name, content);
    manifest["files"][name] = io::sha256_hex(content);
  }
  io::write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
  return data;
}

Reconstruction recover_from_signals(const ExperimentConfig& config,
                                    const std::vector<ChordSignal>& signals, Sinogram* estimated) {
  Sinogram s = sinogram_from_signals(signals, config.geometry.n_dirs, config.geometry.n_offsets,
                                     config.phantom.radius_R);
  ReconOptions opts{config.solver.method, config.solver.sweeps, config.solver.relax,
                    config.solver.seed};
  Reconstruction rec = reconstruct(s, config.solver.grid_n, opts);
  if (config.phantom.dim == 2) {
    PhantomDescriptor truth = config.phantom;
    truth.grid_n = config.solver.grid_n;
    rec.rel_l2_error = relative_l2(rec.beta_hat, make_phantom(truth).beta());
  }
  if (estimated) *estimated = std::move(s);
  return rec;
}

RecoverResult run_recover(const fs::path& bundle_dir, const fs::path& out_dir) {
  json manifest;
  try {
    manifest = json::parse(io::read_file(bundle_dir / "manifest.json"));
  } catch (const json::exception& e) {
    throw IntegrityError(std::string("bundle manifest: ") + e.what());
  }
  if (manifest.value("format", "") != kBundleFormat)
    throw IntegrityError("bundle manifest: unknown format");
  for (const auto& [name, hash] : manifest.at("files").items()) {
    if (io::sha256_hex(io::read_file(bundle_dir / name)) != hash.get<std::string>())
      throw IntegrityError("bundle: content hash mismatch for " + name);
  }
  RecoverResult out;
  out.config = manifest.at("config").get<ExperimentConfig>();
  out.config.validate();
  const ExperimentConfig& cfg = out.config;

  const io::CsvTable chords = io::read_csv(bundle_dir / "chords.csv");
  const io::CsvTable sig = io::read_csv(bundle_dir / "signals.csv");
  if (chords.rows.size() != sig.rows.size())
    throw IntegrityError("bundle: chords.csv and signals.csv disagree in length");
  const std::size_t ca = chords.column("angle"), co = chords.column("offset");
  const std::size_t ctau = chords.column("tau_linear");
  std::vector<ChordSignal> signals(sig.rows.size());
  for (std::size_t i = 0; i < sig.rows.size(); ++i) {
    ChordSignal& cs = signals[i];
    cs.angle = chords.rows[i][ca];
    cs.offset = chords.rows[i][co];
    cs.signal.k_min = cfg.signal.k_min;
    cs.signal.k_max = cfg.signal.k_max;
    cs.signal.tail_c = cfg.signal.tail_c;
    cs.signal.values.assign(sig.rows[i].begin() + 1, sig.rows[i].end());
  }
  out.reconstruction = recover_from_signals(cfg, signals, &out.sinogram);

  double max_tau = 0.0, max_err = 0.0;
  int low = 0;
  for (std::size_t i = 0; i < out.sinogram.records.size(); ++i) {
    const auto& r = out.sinogram.records[i];
    max_tau = std::max(max_tau, chords.rows[i][ctau]);
    max_err = std::max(max_err, std::abs(r.tau - chords.rows[i][ctau]));
    if (r.weight < 0.75) ++low;
  }
  const Reconstruction& rec = out.reconstruction;
  out.report = json{{"rel_l2_error", rec.rel_l2_error ? json(*rec.rel_l2_error) : json(nullptr)},
                    {"method", to_string(cfg.solver.method)},
                    {"iterations", rec.iterations},
                    {"residual_history", rec.residual_history},
                    {"max_tau_oracle", max_tau},
                    {"max_abs_tau_error_vs_oracle", max_err},
                    {"downweighted_chords", low}};
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    io::write_file(out_dir / "sinogram_estimated.csv", to_csv(out.sinogram));
    std::ostringstream os;
    write_reconstruction_csv(os, rec);
    io::write_file(out_dir / "reconstruction.csv", os.str());
    io::write_file(out_dir / "report.json", out.report.dump(2) + "\n");
  }
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::indistinguishable_data_identical_media:
      return "indistinguishable_data_identical_media";
    case Verdict::distinguishable_data: return "distinguishable_data";
    case Verdict::inconsistent: return "inconsistent";
  }
  return "inconsistent";
}

void to_json(json& j, const UniquenessReport& r) {
  j = json{{"data_equal", r.data_equal},
           {"eq_tol", r.eq_tol},
           {"max_f_discrepancy", r.max_f_discrepancy},
           {"central_f_discrepancy", r.central_f_discrepancy},
           {"tau_discrepancy", r.tau_discrepancy},
           {"recon_discrepancy", r.recon_discrepancy},
           {"recon_linf", r.recon_linf},
           {"verdict", to_string(r.verdict)}};
}

UniquenessReport uniqueness_test(const ExperimentConfig& a, const ExperimentConfig& b) {
  const auto& ga = a.geometry;
  const auto& gb = b.geometry;
  const auto& sa = a.signal;
  const auto& sb = b.signal;
  const auto& va = a.solver;
  const auto& vb = b.solver;
  if (ga.n_dirs != gb.n_dirs || ga.n_offsets != gb.n_offsets || ga.B != gb.B ||
      a.phantom.radius_R != b.phantom.radius_R || a.phantom.dim != b.phantom.dim)
    throw PreconditionError("uniqueness_test: geometry protocols differ");
  if (sa.k_min != sb.k_min || sa.k_max != sb.k_max || sa.N_k != sb.N_k || sa.tail_c != sb.tail_c)
    throw PreconditionError("uniqueness_test: signal protocols differ");
  if (va.method != vb.method || va.sweeps != vb.sweeps || va.relax != vb.relax ||
      va.grid_n != vb.grid_n)
    throw PreconditionError("uniqueness_test: solver protocols differ");

  const ForwardData da = synthesize(a);
  const ForwardData db = synthesize(b);
  UniquenessReport r;
  double max_f = 0.0;
  const std::size_t central = static_cast<std::size_t>(ga.n_offsets / 2);
  for (std::size_t i = 0; i < da.signals.size(); ++i) {
    const auto& fa = da.signals[i].signal.values;
    const auto& fb = db.signals[i].signal.values;
    double chord_max = 0.0;
    for (std::size_t k = 0; k < fa.size(); ++k) {
      chord_max = std::max(chord_max, std::abs(fa[k] - fb[k]));
      max_f = std::max({max_f, fa[k], fb[k]});
    }
    r.max_f_discrepancy = std::max(r.max_f_discrepancy, chord_max);
    if (i == central) r.central_f_discrepancy = chord_max;
  }
  r.eq_tol = a.tolerances.eq_tol > 0.0 ? a.tolerances.eq_tol
                                       : (sa.tail_c > 0.0 ? 1e-3 : 1e-12) * max_f;
  r.data_equal = r.max_f_discrepancy <= r.eq_tol;

  Sinogram est_a, est_b;
  const Reconstruction ra = recover_from_signals(a, da.signals, &est_a);
  // One reconstruction operator for both data sets: a row-order seed is not
  // part of the medium.
  ExperimentConfig b_solved = b;
  b_solved.solver = va;
  const Reconstruction rb = recover_from_signals(b_solved, db.signals, &est_b);
  double max_tau = 0.0;
  for (std::size_t i = 0; i < est_a.records.size(); ++i) {
    r.tau_discrepancy =
        std::max(r.tau_discrepancy, std::abs(est_a.records[i].tau - est_b.records[i].tau));
    max_tau = std::max({max_tau, est_a.records[i].tau, est_b.records[i].tau});
  }
  const MediaComparison cmp = compare_media(ra, rb);
  r.recon_discrepancy = cmp.rel_l2_diff;
  r.recon_linf = cmp.linf_diff;

  if (!r.data_equal) {
    r.verdict = Verdict::distinguishable_data;
  } else if (r.tau_discrepancy <= a.tolerances.tau_tol * max_tau &&
             r.recon_discrepancy <= a.tolerances.solver_floor) {
    r.verdict = Verdict::indistinguishable_data_identical_media;
  } else {
    r.verdict = Verdict::inconsistent;
  }
  return r;
}

}  // namespace zcs
