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

#include "zcs/tomo.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <set>

#include "zcs/error.hpp"
#include "zcs/io.hpp"
#include "zcs/kernels.hpp"
#include "zcs/parallel.hpp"

namespace zcs {

double sinogram_angle(int i, int n_dirs) { return std::numbers::pi * i / n_dirs; }

double sinogram_offset(int j, int n_offsets, double radius_R) {
  return -radius_R + (j + 0.5) * 2.0 * radius_R / n_offsets;
}

Geometry Sinogram::geometry(std::size_t i, double B) const {
  const auto& r = records.at(i);
  return Geometry::parallel_beam(r.angle, r.offset, radius_R, B);
}

Sinogram xray_forward(const Medium& medium, int n_dirs, int n_offsets) {
  if (n_dirs < 1 || n_offsets < 1)
    throw PreconditionError("xray_forward: need n_dirs >= 1 and n_offsets >= 1");
  if (medium.dim() != 2) throw PreconditionError("xray_forward: 2D media only");
  Sinogram s;
  s.n_dirs = n_dirs;
  s.n_offsets = n_offsets;
  s.radius_R = medium.radius();
  s.records.resize(static_cast<std::size_t>(n_dirs) * n_offsets);
  const double B = medium.radius() + 2.0 * medium.spacing();
  parallel_for(s.records.size(), [&](std::size_t idx) {
    const int i = static_cast<int>(idx) / n_offsets, j = static_cast<int>(idx) % n_offsets;
    SinogramRecord rec{sinogram_angle(i, n_dirs), sinogram_offset(j, n_offsets, s.radius_R), 0.0,
                       1.0};
    rec.tau = linearized_travel_time(medium,
                                     Geometry::parallel_beam(rec.angle, rec.offset, s.radius_R, B));
    s.records[idx] = rec;
  });
  return s;
}

namespace {

std::string chord_name(double angle, double offset) {
  return "chord (angle " + io::format_double(angle) + ", offset " + io::format_double(offset) +
         ")";
}

}  // namespace

Sinogram sinogram_from_signals(const std::vector<ChordSignal>& signals, int n_dirs, int n_offsets,
                               double radius_R, const TauOptions& opts) {
  Sinogram s;
  s.n_dirs = n_dirs;
  s.n_offsets = n_offsets;
  s.radius_R = radius_R;
  s.records.resize(signals.size());
  parallel_for(signals.size(), [&](std::size_t i) {
    const ChordSignal& cs = signals[i];
    TauEstimate est;
    try {
      est = estimate_tau(cs.signal, opts);
    } catch (const AmbiguityError& e) {
      throw AmbiguityError(chord_name(cs.angle, cs.offset) + ": " + e.what());
    } catch (const PreconditionError& e) {
      throw PreconditionError(chord_name(cs.angle, cs.offset) + ": " + e.what());
    }
    double weight = 1.0 - 0.9 * std::min(1.0, est.method_agreement / opts.max_disagreement);
    double tau = est.tau_hat;
    if (est.low_confidence && !est.constant) {
      // Too few periods for the scale-free estimators; fall back to the
      // unit-intensity model, up to the tau that min_dips + 1 periods imply.
      const double span = cs.signal.k_max - cs.signal.k_min;
      tau = fit_two_term_unit(cs.signal, 2.0 * std::numbers::pi * (opts.min_dips + 1) / span).tau;
      weight *= 0.5;
    } else if (est.low_confidence) {
      weight *= 0.5;
    }
    s.records[i] = SinogramRecord{cs.angle, cs.offset, std::max(0.0, tau), weight};
  });
  return s;
}

void write_sinogram_csv(std::ostream& os, const Sinogram& s) {
  os << "angle,offset,tau,weight\n";
  for (const auto& r : s.records)
    os << io::format_double(r.angle) << ',' << io::format_double(r.offset) << ','
       << io::format_double(r.tau) << ',' << io::format_double(r.weight) << '\n';
}

Sinogram read_sinogram_csv(const std::string& path, double radius_R) {
  const io::CsvTable t = io::read_csv(path);
  const std::size_t ca = t.column("angle"), co = t.column("offset"), ct = t.column("tau"),
                    cw = t.column("weight");
  Sinogram s;
  s.radius_R = radius_R;
  std::set<double> angles, offsets;
  for (const auto& row : t.rows) {
    SinogramRecord r{row[ca], row[co], row[ct], row[cw]};
    if (!(r.tau >= 0.0)) throw PreconditionError("sinogram: negative tau in " + path);
    if (!(r.weight > 0.0 && r.weight <= 1.0))
      throw PreconditionError("sinogram: weight outside (0, 1] in " + path);
    if (!(std::abs(r.offset) < radius_R))
      throw PreconditionError("sinogram: offset outside (-R, R) in " + path);
    angles.insert(r.angle);
    offsets.insert(r.offset);
    s.records.push_back(r);
  }
  s.n_dirs = static_cast<int>(angles.size());
  s.n_offsets = static_cast<int>(offsets.size());
  return s;
}

void SystemMatrix::apply(std::span<const double> b, std::span<double> t) const {
  for (int i = 0; i < rows; ++i) {
    const std::size_t lo = row_ptr[i], hi = row_ptr[i + 1];
    t[i] = kernels::gather_dot(std::span(val).subspan(lo, hi - lo),
                               std::span(col).subspan(lo, hi - lo), b);
  }
}

void SystemMatrix::apply_transpose(std::span<const double> t, std::span<double> b) const {
  std::fill(b.begin(), b.end(), 0.0);
  for (int i = 0; i < rows; ++i) {
    const std::size_t lo = row_ptr[i], hi = row_ptr[i + 1];
    kernels::scatter_axpy(t[i], std::span(val).subspan(lo, hi - lo),
                          std::span(col).subspan(lo, hi - lo), b);
  }
}

SystemMatrix build_system_matrix(const Grid& grid, const Sinogram& sinogram) {
  if (grid.dim() != 2) throw PreconditionError("system matrix: 2D grids only");
  const double B = sinogram.radius_R + 2.0 * grid.spacing();
  const std::size_t n_rows = sinogram.records.size();
  std::vector<std::vector<std::pair<std::int32_t, double>>> rows(n_rows);
  parallel_for(n_rows, [&](std::size_t i) {
    const Chord chord = chord_for(sinogram.geometry(i, B));
    std::map<std::int32_t, double> acc;
    for (const auto& q : chord_quadrature(chord, grid.spacing())) {
      const Stencil st = interpolation_stencil(grid, q.p);
      for (int c = 0; c < st.count; ++c)
        if (st.weight[c] != 0.0) acc[static_cast<std::int32_t>(st.index[c])] += q.w * st.weight[c];
    }
    rows[i].assign(acc.begin(), acc.end());
  });
  SystemMatrix m;
  m.rows = static_cast<int>(n_rows);
  m.cols = static_cast<int>(grid.size());
  m.row_ptr.assign(1, 0);
  for (const auto& r : rows) {
    for (const auto& [c, v] : r) {
      m.col.push_back(c);
      m.val.push_back(v);
    }
    m.row_ptr.push_back(m.col.size());
  }
  return m;
}

std::string to_string(ReconMethod m) { return m == ReconMethod::cgls ? "cgls" : "kaczmarz"; }

ReconMethod recon_method_from_string(const std::string& s) {
  if (s == "kaczmarz") return ReconMethod::kaczmarz;
  if (s == "cgls") return ReconMethod::cgls;
  throw PreconditionError("unknown reconstruction method '" + s + "'");
}

namespace {

void project(const Grid& grid, std::span<double> b) {
  const double R = grid.radius();
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i] < 0.0 || norm(grid.node(i)) >= R) b[i] = 0.0;
  }
}

double residual_norm(const SystemMatrix& m, std::span<const double> b,
                     const std::vector<double>& t, std::vector<double>& scratch) {
  m.apply(b, scratch);
  double s = 0.0;
  for (int i = 0; i < m.rows; ++i) {
    const double r = scratch[i] - t[i];
    s += r * r;
  }
  return std::sqrt(s);
}

// Fisher-Yates with an explicit bounded draw so the order is identical on
// every standard library.
void shuffle(std::vector<int>& order, std::mt19937_64& rng) {
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = rng() % i;
    std::swap(order[i - 1], order[j]);
  }
}

void check_divergence(const Reconstruction& r) {
  if (r.residual_history.back() > 10.0 * r.residual_history.front() &&
      r.residual_history.front() > 0.0)
    throw NumericalError("reconstruct: residual grew beyond 10x its initial value");
}

}  // namespace

Reconstruction reconstruct(const Sinogram& sinogram, int grid_n, const ReconOptions& opts) {
  if (sinogram.records.empty()) throw PreconditionError("reconstruct: empty sinogram");
  if (opts.sweeps < 0) throw PreconditionError("reconstruct: sweeps must be >= 0");
  if (!(opts.relax > 0.0 && opts.relax < 2.0))
    throw PreconditionError("reconstruct: relax must lie in (0, 2)");
  Reconstruction rec;
  rec.grid = Grid(2, sinogram.radius_R, grid_n);
  const SystemMatrix m = build_system_matrix(rec.grid, sinogram);
  const std::size_t n = rec.grid.size();
  std::vector<double> t(m.rows), w(m.rows), scratch(m.rows);
  for (int i = 0; i < m.rows; ++i) {
    t[i] = sinogram.records[i].tau;
    w[i] = sinogram.records[i].weight;
  }
  auto& b = rec.beta_hat;
  b.assign(n, 0.0);
  rec.residual_history.push_back(residual_norm(m, b, t, scratch));

  if (opts.method == ReconMethod::kaczmarz) {
    std::vector<double> row_norm2(m.rows);
    for (int i = 0; i < m.rows; ++i) {
      const std::size_t lo = m.row_ptr[i], hi = m.row_ptr[i + 1];
      const auto v = std::span(m.val).subspan(lo, hi - lo);
      row_norm2[i] = kernels::dot(v, v);
    }
    std::vector<int> order(m.rows);
    for (int i = 0; i < m.rows; ++i) order[i] = i;
    std::mt19937_64 rng(opts.seed);
    for (int sweep = 0; sweep < opts.sweeps; ++sweep) {
      shuffle(order, rng);
      for (const int i : order) {
        if (row_norm2[i] == 0.0) continue;
        const std::size_t lo = m.row_ptr[i], hi = m.row_ptr[i + 1];
        const auto v = std::span(m.val).subspan(lo, hi - lo);
        const auto c = std::span(m.col).subspan(lo, hi - lo);
        const double r = t[i] - kernels::gather_dot(v, c, b);
        kernels::scatter_axpy(opts.relax * w[i] * r / row_norm2[i], v, c, b);
      }
      project(rec.grid, b);
      rec.residual_history.push_back(residual_norm(m, b, t, scratch));
      rec.iterations = sweep + 1;
      check_divergence(rec);
    }
  } else {
    // CGLS on diag(sqrt w) M b = diag(sqrt w) t.
    std::vector<double> sw(m.rows);
    for (int i = 0; i < m.rows; ++i) sw[i] = std::sqrt(w[i]);
    std::vector<double> r(m.rows), q(m.rows), s(n), p(n);
    for (int i = 0; i < m.rows; ++i) r[i] = sw[i] * t[i];
    auto normal = [&](const std::vector<double>& rr, std::vector<double>& out) {
      for (int i = 0; i < m.rows; ++i) scratch[i] = sw[i] * rr[i];
      m.apply_transpose(scratch, out);
    };
    normal(r, s);
    p = s;
    double gamma = kernels::dot(s, s);
    std::vector<double> out(n);
    for (int it = 0; it < opts.sweeps && gamma > 0.0; ++it) {
      m.apply(p, q);
      for (int i = 0; i < m.rows; ++i) q[i] *= sw[i];
      const double qq = kernels::dot(q, q);
      if (qq == 0.0) break;
      const double alpha = gamma / qq;
      kernels::axpy(alpha, p, b);
      kernels::axpy(-alpha, q, r);
      normal(r, s);
      const double gamma_next = kernels::dot(s, s);
      const double beta = gamma_next / gamma;
      gamma = gamma_next;
      for (std::size_t k = 0; k < n; ++k) p[k] = s[k] + beta * p[k];
      out = b;
      project(rec.grid, out);
      rec.residual_history.push_back(residual_norm(m, out, t, scratch));
      rec.iterations = it + 1;
      check_divergence(rec);
    }
    project(rec.grid, b);
  }
  return rec;
}

double relative_l2(std::span<const double> estimate, std::span<const double> truth) {
  if (estimate.size() != truth.size()) throw PreconditionError("relative_l2: size mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    num += (estimate[i] - truth[i]) * (estimate[i] - truth[i]);
    den += truth[i] * truth[i];
  }
  if (den == 0.0) return std::sqrt(num);
  return std::sqrt(num / den);
}

MediaComparison compare_media(const Reconstruction& a, const Reconstruction& b) {
  if (!(a.grid == b.grid)) throw PreconditionError("compare_media: grid mismatch");
  MediaComparison c;
  double diff2 = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.beta_hat.size(); ++i) {
    const double d = a.beta_hat[i] - b.beta_hat[i];
    c.linf_diff = std::max(c.linf_diff, std::abs(d));
    diff2 += d * d;
    na += a.beta_hat[i] * a.beta_hat[i];
    nb += b.beta_hat[i] * b.beta_hat[i];
  }
  const double den = std::sqrt(std::max(na, nb));
  c.rel_l2_diff = den > 0.0 ? std::sqrt(diff2) / den : 0.0;
  return c;
}

void write_reconstruction_csv(std::ostream& os, const Reconstruction& r) {
  write_grid_csv(os, r.grid, r.beta_hat, "beta_hat");
}

}  // namespace zcs
