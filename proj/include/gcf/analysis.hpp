#pragma once

// Theorem-level diagnostics computed from trajectories and profiles:
// rescaled deviation from the profile, power-law rate fits, the gradient
// decay envelope, the psi-relative two-sided envelope constants, and
// central/radial symmetry defects.

#include <cmath>
#include <optional>
#include <unordered_map>
#include <vector>

#include "gcf/operators.hpp"
#include "gcf/profile.hpp"

namespace gcf {

enum class SymmetryMode { central, radial };

struct RateSample {
  double t = 0;
  double deviation_sup = 0;    // sup |(1+t)^gamma u - psi|
  double grad_sup = 0;         // sup |grad u|, interior nodes and boundary traces
  double symmetry_defect = 0;  // defect of the rescaled solution (1+t)^gamma u
  double sup_abs_u = 0;
  double G_current = 1;        // (1 + grad_sup^2)^(-alpha beta) of the current state
  double injected_mu = 0;      // cumulative convexification magnitude
  double ratio_min = 0;        // extrema of ((1+t)^gamma u - psi)/(-psi), |psi| >= h
  double ratio_max = 0;
};

struct RateSeries {
  std::vector<RateSample> samples;
  std::vector<ScalarField> fields;  // full snapshots when requested
  std::optional<std::pair<double, double>> fit;  // (C_fit, p_fit)
};

// --- interpolation helpers ----------------------------------------------

namespace detail {

inline double bilinear(const ScalarField& u, double px, double py) {
  const Domain& d = *u.dom;
  double fi = (px - d.xmin) / d.h, fj = (py - d.ymin) / d.h;
  int i = static_cast<int>(std::floor(fi)), j = static_cast<int>(std::floor(fj));
  i = std::clamp(i, 0, d.nx - 2);
  j = std::clamp(j, 0, d.ny - 2);
  const double sx = fi - i, sy = fj - j;
  const double v00 = u.at(i, j), v10 = u.at(i + 1, j);
  const double v01 = u.at(i, j + 1), v11 = u.at(i + 1, j + 1);
  return (1 - sx) * (1 - sy) * v00 + sx * (1 - sy) * v10 + (1 - sx) * sy * v01 + sx * sy * v11;
}

}  // namespace detail

// One-sided outward normal derivative at the boundary samples (second order,
// using the zero boundary value), maximized over the boundary.
inline double boundary_normal_sup(const ScalarField& u) {
  const Domain& d = *u.dom;
  double worst = 0.0;
  for (const BoundaryPoint& b : d.boundary) {
    const double v1 = detail::bilinear(u, b.x - d.h * b.nux, b.y - d.h * b.nuy);
    const double v2 = detail::bilinear(u, b.x - 2.0 * d.h * b.nux, b.y - 2.0 * d.h * b.nuy);
    worst = std::max(worst, std::abs((-4.0 * v1 + v2) / (2.0 * d.h)));
  }
  return worst;
}

// sup |grad u| over interior nodes and boundary traces; boundary traces
// dominate for convex u vanishing on the boundary.
inline double full_gradient_sup(const ScalarField& u) {
  return std::max(sup_interior_gradient(u), boundary_normal_sup(u));
}

// --- deviation from the profile ------------------------------------------

inline double deviation_sup(const ScalarField& u, const ScalarField& psi, const FlowParams& p) {
  require_same_domain(u, psi);
  const double scale = std::pow(1.0 + std::max(u.time, 0.0), p.gamma);
  double worst = 0.0;
  for (int node : u.dom->interior_nodes)
    worst = std::max(worst, std::abs(scale * u.v[node] - psi.v[node]));
  return worst;
}

inline double deviation_sup(const ScalarField& u, const ProfileSolution& psi,
                            const FlowParams& p) {
  return deviation_sup(u, psi.psi, p);
}

// Extrema of ((1+t)^gamma u - psi)/(-psi) over nodes with |psi| >= h; the
// near-boundary ring where psi -> 0 is excluded from the ratio.
inline std::pair<double, double> deviation_ratio_extrema(const ScalarField& u,
                                                         const ScalarField& psi,
                                                         const FlowParams& p) {
  require_same_domain(u, psi);
  const double scale = std::pow(1.0 + std::max(u.time, 0.0), p.gamma);
  const double cut = u.dom->h;
  double lo = 1e300, hi = -1e300;
  for (int node : u.dom->interior_nodes) {
    if (-psi.v[node] < cut) continue;
    const double r = (scale * u.v[node] - psi.v[node]) / (-psi.v[node]);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  if (lo > hi) { lo = 0.0; hi = 0.0; }
  return {lo, hi};
}

// --- rate fit --------------------------------------------------------------

// Least-squares fit of log(deviation) = log(C) - p*log(1+t) over the window.
inline std::pair<double, double> fit_rate(const RateSeries& series, double t_lo, double t_hi) {
  std::vector<std::pair<double, double>> pts;
  for (const RateSample& s : series.samples)
    if (s.t >= t_lo && s.t <= t_hi && s.deviation_sup > 0.0)
      pts.emplace_back(std::log1p(s.t), std::log(s.deviation_sup));
  if (pts.size() < 4)
    fail(ErrorCode::InsufficientSamples,
         "need >= 4 positive samples in the fit window, have " + std::to_string(pts.size()));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(pts.size());
  for (auto& [x, y] : pts) { sx += x; sy += y; sxx += x * x; sxy += x * y; }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double inter = (sy - slope * sx) / m;
  return {std::exp(inter), -slope};
}

// --- symmetry ---------------------------------------------------------------

inline double symmetry_defect(const ScalarField& u, SymmetryMode mode) {
  const Domain& d = *u.dom;
  if (mode == SymmetryMode::central) {
    if (!d.centrally_symmetric())
      fail(ErrorCode::AsymmetricDomain, "domain is not centrally symmetric");
    double worst = 0.0;
    for (int node : d.interior_nodes) {
      const int i = node % d.nx, j = node / d.nx;
      const int mnode = d.id(d.mirror_i(i), d.mirror_j(j));
      if (!d.interior[mnode])
        fail(ErrorCode::AsymmetricDomain, "interior mask is not centrally symmetric");
      worst = std::max(worst, std::abs(u.v[node] - u.v[mnode]));
    }
    return worst;
  }
  if (d.spec.kind != DomainKind::disc)
    fail(ErrorCode::AsymmetricDomain, "radial symmetry defect needs a disc");
  // Bin nodes by their exact squared grid radius i^2 + j^2. Every bin sits
  // at a single radius, so the radial trend contributes nothing and the
  // spread measures pure angular asymmetry; an h-wide annulus would floor
  // the defect at h*Lip(u) and mask the decay being measured.
  std::unordered_map<long long, std::pair<double, double>> bins;
  bins.reserve(d.interior_nodes.size());
  for (int node : d.interior_nodes) {
    const int i = (node % d.nx) - d.cx, j = (node / d.nx) - d.cy;
    const long long key = static_cast<long long>(i) * i + static_cast<long long>(j) * j;
    auto [it, fresh] = bins.try_emplace(key, std::make_pair(u.v[node], u.v[node]));
    if (!fresh) {
      it->second.first = std::min(it->second.first, u.v[node]);
      it->second.second = std::max(it->second.second, u.v[node]);
    }
  }
  double worst = 0.0;
  for (const auto& [key, mm] : bins) worst = std::max(worst, mm.second - mm.first);
  return worst;
}

// --- envelope checks --------------------------------------------------------

struct GradientEnvelopeRow {
  double t, grad_sup, bound, margin;
};

struct GradientEnvelopeReport {
  std::vector<GradientEnvelopeRow> rows;
  double min_margin = 1e300;   // >= 0 means the envelope holds everywhere
  bool envelope_ok = false;
  bool monotone_ok = false;    // grad_sup non-increasing up to relative slack
  double psi_nu_sup = 0.0;
};

// sup |grad u|(t) <= (1+slack) G^(1/(1-na)) sup psi_nu (C4+t)^(1/(1-na)),
// C4 = phi0_lower^(1-na); also checks the boundary gradient maximum
// principle (non-increase of grad_sup).
inline GradientEnvelopeReport gradient_envelope_check(const RateSeries& series,
                                                      const ProfileSolution& psi,
                                                      double G, const FlowParams& p,
                                                      double phi0_lower, double slack = 0.1) {
  GradientEnvelopeReport rep;
  rep.psi_nu_sup = boundary_normal_sup(psi.psi);
  const double e = 1.0 - p.n * p.alpha;
  const double c4 = std::pow(phi0_lower, e);
  const double gfac = std::pow(G, 1.0 / e);
  for (const RateSample& s : series.samples) {
    const double bound = (1.0 + slack) * gfac * rep.psi_nu_sup * std::pow(c4 + s.t, 1.0 / e);
    rep.rows.push_back({s.t, s.grad_sup, bound, bound - s.grad_sup});
    rep.min_margin = std::min(rep.min_margin, bound - s.grad_sup);
  }
  rep.envelope_ok = rep.min_margin >= 0.0;
  rep.monotone_ok = true;
  for (size_t k = 1; k < series.samples.size(); ++k)
    if (series.samples[k].grad_sup >
        series.samples[k - 1].grad_sup + 1e-3 * series.samples.front().grad_sup)
      rep.monotone_ok = false;
  return rep;
}

struct LowerEnvelopeRow {
  double t;
  double c2_t;     // smallest C2 making the lower side hold at this sample
  double c3_t;     // same for the upper side
  double offset;   // G_current^(1/(1-na)) - 1, the beta > 0 lower-side gap
};

struct LowerEnvelopeReport {
  std::vector<LowerEnvelopeRow> rows;
  double C2 = 0.0, C3 = 0.0;     // window suprema
  bool c2_stable = false, c3_stable = false;  // max/min ratio <= 3 where active
  bool offsets_monotone = false; // |offset| non-increasing across samples
};

// psi-relative form of the two-sided envelope: with rho = ((1+t)^g u - psi)/(-psi),
//   -(G^(1/(1-na)) - 1) - C2/(1+t) <= rho <= C3/(1+t).
inline LowerEnvelopeReport lower_envelope_check(const RateSeries& series,
                                                const ProfileSolution&, const FlowParams& p,
                                                double G) {
  LowerEnvelopeReport rep;
  const double e = 1.0 - p.n * p.alpha;
  const double gp = std::pow(G, 1.0 / e) - 1.0;  // >= 0
  std::vector<double> c2s, c3s;
  for (const RateSample& s : series.samples) {
    const double c3 = (1.0 + s.t) * std::max(s.ratio_max, 0.0);
    const double c2 = (1.0 + s.t) * std::max(-s.ratio_min - gp, 0.0);
    const double off = std::pow(s.G_current, 1.0 / e) - 1.0;
    rep.rows.push_back({s.t, c2, c3, off});
    rep.C2 = std::max(rep.C2, c2);
    rep.C3 = std::max(rep.C3, c3);
    if (c2 > 0) c2s.push_back(c2);
    if (c3 > 0) c3s.push_back(c3);
  }
  auto stable = [](const std::vector<double>& v) {
    if (v.size() < 2) return true;
    double lo = v[0], hi = v[0];
    for (double x : v) { lo = std::min(lo, x); hi = std::max(hi, x); }
    return hi <= 3.0 * lo;
  };
  rep.c2_stable = stable(c2s);
  rep.c3_stable = stable(c3s);
  rep.offsets_monotone = true;
  for (size_t k = 1; k < rep.rows.size(); ++k)
    if (std::abs(rep.rows[k].offset) > std::abs(rep.rows[k - 1].offset) + 1e-9)
      rep.offsets_monotone = false;
  return rep;
}

}  // namespace gcf
