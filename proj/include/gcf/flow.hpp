#pragma once

// Explicit time stepping for the parabolic flow
//     u_t = det(D^2 u)^alpha / (1 + |grad u|^2)^(alpha*beta)
// with zero boundary data, plus the self-similar sub/supersolution envelopes
// it is compared against.
//
// The step is forward Euler with an adaptive CFL dt taken over interior
// nodes with full stencils; nodes whose arms are cut by the boundary are
// much stiffer and get a diagonally stabilized (monotone, unconditionally
// stable) update instead of throttling the global step.

#include <algorithm>
#include <cmath>
#include <vector>

#include "gcf/analysis.hpp"
#include "gcf/operators.hpp"
#include "gcf/profile.hpp"

namespace gcf {

struct FlowOptions {
  OperatorOptions op;
  double cfl = 0.45;
  double dt_min = 1e-12;
  double dt_max = 0.05;
  double stab_threshold = 0.9;  // dt*L above this switches to the stabilized update
  double convexity_tol = 1e-3;
  double mu_cap = 1e-2;         // give up if one projection needs more than this
  const ProfileSolution* psi = nullptr;  // enables deviation/ratio diagnostics
  bool symmetry = false;
  SymmetryMode sym_mode = SymmetryMode::radial;
  bool record_fields = false;
};

struct EvolutionState {
  ScalarField u;
  double t = 0.0;
  long step_count = 0;
  double G = 1.0;          // inf (1+|grad u(.,0)|^2)^(-alpha beta), frozen
  double G_current = 1.0;
  double dt_last = 0.0;
  double injected_mu = 0.0;
};

inline double g_factor(const ScalarField& u, const FlowParams& p) {
  const double gs = full_gradient_sup(u);
  return std::pow(1.0 + gs * gs, -p.alpha * p.beta);
}

inline EvolutionState make_state(ScalarField u0, const FlowParams& p) {
  EvolutionState st;
  u0.time = 0.0;
  st.u = std::move(u0);
  st.G = g_factor(st.u, p);
  st.G_current = st.G;
  return st;
}

namespace detail {

struct StepWorkspace {
  ScalarField speed, diag;
  std::vector<std::uint8_t> core;
};

inline StepWorkspace make_step_workspace(const Domain& d, const OperatorOptions& op) {
  return {ScalarField(d), ScalarField(d), core_mask(d, op)};
}

// Smallest mu with convexity_defect(u + mu*q) <= tol/2, where q is the
// convex bump vanishing on the boundary. For disc and ellipse q is a fixed
// quadratic, so the discrete Hessian shift is exact and one shot suffices.
inline double convexify(ScalarField& u, const FlowParams&, const FlowOptions& opts,
                        double defect) {
  const Domain& d = *u.dom;
  double mu;
  if (d.spec.kind == DomainKind::superellipse) {
    mu = 0.0;
    double trial_mu = defect * d.spec.a * d.spec.a;
    for (int it = 0; it < 40; ++it, trial_mu *= 2.0) {
      ScalarField trial = u;
      for (int node : d.interior_nodes) {
        const int i = node % d.nx, j = node / d.nx;
        trial.v[node] += trial_mu * d.bowl(d.x(i), d.y(j));
      }
      if (convexity_defect(trial) <= 0.5 * opts.convexity_tol) {
        u = trial;
        mu = trial_mu;
        break;
      }
      if (trial_mu > opts.mu_cap)
        fail(ErrorCode::LostConvexity, "projection cannot restore convexity");
    }
    return mu;
  }
  const double ax = d.spec.a;
  const double ay = (d.spec.kind == DomainKind::disc) ? d.spec.a : d.spec.b;
  const double lmin_q = 2.0 / std::max(ax * ax, ay * ay);  // smallest Hessian eigenvalue of q
  mu = (defect - 0.25 * opts.convexity_tol) / lmin_q;
  if (mu > opts.mu_cap) fail(ErrorCode::LostConvexity, "projection needs mu > cap");
  for (int node : d.interior_nodes) {
    const int i = node % d.nx, j = node / d.nx;
    u.v[node] += mu * d.bowl(d.x(i), d.y(j));
  }
  return mu;
}

// One step; dt_limit caps dt so sample times are hit exactly.
inline void step_inplace(EvolutionState& st, const FlowParams& p, const FlowOptions& opts,
                         StepWorkspace& w, double dt_limit) {
  ScalarField& u = st.u;
  speed_and_diag(u, p, opts.op, w.speed, w.diag);
  double sup_core = 0.0;
  for (int node : u.dom->interior_nodes)
    if (w.core[node]) sup_core = std::max(sup_core, w.diag.v[node]);
  double dt = (sup_core > 0.0) ? opts.cfl / sup_core : opts.dt_max;
  dt = std::min({dt, opts.dt_max, dt_limit});
  if (dt < opts.dt_min) fail(ErrorCode::StabilityFailure, "dt underflow");

  for (int node : u.dom->interior_nodes) {
    double du = dt * w.speed.v[node];
    const double dl = dt * w.diag.v[node];
    if (dl > opts.stab_threshold) du = dt * w.speed.v[node] / (1.0 + dl);
    u.v[node] = std::min(u.v[node] + du, 0.0);
  }

  const double defect = convexity_defect(u);
  if (defect > opts.convexity_tol)
    st.injected_mu += convexify(u, p, opts, defect);

  st.t += dt;
  u.time = st.t;
  st.dt_last = dt;
  ++st.step_count;
}

inline RateSample sample_now(const EvolutionState& st, const FlowParams& p,
                             const FlowOptions& opts) {
  RateSample s;
  s.t = st.t;
  s.sup_abs_u = st.u.sup_abs();
  s.grad_sup = full_gradient_sup(st.u);
  s.G_current = std::pow(1.0 + s.grad_sup * s.grad_sup, -p.alpha * p.beta);
  s.injected_mu = st.injected_mu;
  if (opts.psi) {
    s.deviation_sup = deviation_sup(st.u, *opts.psi, p);
    auto [lo, hi] = deviation_ratio_extrema(st.u, opts.psi->psi, p);
    s.ratio_min = lo;
    s.ratio_max = hi;
  }
  if (opts.symmetry)
    s.symmetry_defect = std::pow(1.0 + st.t, p.gamma) * symmetry_defect(st.u, opts.sym_mode);
  return s;
}

}  // namespace detail

inline EvolutionState step(const EvolutionState& state, const FlowParams& p,
                           const FlowOptions& opts = {}) {
  EvolutionState st = state;
  auto w = detail::make_step_workspace(*st.u.dom, opts.op);
  detail::step_inplace(st, p, opts, w, 1e300);
  return st;
}

// Advance to t_end, recording diagnostics at state0.t and each sample time.
inline std::pair<EvolutionState, RateSeries> evolve(const EvolutionState& state0,
                                                    const FlowParams& p, double t_end,
                                                    std::vector<double> sample_times,
                                                    const FlowOptions& opts = {}) {
  if (!(t_end > state0.t))
    fail(ErrorCode::InsufficientSamples, "t_end must exceed the initial time");
  std::sort(sample_times.begin(), sample_times.end());
  for (double ts : sample_times)
    if (ts <= state0.t || ts > t_end)
      fail(ErrorCode::InsufficientSamples, "sample times must lie in (t0, t_end]");

  EvolutionState st = state0;
  RateSeries series;
  auto w = detail::make_step_workspace(*st.u.dom, opts.op);

  auto record = [&](EvolutionState& s) {
    RateSample smp = detail::sample_now(s, p, opts);
    s.G_current = smp.G_current;
    series.samples.push_back(smp);
    if (opts.record_fields) series.fields.push_back(s.u);
  };

  record(st);
  size_t next = 0;
  while (st.t < t_end - 1e-13) {
    double target = t_end;
    while (next < sample_times.size() && sample_times[next] <= st.t + 1e-13) ++next;
    if (next < sample_times.size()) target = sample_times[next];
    if (target - st.t > 1e-11) {
      detail::step_inplace(st, p, opts, w, target - st.t);
    } else {
      st.t = target;  // sub-roundoff gap left by clipping
      st.u.time = target;
    }
    if (st.t >= target - 1e-13 && next < sample_times.size()) {
      st.t = target;  // absorb the clipping roundoff
      st.u.time = target;
      record(st);
      ++next;
    }
  }
  return {std::move(st), std::move(series)};
}

// --- initial data catalog ---------------------------------------------------

inline ScalarField profile_multiple(const ProfileSolution& psi, double c) {
  ScalarField u = psi.psi;
  for (int node : u.dom->interior_nodes) u.v[node] *= c;
  u.time = 0.0;
  return u;
}

// u0 = -c * (1 - level) : paraboloid-like bowl vanishing on the boundary
inline ScalarField bowl_field(const Domain& d, double c) {
  ScalarField u(d, 0.0);
  u.fill([&](double x, double y) { return c * d.bowl(x, y); });
  return u;
}

// bowl with a tilted amplitude, minimum off center; offset < 1/2 keeps it
// strictly convex on the catalog shapes
inline ScalarField asym_bowl_field(const Domain& d, double c, double offset,
                                   double convexity_tol = 1e-3) {
  ScalarField u(d, 0.0);
  const double ax = d.spec.a;
  u.fill([&](double x, double y) { return c * d.bowl(x, y) * (1.0 + offset * x / ax); });
  if (convexity_defect(u) > convexity_tol)
    fail(ErrorCode::LostConvexity, "asymmetric bowl is not discretely convex; reduce offset");
  return u;
}

// --- sub/supersolution envelopes ---------------------------------------------

struct Envelope {
  double phi0_lower = 1.0;  // largest multiplier with phi0_lower*psi <= u0
  double phi0_upper = 1.0;  // smallest multiplier with u0 <= phi0_upper*psi
  double G = 1.0;
  FlowParams params;
  const ProfileSolution* psi = nullptr;

  double lower_mult(double t) const {
    const double e = 1.0 - params.n * params.alpha;
    return std::pow(G, 1.0 / e) * std::pow(std::pow(phi0_lower, e) + t, 1.0 / e);
  }
  double upper_mult(double t) const {
    const double e = 1.0 - params.n * params.alpha;
    return std::pow(std::pow(phi0_upper, e) + t, 1.0 / e);
  }
};

inline Envelope build_envelope(const ScalarField& u0, const ProfileSolution& psi, double G,
                               const FlowParams& p) {
  require_same_domain(u0, psi.psi);
  const Domain& d = *u0.dom;
  const double cut = d.h * d.h;
  double lo = 1e300, hi = -1e300;
  for (int node : d.interior_nodes) {
    if (u0.v[node] > 0.0)
      fail(ErrorCode::EnvelopeUndefined, "initial data is positive somewhere");
    if (-psi.psi.v[node] < cut) continue;
    const double r = u0.v[node] / psi.psi.v[node];
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  if (lo > hi || !(lo > 0.0))
    fail(ErrorCode::EnvelopeUndefined,
         "initial data is not pinched between positive multiples of psi");
  Envelope env;
  env.phi0_lower = hi;
  env.phi0_upper = lo;
  env.G = G;
  env.params = p;
  env.psi = &psi;
  return env;
}

struct SandwichRow {
  double t, lower_violation, upper_violation;
};

struct SandwichReport {
  std::vector<SandwichRow> rows;
  double max_violation = 0.0;
};

// Verifies lower(x,t) <= u(x,t) <= upper(x,t) on the recorded snapshots.
inline SandwichReport check_sandwich(const RateSeries& series, const Envelope& env) {
  if (series.fields.empty())
    fail(ErrorCode::InsufficientSamples, "sandwich check needs recorded fields");
  SandwichReport rep;
  const ScalarField& psi = env.psi->psi;
  for (size_t k = 0; k < series.fields.size(); ++k) {
    const ScalarField& u = series.fields[k];
    const double t = series.samples[k].t;
    const double ml = env.lower_mult(t), mu = env.upper_mult(t);
    double lv = 0.0, uv = 0.0;
    for (int node : u.dom->interior_nodes) {
      lv = std::max(lv, ml * psi.v[node] - u.v[node]);
      uv = std::max(uv, u.v[node] - mu * psi.v[node]);
    }
    rep.rows.push_back({t, lv, uv});
    rep.max_violation = std::max({rep.max_violation, lv, uv});
  }
  return rep;
}

}  // namespace gcf
