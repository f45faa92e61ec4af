#pragma once

// Solver for the elliptic self-similar profile psi:
//     det(D^2 psi) = (|lambda| * (-psi))^(1/alpha)  in Omega,
//     psi = 0 on the boundary, psi < 0 and convex inside,
// with lambda = 1/(1 - n*alpha).
//
// Stage 1 relaxes the rescaled parabolic equation v_tau = M^alpha(v) - lambda v
// (globally stable, restores convexity); stage 2 polishes with damped Newton
// on the residual, using the cofactor-weighted linearization and a sparse
// direct solve.

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <vector>

#include "gcf/operators.hpp"

namespace gcf {

enum class ProfileMethod { relaxation, newton, relaxation_then_newton };

inline const char* to_string(ProfileMethod m) {
  switch (m) {
    case ProfileMethod::relaxation: return "relaxation";
    case ProfileMethod::newton: return "newton";
    case ProfileMethod::relaxation_then_newton: return "relaxation_then_newton";
  }
  return "?";
}

struct ProfileOptions {
  OperatorOptions op;
  ProfileMethod method = ProfileMethod::relaxation_then_newton;
  double tol = 1e-6;            // residual_sup target
  double cfl = 0.45;
  double convexity_tol = 1e-3;
  double initial_scale = 0.5;   // v0 = -initial_scale * abp_bound * (1 - level)
  double relax_tau_max = 2.0;
  long max_relax_steps = 400000;
  int max_newton = 40;
  double psi_clamp = 1e-14;     // -psi is kept >= this in the right-hand side
};

struct ProfileSolution {
  ScalarField psi;
  double residual_sup = 0.0;
  double sup_abs = 0.0;
  double abp_bound = 0.0;
  int iterations = 0;  // newton iterations + relaxation steps
  int newton_iterations = 0;
  long relax_steps = 0;
  ProfileMethod method = ProfileMethod::relaxation_then_newton;
};

// Aleksandrov-Bakelman-Pucci sup bound:
// (|lambda|^(1/alpha) |Omega| diam^n / omega_n)^(alpha/(n alpha - 1)).
inline double abp_bound(const Domain& dom, const FlowParams& p) {
  const double omega_n = std::pow(M_PI, p.n / 2.0) / std::tgamma(p.n / 2.0 + 1.0);
  const double base = std::pow(std::abs(p.lambda), 1.0 / p.alpha) * dom.area *
                      std::pow(dom.diameter, p.n) / omega_n;
  return std::pow(base, p.alpha / (p.n * p.alpha - 1.0));
}

namespace detail {

inline double profile_rhs(double psi_val, const FlowParams& p, double clamp) {
  return std::pow(std::abs(p.lambda) * std::max(-psi_val, clamp), 1.0 / p.alpha);
}

inline double residual_sup_of(const ScalarField& psi, const FlowParams& p,
                              const ProfileOptions& o) {
  double worst = 0.0;
  for (int node : psi.dom->interior_nodes) {
    const double det = det_point(psi, node, o.op).det;
    worst = std::max(worst, std::abs(det - profile_rhs(psi.v[node], p, o.psi_clamp)));
  }
  return worst;
}

// One explicit step of the rescaled relaxation; returns the tau increment.
struct RelaxWorkspace {
  ScalarField speed, diag;
  std::vector<std::uint8_t> core;
};

inline double relax_step(ScalarField& v, const FlowParams& p, const ProfileOptions& o,
                         RelaxWorkspace& w) {
  speed_and_diag(v, p, o.op, w.speed, w.diag);
  const double growth = -p.lambda;  // positive
  double sup_core = growth;
  for (int node : v.dom->interior_nodes)
    if (w.core[node]) sup_core = std::max(sup_core, w.diag.v[node] + growth);
  const double dtau = o.cfl / sup_core;
  for (int node : v.dom->interior_nodes) {
    const double rhs = w.speed.v[node] - p.lambda * v.v[node];
    const double L = w.diag.v[node] + growth;
    double dv = dtau * rhs;
    if (dtau * L > 0.9) dv = dtau * rhs / (1.0 + dtau * L);  // stiff cut-cell ring
    v.v[node] = std::min(v.v[node] + dv, 0.0);
  }
  return dtau;
}

struct NewtonSystem {
  Eigen::SparseMatrix<double> J;
  Eigen::VectorXd rhs;  // -(residual)
};

inline NewtonSystem assemble_newton(const ScalarField& psi, const FlowParams& p,
                                    const ProfileOptions& o, const std::vector<int>& index_of) {
  const Domain& d = *psi.dom;
  const int m = d.interior_count();
  NewtonSystem sys;
  sys.J.resize(m, m);
  sys.rhs.resize(m);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(m) * 9);
  const double h = d.h;

  for (int row = 0; row < m; ++row) {
    const int node = d.interior_nodes[row];
    const Hessian H = hessian(psi, node);
    const double det = H.xx * H.yy - H.xy * H.xy;
    sys.rhs[row] = -(det - profile_rhs(psi.v[node], p, o.psi_clamp));

    double diag = 0.0;
    // u_yy * delta_xx with Shortley-Weller arms
    {
      const double tE = d.frac[kArmE][node], tW = d.frac[kArmW][node];
      const double hE = tE * h, hW = tW * h;
      diag += H.yy * (-2.0 / (hE * hW));
      if (tE >= 1.0) trip.emplace_back(row, index_of[node + 1], H.yy * 2.0 / (hE * (hE + hW)));
      if (tW >= 1.0) trip.emplace_back(row, index_of[node - 1], H.yy * 2.0 / (hW * (hE + hW)));
    }
    // u_xx * delta_yy
    {
      const double tN = d.frac[kArmN][node], tS = d.frac[kArmS][node];
      const double hN = tN * h, hS = tS * h;
      diag += H.xx * (-2.0 / (hN * hS));
      if (tN >= 1.0) trip.emplace_back(row, index_of[node + d.nx], H.xx * 2.0 / (hN * (hN + hS)));
      if (tS >= 1.0) trip.emplace_back(row, index_of[node - d.nx], H.xx * 2.0 / (hS * (hN + hS)));
    }
    // -2 u_xy * delta_xy over the corners, ghosts differentiated through
    // their dependence on the center and opposite-corner values
    {
      const double cxy = -2.0 * H.xy / (4.0 * h * h);
      const double sign[4] = {1.0, 1.0, -1.0, -1.0};
      for (int k = 0; k < 4; ++k) {
        const int karm = 4 + k;
        const int off = arm_offsets[karm][1] * d.nx + arm_offsets[karm][0];
        const double w = cxy * sign[k];
        const double th = d.frac[karm][node];
        if (th >= 1.0) {
          trip.emplace_back(row, index_of[node + off], w);
          continue;
        }
        const double thm = d.frac[karm ^ 1][node];
        if (thm >= 1.0) {
          trip.emplace_back(row, index_of[node - off], w * (1.0 - th) / (1.0 + th));
          diag += w * (-2.0 * (1.0 - th) / th);
        } else {
          diag += w * (1.0 - 1.0 / th);
        }
      }
    }
    // derivative of the right-hand side (zero on the clamped ring)
    if (-psi.v[node] > o.psi_clamp) {
      diag += (1.0 / p.alpha) * std::pow(std::abs(p.lambda), 1.0 / p.alpha) *
              std::pow(-psi.v[node], 1.0 / p.alpha - 1.0);
    }
    trip.emplace_back(row, row, diag);
  }
  sys.J.setFromTriplets(trip.begin(), trip.end());
  return sys;
}

}  // namespace detail

inline ProfileSolution solve_profile(const Domain& dom, const FlowParams& p,
                                     const ProfileOptions& opts = {}) {
  ProfileSolution sol{ScalarField(dom)};
  sol.abp_bound = abp_bound(dom, p);
  sol.method = opts.method;

  ScalarField& v = sol.psi;
  const double depth = opts.initial_scale * sol.abp_bound;
  v.fill([&](double x, double y) { return -depth * (1.0 - dom.level(x, y)); });

  const bool do_relax = opts.method != ProfileMethod::newton;
  const bool do_newton = opts.method != ProfileMethod::relaxation;

  detail::RelaxWorkspace w{ScalarField(dom), ScalarField(dom), core_mask(dom, opts.op)};
  double res = detail::residual_sup_of(v, p, opts);

  auto relax_run = [&](double tau_budget, long step_budget) {
    double tau = 0.0;
    double best = res;
    int flat_windows = 0;
    long k = 0;
    while (tau < tau_budget && k < step_budget) {
      for (int s = 0; s < 50 && tau < tau_budget; ++s, ++k) tau += detail::relax_step(v, p, opts, w);
      res = detail::residual_sup_of(v, p, opts);
      if (res <= opts.tol) break;
      flat_windows = (res > 0.99 * best) ? flat_windows + 1 : 0;
      best = std::min(best, res);
      if (flat_windows >= 3) break;  // transient is over, hand off to Newton
    }
    sol.relax_steps += k;
  };

  if (do_relax) relax_run(opts.relax_tau_max, opts.max_relax_steps);

  if (do_newton && res > opts.tol) {
    std::vector<int> index_of(dom.interior.size(), -1);
    for (int r = 0; r < dom.interior_count(); ++r) index_of[dom.interior_nodes[r]] = r;

    bool relax_retry_done = false;
    for (int it = 0; it < opts.max_newton && res > opts.tol; ++it) {
      detail::NewtonSystem sys = detail::assemble_newton(v, p, opts, index_of);
      Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(sys.J);
      if (lu.info() != Eigen::Success)
        fail(ErrorCode::NoConvergence, "Newton linearization is singular");
      const Eigen::VectorXd delta = lu.solve(sys.rhs);

      double step = 1.0;
      bool accepted = false;
      bool convexity_blocked = false;
      for (int ls = 0; ls < 14; ++ls, step *= 0.5) {
        ScalarField trial = v;
        for (int r = 0; r < dom.interior_count(); ++r)
          trial.v[dom.interior_nodes[r]] = std::min(v.v[dom.interior_nodes[r]] + step * delta[r], 0.0);
        const double trial_res = detail::residual_sup_of(trial, p, opts);
        if (trial_res >= res) continue;
        if (convexity_defect(trial) > opts.convexity_tol) {
          convexity_blocked = true;
          continue;
        }
        v = trial;
        res = trial_res;
        accepted = true;
        break;
      }
      ++sol.newton_iterations;

      if (!accepted) {
        if (!relax_retry_done && opts.method == ProfileMethod::relaxation_then_newton) {
          relax_retry_done = true;
          relax_run(opts.relax_tau_max, opts.max_relax_steps);
          continue;
        }
        if (convexity_blocked)
          fail(ErrorCode::LostConvexity, "Newton step cannot keep the iterate convex");
        fail(ErrorCode::NoConvergence, "Newton line search stalled at residual " +
                                           std::to_string(res));
      }
    }
  }

  if (res > opts.tol)
    fail(ErrorCode::NoConvergence,
         "residual " + std::to_string(res) + " above tolerance " + std::to_string(opts.tol));

  sol.residual_sup = res;
  sol.sup_abs = v.sup_abs();
  sol.iterations = sol.newton_iterations + static_cast<int>(std::min<long>(sol.relax_steps, 1000000));
  return sol;
}

}  // namespace gcf
