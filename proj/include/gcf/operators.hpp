#pragma once

// Discrete Monge-Ampere operator, gradient, flow speed and convexity
// diagnostics on a ScalarField.
//
// Two determinant discretizations:
//   standard9  - centered second differences, u_xx*u_yy - u_xy^2; second
//                order, exact on quadratics at full-stencil nodes.
//   monotone_ws - wide-stencil minimum over orthogonal direction pairs of
//                products of positive second differences; degenerate
//                elliptic, inherits a discrete comparison principle.
//
// Nodes next to the curved boundary use Shortley-Weller unequal-arm
// differences with the zero boundary value at the cut fraction.

#include <algorithm>
#include <cmath>

#include "gcf/field.hpp"
#include "gcf/params.hpp"

namespace gcf {

enum class Scheme { standard9, monotone_ws };

inline const char* to_string(Scheme s) {
  return s == Scheme::standard9 ? "standard9" : "monotone_ws";
}

struct OperatorOptions {
  Scheme scheme = Scheme::standard9;
  double det_floor = 1e-12;  // clamp before fractional powers
  int ws_rotations = 4;      // 2 or 4 direction pairs for monotone_ws
};

namespace detail {

struct WsPair {
  int ap, am, bp, bm;  // arm indices of the two orthogonal directions
  double len;          // arm length in units of h
};

inline constexpr WsPair ws_pairs[4] = {
    {0, 1, 2, 3, 1.0},
    {4, 5, 6, 7, 1.4142135623730951},
    {8, 9, 10, 11, 2.23606797749979},
    {12, 13, 14, 15, 2.23606797749979},
};

// Second difference along one direction with cut-cell arms; also exposes the
// (negated) dependence on the center value, 2/(hp*hm), used by CFL bounds.
struct ArmDiff {
  double value;
  double center_coef;  // -d(value)/d(u0)
};

inline ArmDiff second_diff(const ScalarField& u, int node, int kp, int km, double len) {
  const Domain& d = *u.dom;
  const double L = len * d.h;
  const double tp = d.frac[kp][node];
  const double tm = d.frac[km][node];
  const int op = arm_offsets[kp][1] * d.nx + arm_offsets[kp][0];
  const int om = arm_offsets[km][1] * d.nx + arm_offsets[km][0];
  const double up = (tp < 1.0) ? 0.0 : u.v[node + op];
  const double um = (tm < 1.0) ? 0.0 : u.v[node + om];
  const double hp = tp * L, hm = tm * L;
  const double c = 2.0 / (hp * hm);
  return {2.0 * (up / (hp * (hp + hm)) + um / (hm * (hp + hm))) - c * u.v[node], c};
}

// Corner value for the cross difference. Corners outside the interior are
// ghost-extended through the boundary crossing: a quadratic through the
// opposite corner, the center and the zero crossing when possible (exact on
// quadratics that vanish at the crossing), a linear extension otherwise.
// Opposite arms sit at adjacent table slots, so k^1 flips the direction.
inline double corner_value(const ScalarField& u, int node, int karm) {
  const Domain& d = *u.dom;
  const double th = d.frac[karm][node];
  const int off = arm_offsets[karm][1] * d.nx + arm_offsets[karm][0];
  if (th >= 1.0) return u.v[node + off];
  const double u0 = u.v[node];
  const double thm = d.frac[karm ^ 1][node];
  if (thm >= 1.0) {
    const double um = u.v[node - off];
    return um * (1.0 - th) / (1.0 + th) - u0 * 2.0 * (1.0 - th) / th;
  }
  return u0 * (1.0 - 1.0 / th);
}

inline double cross_diff(const ScalarField& u, int node) {
  const Domain& d = *u.dom;
  return (corner_value(u, node, 4) + corner_value(u, node, 5) - corner_value(u, node, 6) -
          corner_value(u, node, 7)) /
         (4.0 * d.h * d.h);
}

// |d(u_xy)/d(u0)| from the ghost corners; zero at full-stencil nodes
inline double cross_center_coef(const Domain& d, int node) {
  double c = 0.0;
  for (int k = 4; k < 8; ++k) {
    const double th = d.frac[k][node];
    if (th >= 1.0) continue;
    const double thm = d.frac[k ^ 1][node];
    c += (thm >= 1.0) ? 2.0 * (1.0 - th) / th : std::abs(1.0 - 1.0 / th);
  }
  return c / (4.0 * d.h * d.h);
}

struct Hessian {
  double xx, yy, xy;
  double cxx, cyy;  // center coefficients of the two axis second differences
};

inline Hessian hessian(const ScalarField& u, int node) {
  const ArmDiff dx = second_diff(u, node, kArmE, kArmW, 1.0);
  const ArmDiff dy = second_diff(u, node, kArmN, kArmS, 1.0);
  return {dx.value, dy.value, cross_diff(u, node), dx.center_coef, dy.center_coef};
}

// Determinant value plus the bound on -d(det)/d(u0) entering the CFL limit.
struct DetPoint {
  double det;
  double dcenter;
};

inline DetPoint det_standard(const ScalarField& u, int node) {
  const Hessian H = hessian(u, node);
  const double det = H.xx * H.yy - H.xy * H.xy;
  double dc = std::max(H.yy, 0.0) * H.cxx + std::max(H.xx, 0.0) * H.cyy;
  dc += 2.0 * std::abs(H.xy) * cross_center_coef(*u.dom, node);
  return {det, dc};
}

inline DetPoint det_monotone(const ScalarField& u, int node, int rotations) {
  double best = 1e300, best_dc = 0.0;
  for (int r = 0; r < rotations; ++r) {
    const WsPair& pr = ws_pairs[r];
    const ArmDiff da = second_diff(u, node, pr.ap, pr.am, pr.len);
    const ArmDiff db = second_diff(u, node, pr.bp, pr.bm, pr.len);
    const double pa = std::max(da.value, 0.0), pb = std::max(db.value, 0.0);
    const double prod = pa * pb;
    if (prod < best) {
      best = prod;
      best_dc = pb * da.center_coef + pa * db.center_coef;
    }
  }
  return {best, best_dc};
}

inline DetPoint det_point(const ScalarField& u, int node, const OperatorOptions& o) {
  return o.scheme == Scheme::standard9 ? det_standard(u, node)
                                       : det_monotone(u, node, o.ws_rotations);
}

inline double grad_sq_point(const ScalarField& u, int node) {
  const Domain& d = *u.dom;
  const double h = d.h;
  const double tE = d.frac[kArmE][node], tW = d.frac[kArmW][node];
  const double tN = d.frac[kArmN][node], tS = d.frac[kArmS][node];
  const double uE = (tE < 1.0) ? 0.0 : u.v[node + 1];
  const double uW = (tW < 1.0) ? 0.0 : u.v[node - 1];
  const double uN = (tN < 1.0) ? 0.0 : u.v[node + d.nx];
  const double uS = (tS < 1.0) ? 0.0 : u.v[node - d.nx];
  const double u0 = u.v[node];
  const double ux = (-tE / (tW * (tE + tW)) * uW + (tE - tW) / (tE * tW) * u0 +
                     tW / (tE * (tE + tW)) * uE) / h;
  const double uy = (-tN / (tS * (tN + tS)) * uS + (tN - tS) / (tN * tS) * u0 +
                     tS / (tN * (tN + tS)) * uN) / h;
  return ux * ux + uy * uy;
}

}  // namespace detail

inline ScalarField ma_det(const ScalarField& u, const OperatorOptions& opts = {}) {
  ScalarField out(*u.dom, u.time);
  for (int node : u.dom->interior_nodes) out.v[node] = detail::det_point(u, node, opts).det;
  return out;
}

inline ScalarField ma_power(const ScalarField& u, const FlowParams& p,
                            const OperatorOptions& opts = {}) {
  ScalarField out(*u.dom, u.time);
  for (int node : u.dom->interior_nodes)
    out.v[node] = std::pow(std::max(detail::det_point(u, node, opts).det, opts.det_floor), p.alpha);
  return out;
}

inline ScalarField grad_norm_sq(const ScalarField& u, const OperatorOptions& = {}) {
  ScalarField out(*u.dom, u.time);
  for (int node : u.dom->interior_nodes) out.v[node] = detail::grad_sq_point(u, node);
  return out;
}

inline ScalarField flow_speed(const ScalarField& u, const FlowParams& p,
                              const OperatorOptions& opts = {}) {
  ScalarField out(*u.dom, u.time);
  const double ab = p.alpha * p.beta;
  for (int node : u.dom->interior_nodes) {
    const double det = detail::det_point(u, node, opts).det;
    const double num = std::pow(std::max(det, opts.det_floor), p.alpha);
    out.v[node] = (ab == 0.0) ? num : num / std::pow(1.0 + detail::grad_sq_point(u, node), ab);
  }
  return out;
}

// Max over full-stencil interior nodes of the negative part of the smallest
// discrete Hessian eigenvalue; zero for discretely convex fields. Cut-cell
// Hessians are excluded: the zero-extended cross difference is O(1) noisy
// there and would mask the interior signal.
inline double convexity_defect(const ScalarField& u, const OperatorOptions& = {}) {
  double worst = 0.0;
  const Domain& d = *u.dom;
  for (int node : u.dom->interior_nodes) {
    bool full = true;
    for (int k = 0; k < 8 && full; ++k) full = d.frac[k][node] >= 1.0;
    if (!full) continue;
    const detail::Hessian H = detail::hessian(u, node);
    const double tr = H.xx + H.yy;
    const double disc = std::sqrt((H.xx - H.yy) * (H.xx - H.yy) + 4.0 * H.xy * H.xy);
    const double lmin = 0.5 * (tr - disc);
    worst = std::max(worst, -lmin);
  }
  return worst;
}

// Speed and its diagonal Lipschitz bound |d speed / d u0| in one pass; the
// bound drives both the CFL step and the stiff-ring stabilization.
inline void speed_and_diag(const ScalarField& u, const FlowParams& p, const OperatorOptions& opts,
                           ScalarField& speed, ScalarField& diag) {
  const double ab = p.alpha * p.beta;
  for (int node : u.dom->interior_nodes) {
    const detail::DetPoint dp = detail::det_point(u, node, opts);
    double damp = 1.0;
    if (ab != 0.0) damp = std::pow(1.0 + detail::grad_sq_point(u, node), ab);
    if (dp.det <= opts.det_floor) {
      speed.v[node] = std::pow(opts.det_floor, p.alpha) / damp;
      diag.v[node] = 0.0;  // flat side of the clamp
    } else {
      const double pw = std::pow(dp.det, p.alpha);
      speed.v[node] = pw / damp;
      diag.v[node] = p.alpha * pw / dp.det * dp.dcenter / damp;
    }
  }
}

// Nodes whose every stencil arm for the given scheme is a full arm; the CFL
// supremum is taken over these, cut-arm nodes are integrated with a
// diagonally stabilized update instead.
inline std::vector<std::uint8_t> core_mask(const Domain& d, const OperatorOptions& opts) {
  std::vector<std::uint8_t> core(d.interior.size(), 0);
  const int arms_end = (opts.scheme == Scheme::standard9) ? 4 : 4 * (opts.ws_rotations);
  for (int node : d.interior_nodes) {
    bool full = true;
    if (opts.scheme == Scheme::standard9) {
      for (int k = 0; k < 4 && full; ++k) full = d.frac[k][node] >= 1.0;
      // the cross difference needs the four corners too
      for (int k = 4; k < 8 && full; ++k) full = d.frac[k][node] >= 1.0;
    } else {
      for (int k = 0; k < arms_end && full; ++k) full = d.frac[k][node] >= 1.0;
    }
    core[node] = full ? 1 : 0;
  }
  return core;
}

inline double sup_interior_gradient(const ScalarField& u) {
  double m = 0.0;
  for (int node : u.dom->interior_nodes)
    m = std::max(m, detail::grad_sq_point(u, node));
  return std::sqrt(m);
}

}  // namespace gcf
