#pragma once

// Independent one-dimensional oracle for the profile equation on a disc:
// in two dimensions a radial profile satisfies
//     psi''(r) * psi'(r) / r = (|lambda| * (-psi))^(1/alpha),
//     psi'(0) = 0,  psi(R) = 0,
// solved by shooting on the center depth a = -psi(0) with bisection and a
// fixed-step RK4 integrator. Used only for verification; shares nothing
// with the grid solver.

#include <algorithm>
#include <cmath>
#include <vector>

#include "gcf/errors.hpp"
#include "gcf/params.hpp"

namespace gcf {

struct RadialOptions {
  double step = 1e-4;        // integrator step
  double bracket_lo = 1e-8;  // lower end of the shooting bracket
  int table_points = 257;
};

struct RadialProfile {
  double radius = 1.0;
  double sup_abs = 0.0;               // center depth a*
  std::vector<double> r, psi;         // sampled profile
};

namespace detail {

struct RadialShooter {
  double alpha, abs_lambda, radius, step;

  double rhs_pow(double y) const {
    return std::pow(abs_lambda * std::max(-y, 0.0), 1.0 / alpha);
  }

  // integrate from the series start; returns psi at R (positive-extrapolated
  // if psi crosses zero early)
  double shoot(double a) const {
    const double c = std::pow(abs_lambda * a, 1.0 / (2.0 * alpha));
    const double r0 = std::min(1e-3, radius / 100.0);
    double y = -a + 0.5 * c * r0 * r0;
    double z = c * r0;
    double r = r0;
    const long nsteps = std::max(1L, static_cast<long>(std::ceil((radius - r0) / step)));
    const double dr = (radius - r0) / nsteps;
    for (long k = 0; k < nsteps; ++k) {
      const double k1y = z;
      const double k1z = r * rhs_pow(y) / z;
      const double k2y = z + 0.5 * dr * k1z;
      const double k2z = (r + 0.5 * dr) * rhs_pow(y + 0.5 * dr * k1y) / (z + 0.5 * dr * k1z);
      const double k3y = z + 0.5 * dr * k2z;
      const double k3z = (r + 0.5 * dr) * rhs_pow(y + 0.5 * dr * k2y) / (z + 0.5 * dr * k2z);
      const double k4y = z + dr * k3z;
      const double k4z = (r + dr) * rhs_pow(y + dr * k3y) / (z + dr * k3z);
      y += dr / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
      z += dr / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
      r += dr;
      if (y >= 0.0) return y + (radius - r) * z;  // overshoot, sign is all that matters
    }
    return y;
  }
};

}  // namespace detail

inline double abp_bound_disc(const FlowParams& p, double radius) {
  // n=2 closed form of the a priori bound: (|lambda|^(1/a) * 4 R^4)^(a/(2a-1))
  const double base = std::pow(std::abs(p.lambda), 1.0 / p.alpha) * 4.0 * std::pow(radius, 4.0);
  return std::pow(base, p.alpha / (2.0 * p.alpha - 1.0));
}

inline RadialProfile radial_oracle(const FlowParams& p, double radius,
                                   const RadialOptions& opts = {}) {
  if (p.n != 2) fail(ErrorCode::InvalidDimension, "radial oracle is two-dimensional");
  if (!(radius > 0)) fail(ErrorCode::ShootingFailed, "radius must be positive");

  detail::RadialShooter sh{p.alpha, std::abs(p.lambda), radius, opts.step};
  double lo = opts.bracket_lo;
  double hi = abp_bound_disc(p, radius) * (1.0 + 1e-9);
  double glo = sh.shoot(lo), ghi = sh.shoot(hi);
  if (!(glo > 0.0) || !(ghi < 0.0))
    fail(ErrorCode::ShootingFailed, "no sign change in [" + std::to_string(lo) + ", " +
                                        std::to_string(hi) + "]");
  for (int it = 0; it < 200 && (hi - lo) > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sh.shoot(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double a = 0.5 * (lo + hi);

  RadialProfile prof;
  prof.radius = radius;
  prof.sup_abs = a;

  // resample the converged trajectory for the table
  const double c = std::pow(sh.abs_lambda * a, 1.0 / (2.0 * p.alpha));
  const double r0 = std::min(1e-3, radius / 100.0);
  double y = -a + 0.5 * c * r0 * r0;
  double z = c * r0;
  double r = r0;
  const long nsteps = std::max(1L, static_cast<long>(std::ceil((radius - r0) / opts.step)));
  const double dr = (radius - r0) / nsteps;
  const long stride = std::max(1L, nsteps / std::max(1, opts.table_points - 1));
  prof.r.push_back(0.0);
  prof.psi.push_back(-a);
  for (long k = 0; k < nsteps; ++k) {
    const double k1y = z, k1z = r * sh.rhs_pow(y) / z;
    const double k2y = z + 0.5 * dr * k1z;
    const double k2z = (r + 0.5 * dr) * sh.rhs_pow(y + 0.5 * dr * k1y) / (z + 0.5 * dr * k1z);
    const double k3y = z + 0.5 * dr * k2z;
    const double k3z = (r + 0.5 * dr) * sh.rhs_pow(y + 0.5 * dr * k2y) / (z + 0.5 * dr * k2z);
    const double k4y = z + dr * k3z;
    const double k4z = (r + dr) * sh.rhs_pow(y + dr * k3y) / (z + dr * k3z);
    y += dr / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
    z += dr / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
    r += dr;
    if (y > 0.0) y = 0.0;
    if ((k + 1) % stride == 0 || k + 1 == nsteps) {
      prof.r.push_back(r);
      prof.psi.push_back(y);
    }
  }
  prof.r.back() = radius;
  prof.psi.back() = 0.0;
  return prof;
}

}  // namespace gcf
