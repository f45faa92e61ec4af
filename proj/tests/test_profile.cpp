// Profile solver tests: the a priori sup bound, the radial shooting oracle
// and its scaling law, solver convergence against the oracle, uniqueness
// under different starts, and the error paths.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gcf/analysis.hpp"
#include "gcf/profile.hpp"
#include "gcf/radial.hpp"

using namespace gcf;

TEST_CASE("abp bound frozen values") {
  const Domain disc = make_domain(disc_spec(1.0, 0.05));
  CHECK(abp_bound(disc, make_params(2, 1.0, 0.0)) == doctest::Approx(4.0).epsilon(1e-12));

  // independent long-double evaluation of the formula for alpha = 2
  const long double base = sqrtl(1.0L / 3.0L) * 4.0L;
  const long double want = powl(base, 2.0L / 3.0L);
  CHECK(abp_bound(disc, make_params(2, 2.0, 0.0)) ==
        doctest::Approx(static_cast<double>(want)).epsilon(1e-13));
  CHECK(abp_bound(disc, make_params(2, 2.0, 0.0)) == doctest::Approx(1.7471609).epsilon(1e-6));

  // alpha = 0.75: (2^(4/3) * 4)^(3/2) = 32
  CHECK(abp_bound(disc, make_params(2, 0.75, 0.0)) == doctest::Approx(32.0).epsilon(1e-12));

  // disc scaled so |Omega| diam^2 / omega_2 = 1 gives bound 1 when |lambda| = 1
  const Domain small = make_domain(disc_spec(std::pow(0.25, 0.25), 0.02));
  CHECK(abp_bound(small, make_params(2, 1.0, 0.0)) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("radial oracle is step-size independent and monotone in radius") {
  const FlowParams p = make_params(2, 1.0, 0.0);
  RadialOptions o1, o2;
  o1.step = 2e-4;
  o2.step = 1e-4;
  const RadialProfile r1 = radial_oracle(p, 1.0, o1);
  const RadialProfile r2 = radial_oracle(p, 1.0, o2);
  CHECK(std::abs(r1.sup_abs - r2.sup_abs) <= 1e-8);

  const double a_half = radial_oracle(p, 0.5).sup_abs;
  const double a_75 = radial_oracle(p, 0.75).sup_abs;
  CHECK(a_half > 0.0);
  CHECK(a_half < a_75);
  CHECK(a_75 < r2.sup_abs);

  // table is monotone nondecreasing in r and pinned at the ends
  for (size_t k = 1; k < r2.psi.size(); ++k) CHECK(r2.psi[k] >= r2.psi[k - 1] - 1e-12);
  CHECK(r2.psi.front() == doctest::Approx(-r2.sup_abs));
  CHECK(r2.psi.back() == 0.0);
}

TEST_CASE("radial profiles obey the exact radius scaling") {
  // psi_R(r) = R^k psi_1(r/R) with k = 4 alpha / (2 alpha - 1) in two dimensions
  const double R = 0.6;
  for (double alpha : {0.75, 1.0, 2.0}) {
    const FlowParams p = make_params(2, alpha, 0.0);
    const double k = 4.0 * alpha / (2.0 * alpha - 1.0);
    const RadialProfile r1 = radial_oracle(p, 1.0);
    const RadialProfile rR = radial_oracle(p, R);
    CHECK(std::abs(rR.sup_abs - std::pow(R, k) * r1.sup_abs) <= 1e-6 * rR.sup_abs);
  }
}

TEST_CASE("shooting fails cleanly when the bracket has no sign change") {
  const FlowParams p = make_params(2, 1.0, 0.0);
  RadialOptions o;
  o.bracket_lo = 3.6;  // far above the true center depth
  CHECK_THROWS_AS(radial_oracle(p, 1.0, o), Error);
  try {
    radial_oracle(p, 1.0, o);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ShootingFailed);
  }
}

TEST_CASE("solved profile matches the radial oracle on the disc") {
  const Domain d = make_domain(disc_spec(1.0, 1.0 / 64));
  for (double alpha : {1.0, 2.0}) {
    const FlowParams p = make_params(2, alpha, 0.0);
    const ProfileSolution s = solve_profile(d, p);
    const RadialProfile r = radial_oracle(p, 1.0);
    CHECK(s.residual_sup <= 1e-6);
    CHECK(s.sup_abs <= s.abp_bound);
    CHECK(std::abs(s.sup_abs - r.sup_abs) / r.sup_abs <= 1e-3);
  }
}

TEST_CASE("abp inequality across the catalog") {
  const Domain disc = make_domain(disc_spec(1.0, 1.0 / 32));
  const Domain ell = make_domain(ellipse_spec(1.0, 0.5, 1.0 / 32));
  for (const Domain* dom : {&disc, &ell})
    for (double alpha : {0.75, 1.0, 2.0}) {
      const FlowParams p = make_params(2, alpha, 0.0);
      const ProfileSolution s = solve_profile(*dom, p);
      CHECK(s.residual_sup <= 1e-6);
      CHECK(s.sup_abs <= s.abp_bound);
      CHECK(s.psi.max_interior() < 0.0);
      CHECK(convexity_defect(s.psi) <= 1e-3);
    }

  // superellipse: curvature degenerates at the axis crossings but the solver
  // and the bound still hold
  const Domain se = make_domain(superellipse_spec(1.0, 0.8, 4.0, 1.0 / 32));
  const ProfileSolution s = solve_profile(se, make_params(2, 1.0, 0.0));
  CHECK(s.residual_sup <= 1e-6);
  CHECK(s.sup_abs <= s.abp_bound);
  CHECK(symmetry_defect(s.psi, SymmetryMode::central) <= 1e-12);
}

TEST_CASE("different starts converge to the same profile") {
  const Domain d = make_domain(disc_spec(1.0, 1.0 / 32));
  const FlowParams p = make_params(2, 1.0, 0.0);
  ProfileOptions shallow, deep;
  shallow.initial_scale = 0.05;
  shallow.tol = 1e-8;
  deep.initial_scale = 1.5;
  deep.tol = 1e-8;
  const ProfileSolution a = solve_profile(d, p, shallow);
  const ProfileSolution b = solve_profile(d, p, deep);
  CHECK(sup_abs_diff(a.psi, b.psi) <= 1e-5);
}

TEST_CASE("converged profile is a fixed point of the rescaled relaxation") {
  const Domain d = make_domain(disc_spec(1.0, 1.0 / 32));
  {
    const FlowParams p = make_params(2, 1.0, 0.0);  // M^a - lambda psi is the residual itself
    ProfileOptions o;
    const ProfileSolution s = solve_profile(d, p, o);
    const ScalarField pw = ma_power(s.psi, p, o.op);
    double worst = 0.0;
    for (int node : d.interior_nodes)
      worst = std::max(worst, std::abs(pw.v[node] - p.lambda * s.psi.v[node]));
    CHECK(worst <= o.tol);
  }
  {
    const FlowParams p = make_params(2, 2.0, 0.0);  // chain-rule factor < 10
    ProfileOptions o;
    const ProfileSolution s = solve_profile(d, p, o);
    const ScalarField pw = ma_power(s.psi, p, o.op);
    double worst = 0.0;
    for (int node : d.interior_nodes)
      worst = std::max(worst, std::abs(pw.v[node] - p.lambda * s.psi.v[node]));
    CHECK(worst <= 10.0 * o.tol);
  }
}

TEST_CASE("disc profile is radially symmetric to discretization level") {
  const Domain d = make_domain(disc_spec(1.0, 1.0 / 32));
  const FlowParams p = make_params(2, 1.0, 0.0);
  const ProfileSolution s = solve_profile(d, p);
  const double lip = boundary_normal_sup(s.psi);
  CHECK(symmetry_defect(s.psi, SymmetryMode::radial) <= 2.0 * d.h * lip);
  CHECK(symmetry_defect(s.psi, SymmetryMode::central) <= 1e-12);  // exact by grid symmetry
}

TEST_CASE("newton alone from a poor start reports NoConvergence") {
  const Domain d = make_domain(disc_spec(1.0, 1.0 / 16));
  const FlowParams p = make_params(2, 1.0, 0.0);
  ProfileOptions o;
  o.method = ProfileMethod::newton;
  o.max_newton = 0;
  CHECK_THROWS_AS(solve_profile(d, p, o), Error);
  try {
    solve_profile(d, p, o);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoConvergence);
  }
}
