// Flow stepping tests: fixed points, one-step self-similar consistency,
// amplitude laws, the discrete comparison principle of the monotone scheme,
// envelopes and the sandwich check, plus invariant preservation.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gcf/flow.hpp"

using namespace gcf;

namespace {

ScalarField scaled(const ScalarField& f, double c, double t = -1.0) {
  ScalarField out = f;
  for (int node : f.dom->interior_nodes) out.v[node] *= c;
  out.time = t;
  return out;
}

}  // namespace

TEST_CASE("the zero field is a fixed point") {
  const Domain d = make_domain(disc_spec(1.0, 1.0 / 16));
  const FlowParams p = make_params(2, 0.75, 0.0);  // worst clamp drift
  EvolutionState st = make_state(ScalarField(d, 0.0), p);
  FlowOptions fo;
  auto [fin, series] = evolve(st, p, 1.0, {0.5, 1.0}, fo);
  CHECK(fin.u.sup_abs() == 0.0);
  CHECK(fin.u.max_interior() <= 0.0);
}

TEST_CASE("one explicit step reproduces the self-similar law to O(dt^2)") {
  const Domain d = make_domain(disc_spec(1.0, 1.0 / 16));
  for (double alpha : {1.0, 2.0}) {
    const FlowParams p = make_params(2, alpha, 0.0);
    ProfileOptions po;
    po.tol = 1e-8;
    const ProfileSolution psi = solve_profile(d, p, po);
    EvolutionState st = make_state(profile_multiple(psi, 1.0), p);
    const EvolutionState next = step(st, p);
    const double dt = next.dt_last;
    REQUIRE(dt > 0.0);
    const double e = 1.0 - p.n * p.alpha;
    const ScalarField want = scaled(psi.psi, std::pow(1.0 + dt, 1.0 / e));
    const double lam = p.lambda;
    const double second_order = std::abs(0.5 * lam * (lam - 1.0)) * dt * dt * psi.sup_abs;
    const auto core = core_mask(d, OperatorOptions{});
    double worst_core = 0.0, worst_all = 0.0;
    for (int node : d.interior_nodes) {
      const double diff = std::abs(next.u.v[node] - want.v[node]);
      worst_all = std::max(worst_all, diff);
      if (core[node]) worst_core = std::max(worst_core, diff);
    }
    // plain Euler on the core; the stabilized cut ring is first order in dt
    CHECK(worst_core <= 2.0 * second_order + 2.0 * dt * po.tol);
    CHECK(worst_all <= 0.02 * dt * psi.sup_abs);
  }
}

TEST_CASE("larger beta slows the flow pointwise") {
  const Domain d = make_domain(disc_spec(1.0, 1.0 / 16));
  ScalarField u0 = bowl_field(d, 2.0);  // steep: |grad| up to ~4
  const ScalarField s0 = flow_speed(u0, make_params(2, 1.0, 0.0));
  const ScalarField s10 = flow_speed(u0, make_params(2, 1.0, 10.0));
  for (int node : d.interior_nodes) {
    CHECK(s10.v[node] <= s0.v[node] + 1e-15);
    if (grad_norm_sq(u0).v[node] > 1e-8) CHECK(s10.v[node] < s0.v[node]);
  }
}

TEST_CASE("evolved profile data follows the amplitude power law") {
  const Domain d = make_domain(disc_spec(1.0, 1.0 / 32));
  const FlowParams p = make_params(2, 1.0, 0.0);
  const ProfileSolution psi = solve_profile(d, p);
  FlowOptions fo;
  fo.psi = &psi;

  {  // phi0 = 1: sup|u(t)| = (1+t)^(-1) sup|psi| within 2%
    EvolutionState st = make_state(profile_multiple(psi, 1.0), p);
    auto [fin, series] = evolve(st, p, 3.0, {1.0, 3.0}, fo);
    for (const RateSample& s : series.samples) {
      const double want = psi.sup_abs / (1.0 + s.t);
      CHECK(std::abs(s.sup_abs_u - want) / want <= 0.02);
    }
    CHECK(fin.injected_mu == 0.0);
  }
  {  // phi0 = 2: amplitude follows (0.5 + t)^(-1)
    EvolutionState st = make_state(profile_multiple(psi, 2.0), p);
    auto [fin, series] = evolve(st, p, 1.5, {0.5, 1.5}, fo);
    for (const RateSample& s : series.samples) {
      const double want = psi.sup_abs / (0.5 + s.t);
      CHECK(std::abs(s.sup_abs_u - want) / want <= 0.02);
    }
  }
}

TEST_CASE("recorded diagnostics are finite with strictly increasing times") {
  const Domain d = make_domain(disc_spec(1.0, 1.0 / 16));
  const FlowParams p = make_params(2, 1.0, geometric_beta(make_params(2, 1.0, 0.0)));
  const ProfileSolution psi = solve_profile(d, p);
  FlowOptions fo;
  fo.psi = &psi;
  fo.symmetry = true;
  EvolutionState st = make_state(asym_bowl_field(d, 1.0, 0.25), p);
  auto [fin, series] = evolve(st, p, 2.0, {0.25, 0.5, 1.0, 2.0}, fo);
  REQUIRE(series.samples.size() == 5);  // initial state + 4 samples
  for (size_t k = 0; k < series.samples.size(); ++k) {
    const RateSample& s = series.samples[k];
    if (k) CHECK(s.t > series.samples[k - 1].t);
    for (double v : {s.deviation_sup, s.grad_sup, s.symmetry_defect, s.sup_abs_u, s.G_current})
      CHECK(std::isfinite(v));
  }
  CHECK(fin.G_current >= fin.G - 1e-12);
}

TEST_CASE("monotone scheme obeys the discrete comparison principle") {
  const Domain d = make_domain(disc_spec(1.0, 1.0 / 16));
  const FlowParams p = make_params(2, 1.0, 0.0);
  FlowOptions fo;
  fo.op.scheme = Scheme::monotone_ws;
  std::mt19937_64 rng(11);
  auto u01 = [&] { return (rng() >> 11) * 0x1.0p-53; };
  for (int trial = 0; trial < 10; ++trial) {
    const double c = 0.5 + 2.0 * u01();
    const double off = 0.3 * u01();
    const double shrink = 0.3 + 0.6 * u01();
    ScalarField lo = asym_bowl_field(d, c, off);
    ScalarField hi = scaled(lo, shrink, 0.0);  // lo <= hi <= 0 nodewise
    auto [flo, serlo] = evolve(make_state(lo, p), p, 0.05, {0.05}, fo);
    auto [fhi, serhi] = evolve(make_state(hi, p), p, 0.05, {0.05}, fo);
    double violation = 0.0;
    for (int node : d.interior_nodes)
      violation = std::max(violation, flo.u.v[node] - fhi.u.v[node]);
    CHECK(violation <= 1e-9);
  }
}

TEST_CASE("envelope construction frozen examples") {
  const Domain d = make_domain(disc_spec(1.0, 1.0 / 32));
  const FlowParams p = make_params(2, 1.0, 0.0);
  const ProfileSolution psi = solve_profile(d, p);

  const Envelope e1 = build_envelope(scaled(psi.psi, 1.0, 0.0), psi, 1.0, p);
  CHECK(e1.phi0_lower == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e1.phi0_upper == doctest::Approx(1.0).epsilon(1e-12));

  const Envelope e2 = build_envelope(scaled(psi.psi, 2.0, 0.0), psi, 1.0, p);
  CHECK(e2.phi0_lower == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(e2.phi0_upper == doctest::Approx(2.0).epsilon(1e-12));

  // modulated profile: ratio spans [1.1, 1.9] up to node sampling
  ScalarField mod = psi.psi;
  mod.time = 0.0;
  for (int node : d.interior_nodes) {
    const int i = node % d.nx;
    mod.v[node] *= 1.5 + 0.4 * std::sin(M_PI * d.x(i));
  }
  const Envelope e3 = build_envelope(mod, psi, 1.0, p);
  CHECK(e3.phi0_lower == doctest::Approx(1.9).epsilon(2e-2));
  CHECK(e3.phi0_upper == doctest::Approx(1.1).epsilon(2e-2));

  CHECK_THROWS_AS(build_envelope(scaled(psi.psi, -1.0, 0.0), psi, 1.0, p), Error);
  CHECK_THROWS_AS(build_envelope(ScalarField(d, 0.0), psi, 1.0, p), Error);
  try {
    build_envelope(ScalarField(d, 0.0), psi, 1.0, p);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EnvelopeUndefined);
  }
}

TEST_CASE("equality case stays inside its own envelopes up to discretization") {
  const Domain d = make_domain(disc_spec(1.0, 1.0 / 16));
  const FlowParams p = make_params(2, 1.0, 0.0);
  const ProfileSolution psi = solve_profile(d, p);
  for (Scheme sch : {Scheme::standard9, Scheme::monotone_ws}) {
    FlowOptions fo;
    fo.op.scheme = sch;
    fo.psi = &psi;
    fo.record_fields = true;
    EvolutionState st = make_state(profile_multiple(psi, 1.0), p);
    const Envelope env = build_envelope(st.u, psi, st.G, p);
    auto [fin, series] = evolve(st, p, 3.0, {1.0, 3.0}, fo);
    const SandwichReport rep = check_sandwich(series, env);
    const double slack = (sch == Scheme::standard9 ? 1e-3 : 5e-2) * psi.sup_abs;
    CHECK(rep.max_violation <= slack);
  }
}

TEST_CASE("upper envelope holds at t = 0 by construction") {
  const Domain d = make_domain(disc_spec(1.0, 1.0 / 16));
  const FlowParams p = make_params(2, 1.0, 0.0);
  const ProfileSolution psi = solve_profile(d, p);
  const ScalarField u0 = asym_bowl_field(d, 1.2, 0.2);
  const Envelope env = build_envelope(u0, psi, 0.7, p);
  for (int node : d.interior_nodes) {
    CHECK(env.upper_mult(0.0) * psi.psi.v[node] >= u0.v[node] - 1e-12);
    CHECK(env.lower_mult(0.0) * psi.psi.v[node] <= u0.v[node] + 1e-12);
  }
}

TEST_CASE("sign, convexity and gradient monotonicity are preserved") {
  const Domain d = make_domain(disc_spec(1.0, 1.0 / 16));
  const FlowParams p = make_params(2, 2.0, 1.0);
  const ProfileSolution psi = solve_profile(d, p);
  FlowOptions fo;
  fo.psi = &psi;
  EvolutionState st = make_state(asym_bowl_field(d, 1.0, 0.25), p);
  auto [fin, series] = evolve(st, p, 2.0, {0.5, 1.0, 2.0}, fo);
  CHECK(fin.u.max_interior() <= 0.0);
  CHECK(convexity_defect(fin.u) <= fo.convexity_tol);
  CHECK(fin.injected_mu <= 1e-6);
  for (size_t k = 1; k < series.samples.size(); ++k) {
    CHECK(series.samples[k].grad_sup <=
          series.samples[k - 1].grad_sup + 1e-3 * series.samples[0].grad_sup);
    CHECK(series.samples[k].G_current >= series.samples[k - 1].G_current - 1e-6);
  }
}

TEST_CASE("step reports StabilityFailure when dt underflows") {
  const Domain d = make_domain(disc_spec(1.0, 1.0 / 16));
  const FlowParams p = make_params(2, 1.0, 0.0);
  FlowOptions fo;
  fo.dt_min = 1.0;  // force the failure
  EvolutionState st = make_state(bowl_field(d, 1.0), p);
  CHECK_THROWS_AS(step(st, p, fo), Error);
  try {
    step(st, p, fo);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StabilityFailure);
  }
}

TEST_CASE("asymmetric bowls reject non-convex tilts") {
  const Domain d = make_domain(disc_spec(1.0, 1.0 / 16));
  CHECK_THROWS_AS(asym_bowl_field(d, 1.0, 0.5), Error);
  CHECK(convexity_defect(asym_bowl_field(d, 1.0, 0.3)) <= 1e-12);
}

TEST_CASE("evolve validates the sample schedule") {
  const Domain d = make_domain(disc_spec(1.0, 1.0 / 16));
  const FlowParams p = make_params(2, 1.0, 0.0);
  EvolutionState st = make_state(bowl_field(d, 0.5), p);
  CHECK_THROWS_AS(evolve(st, p, -1.0, {}, {}), Error);
  CHECK_THROWS_AS(evolve(st, p, 1.0, {2.0}, {}), Error);
}
