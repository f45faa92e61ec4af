#pragma once

// Closed-form algebra of the self-similar solutions u(x,t) = phi(t) psi(x):
// the time factor phi, the rescaling identity mapping one self-similar
// solution onto another, and the elementary bounds on
// F(s,t) = ((1+t)/(s+t))^(1/(n*alpha-1)) that drive the rate estimates.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "gcf/errors.hpp"
#include "gcf/params.hpp"

namespace gcf {

struct SelfSimilarLaw {
  double phi0 = 1.0;
  FlowParams params;
};

// phi(t) = (phi0^(1-n*alpha) + t)^(1/(1-n*alpha)), the amplitude law under
// the fixed normalization lambda = 1/(1-n*alpha).
inline double phi(const SelfSimilarLaw& law, double t) {
  const double e = 1.0 - law.params.n * law.params.alpha;
  return std::pow(std::pow(law.phi0, e) + t, 1.0 / e);
}

// Multiplier turning the phi0-normalized solution into the one with
// profile c*psi: u~ = u * ((1+t)/((c*phi0)^(1-n*alpha)+t))^(1/(n*alpha-1)).
inline double rescale_identity(double u_value, double t, double c, double phi0,
                               const FlowParams& p) {
  const double e = 1.0 - p.n * p.alpha;
  return u_value * std::pow((1.0 + t) / (std::pow(c * phi0, e) + t), p.gamma);
}

inline double F(double s, double t, const FlowParams& p) {
  return std::pow((1.0 + t) / (s + t), p.gamma);
}

struct FBound {
  enum Case { F1, F2, F3, F4 } which;
  double bound;
  bool upper;  // true: F <= bound, false: F >= bound
};

inline const char* to_string(FBound::Case c) {
  switch (c) {
    case FBound::F1: return "F1";
    case FBound::F2: return "F2";
    case FBound::F3: return "F3";
    case FBound::F4: return "F4";
  }
  return "?";
}

// The applicable elementary bounds; both branches apply at alpha == 2/n.
inline std::vector<FBound> lemma_f_bounds(double s, double t, const FlowParams& p) {
  if (!(s > 0.0) || !(t >= 0.0))
    fail(ErrorCode::CaseUndefined, "require s > 0 and t >= 0");
  const double g = p.gamma;
  const double a2n = 2.0 / p.n;
  std::vector<FBound> out;
  if (s <= 1.0) {
    if (p.alpha >= a2n)
      out.push_back({FBound::F1, 1.0 + g * (1.0 - s) / (s * (1.0 + t)), true});
    if (p.alpha <= a2n)
      out.push_back({FBound::F2, 1.0 + g * std::pow(s, -g) * (1.0 - s) / (1.0 + t), true});
  }
  if (s >= 1.0) {
    if (p.alpha >= a2n) out.push_back({FBound::F3, 1.0 - (s - 1.0) / (1.0 + t), false});
    if (p.alpha <= a2n) out.push_back({FBound::F4, 1.0 - g * (s - 1.0) / (1.0 + t), false});
  }
  if (out.empty()) fail(ErrorCode::CaseUndefined, "no branch matched");
  return out;
}

struct FCheckRow {
  double s, t, alpha;
  double f;       // F(s,t), clamped to 1e300 on overflow
  double bound;   // clamped likewise
  FBound::Case which;
  bool holds;
  double margin;  // slack on the satisfied side, clamped
};

namespace detail {

inline double clamp300(double x) {
  if (x > 1e300) return 1e300;
  if (x < -1e300) return -1e300;
  return x;
}

}  // namespace detail

// Overflow-safe verification of every applicable bound at (s,t,alpha). The
// F2 branch can exceed double range for alpha near 1/n, so upper bounds are
// compared in log space.
inline std::vector<FCheckRow> check_lemma_f(double s, double t, const FlowParams& p) {
  const double g = p.gamma;
  const double logF = g * (std::log1p(t) - std::log(s + t));
  const double f_lin = (logF < 690.0) ? std::exp(logF) : 1e300;
  std::vector<FCheckRow> rows;
  for (const FBound& b : lemma_f_bounds(s, t, p)) {
    FCheckRow r{s, t, p.alpha, detail::clamp300(f_lin), 0.0, b.which, false, 0.0};
    if (b.upper) {
      double logB;
      if (b.which == FBound::F2 && s < 1.0) {
        // log(1 + g*s^-g*(1-s)/(1+t)) without forming the inner product
        const double A = std::log(g) - g * std::log(s) + std::log1p(-s) - std::log1p(t);
        logB = (A > 40.0) ? A + std::log1p(std::exp(-A)) : std::log1p(std::exp(A));
      } else {
        logB = std::log(b.bound);
      }
      r.bound = detail::clamp300((logB < 690.0) ? std::exp(logB) : 1e300);
      r.holds = logF <= logB * (1.0 + 1e-15) + 1e-15;
      r.margin = detail::clamp300(r.bound - r.f);
    } else {
      r.bound = detail::clamp300(b.bound);
      r.holds = f_lin >= b.bound - 1e-15;
      r.margin = detail::clamp300(f_lin - b.bound);
    }
    rows.push_back(r);
  }
  return rows;
}

struct LemmaSweepResult {
  std::vector<FCheckRow> rows;
  long violations = 0;
  double min_margin = 1e300;
};

namespace detail {

inline double u64_to_unit(std::uint64_t x) { return (x >> 11) * 0x1.0p-53; }  // [0,1)

}  // namespace detail

// Randomized soundness sweep over s in (0,10], t in [0,1000],
// alpha in (1/n,10]; deterministic for a fixed seed.
inline LemmaSweepResult run_lemma_sweep(int n, long count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  LemmaSweepResult res;
  res.rows.reserve(static_cast<size_t>(count));
  for (long k = 0; k < count; ++k) {
    const double s = 10.0 * (1.0 - detail::u64_to_unit(rng()));
    const double t = 1000.0 * detail::u64_to_unit(rng());
    const double alpha = 1.0 / n + (10.0 - 1.0 / n) * (1.0 - detail::u64_to_unit(rng()));
    const FlowParams p = make_params(n, alpha, 0.0);
    for (const FCheckRow& r : check_lemma_f(s, t, p)) {
      if (!r.holds) ++res.violations;
      res.min_margin = std::min(res.min_margin, r.margin);
      res.rows.push_back(r);
    }
  }
  return res;
}

}  // namespace gcf
