#pragma once

// Exponents of the flow u_t = det(D^2 u)^alpha / (1 + |grad u|^2)^(alpha*beta)
// on a convex domain with zero boundary data, together with the derived
// separation constants of its self-similar solutions.

#include <cmath>
#include <string>

#include "gcf/errors.hpp"

namespace gcf {

struct FlowParams {
  int n = 2;             // spatial dimension
  double alpha = 1.0;    // curvature power, > 1/n
  double beta = 0.0;     // gradient damping exponent, >= 0
  double lambda = -1.0;  // 1/(1 - n*alpha), fixed normalization, < 0
  double gamma = 1.0;    // 1/(n*alpha - 1) = -lambda/( ... ) > 0, the rescaling exponent
};

inline FlowParams make_params(int n, double alpha, double beta) {
  if (n < 2) fail(ErrorCode::InvalidDimension, "n must be >= 2, got " + std::to_string(n));
  if (!(alpha > 1.0 / n))
    fail(ErrorCode::InvalidExponent,
         "alpha must exceed 1/n = " + std::to_string(1.0 / n) + ", got " + std::to_string(alpha));
  if (!(beta >= 0.0))
    fail(ErrorCode::InvalidExponent, "beta must be >= 0, got " + std::to_string(beta));
  FlowParams p;
  p.n = n;
  p.alpha = alpha;
  p.beta = beta;
  p.lambda = 1.0 / (1.0 - n * alpha);
  p.gamma = 1.0 / (n * alpha - 1.0);
  return p;
}

// beta for which the graph's normal speed equals K^alpha (K = Gauss curvature).
inline double geometric_beta(const FlowParams& p) {
  return (p.n + 2.0 - 1.0 / p.alpha) / 2.0;
}

}  // namespace gcf
