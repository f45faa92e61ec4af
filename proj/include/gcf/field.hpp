#pragma once

// Grid-sampled scalar function tied to a Domain. Values are stored for the
// full bounding box and are kept at zero outside the interior mask, which is
// exactly the Dirichlet condition for the solution fields u and psi.

#include <cmath>
#include <vector>

#include "gcf/domain.hpp"
#include "gcf/errors.hpp"

namespace gcf {

struct ScalarField {
  const Domain* dom = nullptr;  // non-owning; the domain outlives its fields
  double time = -1.0;           // -1 for static fields
  std::vector<double> v;

  ScalarField() = default;
  explicit ScalarField(const Domain& d, double t = -1.0)
      : dom(&d), time(t), v(static_cast<size_t>(d.size()), 0.0) {}

  double& at(int i, int j) { return v[dom->id(i, j)]; }
  double at(int i, int j) const { return v[dom->id(i, j)]; }

  template <class F>
  void fill(F&& f) {
    for (int node : dom->interior_nodes) {
      const int i = node % dom->nx, j = node / dom->nx;
      v[node] = f(dom->x(i), dom->y(j));
    }
  }

  double sup_abs() const {
    double m = 0.0;
    for (int node : dom->interior_nodes) m = std::max(m, std::abs(v[node]));
    return m;
  }

  double max_interior() const {
    double m = -1e300;
    for (int node : dom->interior_nodes) m = std::max(m, v[node]);
    return m;
  }
};

inline void require_same_domain(const ScalarField& a, const ScalarField& b) {
  if (a.dom != b.dom) fail(ErrorCode::DomainMismatch, "fields live on different domains");
}

// a + s*b on the interior
inline ScalarField axpy(const ScalarField& a, double s, const ScalarField& b) {
  require_same_domain(a, b);
  ScalarField out(*a.dom, a.time);
  for (int node : a.dom->interior_nodes) out.v[node] = a.v[node] + s * b.v[node];
  return out;
}

inline double sup_abs_diff(const ScalarField& a, const ScalarField& b) {
  require_same_domain(a, b);
  double m = 0.0;
  for (int node : a.dom->interior_nodes) m = std::max(m, std::abs(a.v[node] - b.v[node]));
  return m;
}

}  // namespace gcf
