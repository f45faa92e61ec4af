#pragma once

// Convex computational domains on a uniform grid: interior mask, cut-cell
// fractions toward the boundary for every stencil arm, boundary samples with
// outward normals, and the analytic area/diameter used by a priori bounds.
//
// The grid is symmetric about the origin so that centrally symmetric shapes
// have exactly symmetric masks.

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "gcf/errors.hpp"

namespace gcf {

enum class DomainKind { disc, ellipse, superellipse };

inline const char* to_string(DomainKind k) {
  switch (k) {
    case DomainKind::disc:         return "disc";
    case DomainKind::ellipse:      return "ellipse";
    case DomainKind::superellipse: return "superellipse";
  }
  return "?";
}

struct DomainSpec {
  DomainKind kind = DomainKind::disc;
  double a = 1.0;  // radius for disc, x semi-axis otherwise
  double b = 1.0;  // y semi-axis (ignored for disc)
  double p = 2.0;  // superellipse exponent, >= 2
  double h = 0.05;
};

struct BoundaryPoint {
  double x, y;      // point on the boundary curve
  double nux, nuy;  // outward unit normal
};

// Stencil arms for which cut fractions are precomputed. The first four are
// the axis directions; then the diagonals; then the two orthogonal pairs of
// width-2 directions used by the 4-rotation wide stencil.
inline constexpr std::array<std::array<int, 2>, 16> arm_offsets = {{
    {{1, 0}},  {{-1, 0}},  {{0, 1}},  {{0, -1}},
    {{1, 1}},  {{-1, -1}}, {{1, -1}}, {{-1, 1}},
    {{2, 1}},  {{-2, -1}}, {{-1, 2}}, {{1, -2}},
    {{1, 2}},  {{-1, -2}}, {{-2, 1}}, {{2, -1}},
}};
inline constexpr int kNumArms = 16;
// Axis arm indices.
inline constexpr int kArmE = 0, kArmW = 1, kArmN = 2, kArmS = 3;

inline int arm_index(int di, int dj) {
  for (int k = 0; k < kNumArms; ++k)
    if (arm_offsets[k][0] == di && arm_offsets[k][1] == dj) return k;
  fail(ErrorCode::DomainMismatch, "no such stencil arm");
}

class Domain {
 public:
  DomainSpec spec;
  int nx = 0, ny = 0;      // grid nodes per axis (odd; node (cx,cy) is the origin)
  int cx = 0, cy = 0;
  double xmin = 0, ymin = 0;
  double h = 0;
  double area = 0;         // analytic |Omega|
  double diameter = 0;     // analytic diam(Omega)
  std::vector<std::uint8_t> interior;        // nx*ny mask
  std::vector<int> interior_nodes;           // flattened ids, row-major order
  std::array<std::vector<double>, kNumArms> frac;  // cut fraction per arm, 1 = full
  std::vector<BoundaryPoint> boundary;

  int size() const { return nx * ny; }
  int id(int i, int j) const { return j * nx + i; }
  // (i - cx)*h is exactly antisymmetric under i -> 2cx - i, so centrally
  // symmetric shapes get bitwise symmetric masks, fractions and samples
  double x(int i) const { return (i - cx) * h; }
  double y(int j) const { return (j - cy) * h; }
  bool in_box(int i, int j) const { return i >= 0 && i < nx && j >= 0 && j < ny; }
  bool is_interior(int i, int j) const { return in_box(i, j) && interior[id(i, j)] != 0; }
  int interior_count() const { return static_cast<int>(interior_nodes.size()); }
  double grid_area() const { return interior_count() * h * h; }

  // Shape function: < 1 inside, = 1 on the boundary, > 1 outside.
  double level(double px, double py) const {
    const double ax = spec.a, ay = (spec.kind == DomainKind::disc) ? spec.a : spec.b;
    switch (spec.kind) {
      case DomainKind::disc:
      case DomainKind::ellipse: {
        const double u = px / ax, v = py / ay;
        return u * u + v * v;
      }
      case DomainKind::superellipse:
        return std::pow(std::abs(px / ax), spec.p) + std::pow(std::abs(py / ay), spec.p);
    }
    return 2.0;
  }

  // All catalog shapes are centrally symmetric about the origin.
  bool centrally_symmetric() const { return true; }
  int mirror_i(int i) const { return nx - 1 - i; }
  int mirror_j(int j) const { return ny - 1 - j; }

  // Strictly convex quadratic (or p-homogeneous) bump vanishing on the
  // boundary curve; used for convexification and initial bowls.
  double bowl(double px, double py) const { return level(px, py) - 1.0; }
};

namespace detail {

inline double boundary_crossing(const Domain& d, double px, double py, double dx, double dy) {
  // level(p) < 1, level(p + dx,dy) >= 1; convexity gives a single crossing.
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 64; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (d.level(px + mid * dx, py + mid * dy) < 1.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

inline Domain make_domain(const DomainSpec& spec) {
  if (!(spec.h > 0)) fail(ErrorCode::DegenerateGeometry, "grid spacing h must be positive");
  if (!(spec.a > 0) || !(spec.b > 0)) fail(ErrorCode::DegenerateGeometry, "semi-axes must be positive");
  if (spec.kind == DomainKind::superellipse && !(spec.p >= 2.0))
    fail(ErrorCode::DegenerateGeometry, "superellipse exponent p must be >= 2 for convexity");

  Domain d;
  d.spec = spec;
  d.h = spec.h;

  const double ax = spec.a;
  const double ay = (spec.kind == DomainKind::disc) ? spec.a : spec.b;

  const int mx = static_cast<int>(std::ceil(ax / spec.h)) + 2;
  const int my = static_cast<int>(std::ceil(ay / spec.h)) + 2;
  d.nx = 2 * mx + 1;
  d.ny = 2 * my + 1;
  d.cx = mx;
  d.cy = my;
  d.xmin = -mx * spec.h;
  d.ymin = -my * spec.h;

  d.interior.assign(static_cast<size_t>(d.nx) * d.ny, 0);
  for (int j = 0; j < d.ny; ++j)
    for (int i = 0; i < d.nx; ++i)
      if (d.level(d.x(i), d.y(j)) < 1.0) d.interior[d.id(i, j)] = 1;

  for (int j = 0; j < d.ny; ++j)
    for (int i = 0; i < d.nx; ++i)
      if (d.interior[d.id(i, j)]) d.interior_nodes.push_back(d.id(i, j));

  if (d.interior_count() < 9)
    fail(ErrorCode::DegenerateGeometry,
         "only " + std::to_string(d.interior_count()) + " interior nodes; refine h");

  for (int k = 0; k < kNumArms; ++k) d.frac[k].assign(d.interior.size(), 1.0);
  for (int node : d.interior_nodes) {
    const int i = node % d.nx, j = node / d.nx;
    for (int k = 0; k < kNumArms; ++k) {
      const int ti = i + arm_offsets[k][0], tj = j + arm_offsets[k][1];
      if (!d.is_interior(ti, tj)) {
        d.frac[k][node] = detail::boundary_crossing(
            d, d.x(i), d.y(j), arm_offsets[k][0] * spec.h, arm_offsets[k][1] * spec.h);
      }
    }
  }

  // Boundary samples with outward normals, parameter-uniform.
  const double per_scale = 2.0 * M_PI * std::max(ax, ay);
  const int m = std::max(64, static_cast<int>(std::ceil(per_scale / spec.h)));
  d.boundary.reserve(m);
  for (int k = 0; k < m; ++k) {
    const double t = 2.0 * M_PI * k / m;
    double bx, by;
    if (spec.kind == DomainKind::superellipse) {
      const double c = std::cos(t), s = std::sin(t);
      const double e = 2.0 / spec.p;
      bx = ax * std::copysign(std::pow(std::abs(c), e), c);
      by = ay * std::copysign(std::pow(std::abs(s), e), s);
    } else {
      bx = ax * std::cos(t);
      by = ay * std::sin(t);
    }
    double gx, gy;
    if (spec.kind == DomainKind::superellipse) {
      const double pexp = spec.p;
      gx = (pexp / ax) * std::copysign(std::pow(std::abs(bx / ax), pexp - 1.0), bx);
      gy = (pexp / ay) * std::copysign(std::pow(std::abs(by / ay), pexp - 1.0), by);
    } else {
      gx = 2.0 * bx / (ax * ax);
      gy = 2.0 * by / (ay * ay);
    }
    const double gn = std::hypot(gx, gy);
    d.boundary.push_back({bx, by, gx / gn, gy / gn});
  }

  switch (spec.kind) {
    case DomainKind::disc:
      d.area = M_PI * ax * ax;
      d.diameter = 2.0 * ax;
      break;
    case DomainKind::ellipse:
      d.area = M_PI * ax * ay;
      d.diameter = 2.0 * std::max(ax, ay);
      break;
    case DomainKind::superellipse: {
      const double g1 = std::tgamma(1.0 + 1.0 / spec.p);
      const double g2 = std::tgamma(1.0 + 2.0 / spec.p);
      d.area = 4.0 * ax * ay * g1 * g1 / g2;
      // farthest boundary point from the origin, dense scan + local refinement
      double best = 0.0;
      const int scan = 200000;
      for (int k = 0; k <= scan; ++k) {
        const double t = 0.5 * M_PI * k / scan;
        const double e = 2.0 / spec.p;
        const double px = ax * std::pow(std::cos(t), e);
        const double py = ay * std::pow(std::sin(t), e);
        best = std::max(best, px * px + py * py);
      }
      d.diameter = 2.0 * std::sqrt(best);
      break;
    }
  }
  return d;
}

inline DomainSpec disc_spec(double radius, double h) {
  return DomainSpec{DomainKind::disc, radius, radius, 2.0, h};
}
inline DomainSpec ellipse_spec(double a, double b, double h) {
  return DomainSpec{DomainKind::ellipse, a, b, 2.0, h};
}
inline DomainSpec superellipse_spec(double a, double b, double p, double h) {
  return DomainSpec{DomainKind::superellipse, a, b, p, h};
}

}  // namespace gcf
