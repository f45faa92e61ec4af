#pragma once

// CSV persistence: field snapshots, domain masks, trajectory diagnostics,
// radial oracle tables and the lemma sweep. Values are written with 17
// significant digits so binary64 round-trips exactly; writes go through a
// temp file and rename.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gcf/analysis.hpp"
#include "gcf/field.hpp"
#include "gcf/radial.hpp"
#include "gcf/selfsim.hpp"

namespace gcf {

inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot open " + tmp);
    out << content;
    if (!out) fail(ErrorCode::IoError, "short write to " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::IoError, "rename to " + path + ": " + ec.message());
}

inline std::string field_header(const ScalarField& f, const FlowParams* p) {
  const Domain& d = *f.dom;
  std::ostringstream os;
  os << "# gcf field\n";
  if (p)
    os << "# n=" << p->n << " alpha=" << fmt17(p->alpha) << " beta=" << fmt17(p->beta) << "\n";
  os << "# kind=" << to_string(d.spec.kind) << " a=" << fmt17(d.spec.a)
     << " b=" << fmt17(d.spec.b) << " p=" << fmt17(d.spec.p) << " h=" << fmt17(d.h) << "\n";
  os << "# t=" << fmt17(f.time) << "\n";
  return os.str();
}

// rows i,j,x,y,value for interior nodes and their boundary neighbors
inline void write_field_csv(const std::string& path, const ScalarField& f,
                            const FlowParams* p = nullptr) {
  const Domain& d = *f.dom;
  std::ostringstream os;
  os << field_header(f, p) << "i,j,x,y,value\n";
  for (int j = 0; j < d.ny; ++j)
    for (int i = 0; i < d.nx; ++i) {
      const int node = d.id(i, j);
      bool emit = d.interior[node] != 0;
      if (!emit) {  // boundary ring: any axis neighbor interior
        emit = d.is_interior(i + 1, j) || d.is_interior(i - 1, j) || d.is_interior(i, j + 1) ||
               d.is_interior(i, j - 1);
      }
      if (emit)
        os << i << ',' << j << ',' << fmt17(d.x(i)) << ',' << fmt17(d.y(j)) << ','
           << fmt17(f.v[node]) << '\n';
    }
  atomic_write(path, os.str());
}

// reads a field written by write_field_csv back onto the same domain
inline ScalarField read_field_csv(const std::string& path, const Domain& d) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  ScalarField f(d);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') {
      if (line.rfind("# t=", 0) == 0) f.time = std::stod(line.substr(4));
      continue;
    }
    if (line.rfind("i,j", 0) == 0) continue;
    int i, j;
    double x, y, val;
    if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf,%lf", &i, &j, &x, &y, &val) != 5)
      fail(ErrorCode::IoError, "bad row in " + path + ": " + line);
    if (!d.in_box(i, j)) fail(ErrorCode::IoError, "row outside grid in " + path);
    f.v[d.id(i, j)] = val;
  }
  return f;
}

inline void write_domain_csv(const std::string& path, const Domain& d) {
  std::ostringstream os;
  os << "# gcf domain mask\n";
  os << "# kind=" << to_string(d.spec.kind) << " a=" << fmt17(d.spec.a)
     << " b=" << fmt17(d.spec.b) << " p=" << fmt17(d.spec.p) << " h=" << fmt17(d.h) << "\n";
  os << "i,j,x,y,interior\n";
  for (int j = 0; j < d.ny; ++j)
    for (int i = 0; i < d.nx; ++i)
      os << i << ',' << j << ',' << fmt17(d.x(i)) << ',' << fmt17(d.y(j)) << ','
         << int(d.interior[d.id(i, j)]) << '\n';
  atomic_write(path, os.str());
}

inline void write_trajectory_csv(const std::string& path, const RateSeries& s) {
  std::ostringstream os;
  os << "t,sup_abs_u,grad_sup,deviation_sup,symmetry_defect,G_current,injected_mu\n";
  for (const RateSample& r : s.samples)
    os << fmt17(r.t) << ',' << fmt17(r.sup_abs_u) << ',' << fmt17(r.grad_sup) << ','
       << fmt17(r.deviation_sup) << ',' << fmt17(r.symmetry_defect) << ','
       << fmt17(r.G_current) << ',' << fmt17(r.injected_mu) << '\n';
  atomic_write(path, os.str());
}

inline void write_radial_csv(const std::string& path, const RadialProfile& p) {
  std::ostringstream os;
  os << "r,psi\n";
  for (size_t k = 0; k < p.r.size(); ++k)
    os << fmt17(p.r[k]) << ',' << fmt17(p.psi[k]) << '\n';
  atomic_write(path, os.str());
}

inline void write_lemma_csv(const std::string& path, const LemmaSweepResult& res) {
  std::ostringstream os;
  os << "s,t,alpha,F,bound,case,margin\n";
  for (const FCheckRow& r : res.rows)
    os << fmt17(r.s) << ',' << fmt17(r.t) << ',' << fmt17(r.alpha) << ',' << fmt17(r.f) << ','
       << fmt17(r.bound) << ',' << to_string(r.which) << ',' << fmt17(r.margin) << '\n';
  atomic_write(path, os.str());
}

}  // namespace gcf
