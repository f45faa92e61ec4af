#pragma once

// Experiment configuration: flat key-value text with [section] headers,
// parsed strictly (unknown keys are errors naming the key) and serializable
// back to an identical structure.

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gcf/domain.hpp"
#include "gcf/errors.hpp"
#include "gcf/operators.hpp"
#include "gcf/params.hpp"

namespace gcf {

enum class InitialKind { profile_multiple, bowl, asym_bowl };

inline const char* to_string(InitialKind k) {
  switch (k) {
    case InitialKind::profile_multiple: return "profile_multiple";
    case InitialKind::bowl: return "bowl";
    case InitialKind::asym_bowl: return "asym_bowl";
  }
  return "?";
}

struct ExperimentConfig {
  // [params]
  int n = 2;
  double alpha = 1.0;
  double beta = 0.0;
  bool beta_geometric = false;  // beta = geometric
  // [domain]
  DomainSpec domain{DomainKind::disc, 1.0, 1.0, 2.0, 0.015625};
  // [initial]
  InitialKind initial = InitialKind::profile_multiple;
  double initial_c = 1.0;
  double initial_offset = 0.0;
  // [time]
  double t_end = 7.0;
  bool dyadic_samples = false;  // t_m = 2^m - 1 up to t_end
  std::vector<double> samples = {1.0, 3.0, 7.0};
  // [scheme]
  Scheme scheme = Scheme::standard9;
  int ws_rotations = 4;
  double det_floor = 1e-12;
  double cfl = 0.45;
  // [tolerances]
  double profile_tol = 1e-6;
  double convexity_tol = 1e-3;
  double rate_window_lo = 3.0;
  // [output]
  std::string out_dir = "out";
  unsigned long long seed = 20240601;
  int threads = 1;
  double snapshot_every = 0.0;
  // [lemma]
  long lemma_count = 100000;

  FlowParams make_flow_params() const {
    FlowParams p = make_params(n, alpha, beta_geometric ? 0.0 : beta);
    if (beta_geometric) p.beta = geometric_beta(p);
    return p;
  }

  std::vector<double> sample_schedule() const {
    if (!dyadic_samples) return samples;
    std::vector<double> out;
    for (double tm = 1.0; tm <= t_end + 1e-12; tm = 2.0 * tm + 1.0) out.push_back(tm);
    return out;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_num(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    fail(ErrorCode::ConfigError, "key '" + key + "': cannot parse number from '" + v + "'");
  }
}

}  // namespace detail

inline ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        fail(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": bad section header");
      section = line.substr(1, line.size() - 2);
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    const std::string skey = section + "." + key;

    if (skey == "params.n") c.n = static_cast<int>(detail::parse_num(skey, val));
    else if (skey == "params.alpha") c.alpha = detail::parse_num(skey, val);
    else if (skey == "params.beta") {
      if (val == "geometric") { c.beta_geometric = true; c.beta = 0.0; }
      else { c.beta_geometric = false; c.beta = detail::parse_num(skey, val); }
    }
    else if (skey == "domain.kind") {
      if (val == "disc") c.domain.kind = DomainKind::disc;
      else if (val == "ellipse") c.domain.kind = DomainKind::ellipse;
      else if (val == "superellipse") c.domain.kind = DomainKind::superellipse;
      else fail(ErrorCode::ConfigError, "key 'domain.kind': unknown kind '" + val + "'");
    }
    else if (skey == "domain.radius" || skey == "domain.a") c.domain.a = detail::parse_num(skey, val);
    else if (skey == "domain.b") c.domain.b = detail::parse_num(skey, val);
    else if (skey == "domain.p") c.domain.p = detail::parse_num(skey, val);
    else if (skey == "domain.h") c.domain.h = detail::parse_num(skey, val);
    else if (skey == "initial.kind") {
      if (val == "profile_multiple") c.initial = InitialKind::profile_multiple;
      else if (val == "bowl") c.initial = InitialKind::bowl;
      else if (val == "asym_bowl") c.initial = InitialKind::asym_bowl;
      else fail(ErrorCode::ConfigError, "key 'initial.kind': unknown kind '" + val + "'");
    }
    else if (skey == "initial.c") c.initial_c = detail::parse_num(skey, val);
    else if (skey == "initial.offset") c.initial_offset = detail::parse_num(skey, val);
    else if (skey == "time.t_end") c.t_end = detail::parse_num(skey, val);
    else if (skey == "time.samples") {
      if (val == "dyadic") { c.dyadic_samples = true; c.samples.clear(); }
      else {
        c.dyadic_samples = false;
        c.samples.clear();
        std::istringstream ss(val);
        std::string tok;
        while (std::getline(ss, tok, ','))
          c.samples.push_back(detail::parse_num(skey, detail::trim(tok)));
      }
    }
    else if (skey == "scheme.operator") {
      if (val == "standard9") c.scheme = Scheme::standard9;
      else if (val == "monotone_ws") c.scheme = Scheme::monotone_ws;
      else fail(ErrorCode::ConfigError, "key 'scheme.operator': unknown scheme '" + val + "'");
    }
    else if (skey == "scheme.ws_rotations") {
      c.ws_rotations = static_cast<int>(detail::parse_num(skey, val));
      if (c.ws_rotations != 2 && c.ws_rotations != 4)
        fail(ErrorCode::ConfigError, "key 'scheme.ws_rotations': must be 2 or 4");
    }
    else if (skey == "scheme.det_floor") {
      c.det_floor = detail::parse_num(skey, val);
      if (!(c.det_floor > 0.0))
        fail(ErrorCode::ConfigError, "key 'scheme.det_floor': must be positive");
    }
    else if (skey == "scheme.cfl") c.cfl = detail::parse_num(skey, val);
    else if (skey == "tolerances.profile_tol") c.profile_tol = detail::parse_num(skey, val);
    else if (skey == "tolerances.convexity_tol") c.convexity_tol = detail::parse_num(skey, val);
    else if (skey == "tolerances.rate_window_lo") c.rate_window_lo = detail::parse_num(skey, val);
    else if (skey == "output.dir") c.out_dir = val;
    else if (skey == "output.seed") c.seed = static_cast<unsigned long long>(detail::parse_num(skey, val));
    else if (skey == "output.threads") c.threads = static_cast<int>(detail::parse_num(skey, val));
    else if (skey == "output.snapshot_every") c.snapshot_every = detail::parse_num(skey, val);
    else if (skey == "lemma.count") c.lemma_count = static_cast<long>(detail::parse_num(skey, val));
    else fail(ErrorCode::ConfigError, "unknown key '" + key + "' in section [" + section + "]");
  }
  return c;
}

inline std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << "[params]\n"
     << "n = " << c.n << "\n"
     << "alpha = " << c.alpha << "\n"
     << "beta = ";
  if (c.beta_geometric)
    os << "geometric";
  else
    os << c.beta;
  os << "\n";
  os << "\n[domain]\n"
     << "kind = " << to_string(c.domain.kind) << "\n"
     << "a = " << c.domain.a << "\n"
     << "b = " << c.domain.b << "\n"
     << "p = " << c.domain.p << "\n"
     << "h = " << c.domain.h << "\n";
  os << "\n[initial]\n"
     << "kind = " << to_string(c.initial) << "\n"
     << "c = " << c.initial_c << "\n"
     << "offset = " << c.initial_offset << "\n";
  os << "\n[time]\n"
     << "t_end = " << c.t_end << "\n"
     << "samples = ";
  if (c.dyadic_samples) os << "dyadic";
  else
    for (size_t k = 0; k < c.samples.size(); ++k) os << (k ? "," : "") << c.samples[k];
  os << "\n";
  os << "\n[scheme]\n"
     << "operator = " << to_string(c.scheme) << "\n"
     << "ws_rotations = " << c.ws_rotations << "\n"
     << "det_floor = " << c.det_floor << "\n"
     << "cfl = " << c.cfl << "\n";
  os << "\n[tolerances]\n"
     << "profile_tol = " << c.profile_tol << "\n"
     << "convexity_tol = " << c.convexity_tol << "\n"
     << "rate_window_lo = " << c.rate_window_lo << "\n";
  os << "\n[output]\n"
     << "dir = " << c.out_dir << "\n"
     << "seed = " << c.seed << "\n"
     << "threads = " << c.threads << "\n"
     << "snapshot_every = " << c.snapshot_every << "\n";
  os << "\n[lemma]\n"
     << "count = " << c.lemma_count << "\n";
  return os.str();
}

}  // namespace gcf
