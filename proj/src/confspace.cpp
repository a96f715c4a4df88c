#include "lpflow/confspace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "lpflow/error.hpp"

namespace lpflow {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880168872420969808;

void format_double(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

double min_pairwise_dist(const Surface& s, const Configuration& x) {
  const int n = x.n();
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      best = std::min(best, s.dist(x.points[i], x.points[j]));
  return best;
}

double diag_dist(const Surface& s, const Configuration& x) {
  if (x.n() < 2) return 1.0;
  const double m = min_pairwise_dist(s, x);
  if (m < kEpsilonSep)
    throw Error(ErrorKind::CoincidentPoints,
                "diag_dist: configuration points closer than the separation floor");
  return m / kSqrt2;
}

double gn_norm(const Surface& s, const Configuration& x, const ConfigTangent& v) {
  if (v.v.size() != x.points.size())
    throw Error(ErrorKind::InvalidArgument, "tangent size does not match configuration");
  double sum = 0.0;
  for (std::size_t i = 0; i < v.v.size(); ++i) {
    const double c = s.tangent_norm(x.points[i], v.v[i]);
    sum += c * c;
  }
  return std::sqrt(sum);
}

double gb_norm(const Surface& s, const Configuration& x, const ConfigTangent& v) {
  return gn_norm(s, x, v) / diag_dist(s, x);
}

double gn_step(const Surface& s, const Configuration& a, const Configuration& b) {
  if (a.points.size() != b.points.size())
    throw Error(ErrorKind::InvalidArgument, "configuration sizes differ");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    const double c = s.dist(a.points[i], b.points[i]);
    sum += c * c;
  }
  return std::sqrt(sum);
}

Configuration config_midpoint(const Surface& s, const Configuration& a,
                              const Configuration& b) {
  Configuration mid;
  mid.points.reserve(a.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i)
    mid.points.push_back(s.midpoint(a.points[i], b.points[i]));
  return mid;
}

double gb_length(const Surface& s, const ConfigPath& path) {
  return gb_length_detailed(s, path).length;
}

GbLengthEstimate gb_length_detailed(const Surface& s, const ConfigPath& path) {
  GbLengthEstimate est;
  for (std::size_t k = 0; k + 1 < path.configs.size(); ++k) {
    const Configuration& a = path.configs[k];
    const Configuration& b = path.configs[k + 1];
    const double step = gn_step(s, a, b);
    if (step == 0.0) continue;
    const double d_mid = diag_dist(s, config_midpoint(s, a, b));
    est.length += step / d_mid;
    const double d_a = diag_dist(s, a);
    const double d_b = diag_dist(s, b);
    const double d_lo = std::min({d_a, d_b, d_mid});
    const double d_hi = std::max({d_a, d_b, d_mid});
    est.error_estimate += 0.5 * step * (1.0 / d_lo - 1.0 / d_hi);
  }
  return est;
}

ConfigPath lift_trajectories(const Flow& flow, const Configuration& x0,
                             const LiftOptions& opts) {
  const Surface& s = flow.surface();
  if (x0.n() >= 2 && min_pairwise_dist(s, x0) < kEpsilonSep)
    throw Error(ErrorKind::CoincidentPoints, "lift_trajectories: start configuration too close to the diagonal");

  int steps = std::max(1, opts.initial_steps);
  while (true) {
    ConfigPath path;
    path.times.resize(steps + 1);
    path.configs.resize(steps + 1);
    path.configs[0] = x0;
    path.times[0] = 0.0;
    bool ok = true;
    for (int k = 1; k <= steps && ok; ++k) {
      const double t0 = static_cast<double>(k - 1) / steps;
      const double t1 = static_cast<double>(k) / steps;
      path.times[k] = t1;
      Configuration& cur = path.configs[k];
      cur.points.reserve(x0.points.size());
      for (const auto& p : path.configs[k - 1].points)
        cur.points.push_back(flow.advect(p, t0, t1));
      if (x0.n() >= 2) {
        const double sep = min_pairwise_dist(s, cur);
        if (sep < kEpsilonSep)
          throw Error(ErrorKind::CoincidentPoints,
                      "lift_trajectories: trajectories merged below the separation floor");
        const double bound =
            opts.step_ratio * std::min(diag_dist(s, path.configs[k - 1]), sep / kSqrt2);
        if (gn_step(s, path.configs[k - 1], cur) > bound) ok = false;
      }
    }
    if (ok) return path;
    if (steps >= opts.max_steps)
      throw Error(ErrorKind::CoincidentPoints,
                  "lift_trajectories: step bound unreachable at the maximum grid resolution");
    steps *= 2;
  }
}

EscapeReport escape_check(const Surface& s, const ConfigPath& path) {
  EscapeReport rep;
  if (path.configs.empty()) return rep;
  try {
    rep.d_start = diag_dist(s, path.configs.front());
    rep.d_end = rep.d_start;
    double ell = 0.0;
    double quad_err = 0.0;
    for (std::size_t k = 0; k + 1 < path.configs.size(); ++k) {
      const Configuration& a = path.configs[k];
      const Configuration& b = path.configs[k + 1];
      const double step = gn_step(s, a, b);
      double inc = 0.0;
      if (step > 0.0) {
        const double d_mid = diag_dist(s, config_midpoint(s, a, b));
        inc = step / d_mid;
        const double d_a = diag_dist(s, a), d_b = diag_dist(s, b);
        const double lo = std::min({d_a, d_b, d_mid}), hi = std::max({d_a, d_b, d_mid});
        quad_err += 0.5 * step * (1.0 / lo - 1.0 / hi);
      }
      if (ell + inc > 0.5) break;  // prefix of gb-length 1/2 fully checked
      ell += inc;
      rep.d_end = diag_dist(s, b);
      const double tol = 1e-6 + quad_err;
      if (rep.d_end < 0.5 * rep.d_start - tol) {
        rep.ell = ell;
        rep.ok = false;
        return rep;
      }
    }
    rep.ell = ell;
    rep.ok = true;
  } catch (const Error&) {
    rep.ok = false;  // separation collapse certainly violates the bound
  }
  return rep;
}

void write_path_csv(const Surface& s, const ConfigPath& path, std::ostream& out) {
  const int n = path.n();
  std::string line = "t";
  for (int i = 0; i < n; ++i) {
    line += ",x" + std::to_string(i) + ",y" + std::to_string(i);
  }
  line += ",d\n";
  out << line;
  for (std::size_t k = 0; k < path.configs.size(); ++k) {
    line.clear();
    format_double(line, path.times[k]);
    for (const auto& p : path.configs[k].points) {
      line += ',';
      format_double(line, p.x);
      line += ',';
      format_double(line, p.y);
    }
    line += ',';
    format_double(line, diag_dist(s, path.configs[k]));
    line += '\n';
    out << line;
  }
}

ConfigPath read_path_csv(std::istream& in) {
  ConfigPath path;
  std::string line;
  if (!std::getline(in, line))
    throw Error(ErrorKind::Io, "path CSV: empty input");
  // Header: t,x0,y0,...,d
  int cols = 1;
  for (char c : line)
    if (c == ',') ++cols;
  const int n = (cols - 2) / 2;
  if (n < 1 || cols != 2 + 2 * n)
    throw Error(ErrorKind::Io, "path CSV: malformed header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    if (static_cast<int>(vals.size()) != cols)
      throw Error(ErrorKind::Io, "path CSV: wrong column count in row");
    path.times.push_back(vals[0]);
    Configuration c;
    for (int i = 0; i < n; ++i)
      c.points.push_back({vals[1 + 2 * i], vals[2 + 2 * i], 0.0});
    path.configs.push_back(std::move(c));
  }
  if (path.configs.empty())
    throw Error(ErrorKind::Io, "path CSV: no rows");
  return path;
}

}  // namespace lpflow
