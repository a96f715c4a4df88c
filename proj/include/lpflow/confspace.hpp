#pragma once

#include <iosfwd>
#include <vector>

#include "lpflow/flows.hpp"
#include "lpflow/geometry.hpp"

namespace lpflow {

// Ordered tuple of pairwise-distinct surface points.
struct Configuration {
  std::vector<SurfacePoint> points;
  int n() const { return static_cast<int>(points.size()); }
};

// One tangent vector per configuration point.
struct ConfigTangent {
  std::vector<TangentVector> v;
};

// Configurations on a uniform time grid over [0, 1].
struct ConfigPath {
  std::vector<double> times;
  std::vector<Configuration> configs;

  int n() const { return configs.empty() ? 0 : configs.front().n(); }
  std::size_t steps() const { return configs.empty() ? 0 : configs.size() - 1; }
};

// Operations that divide by the diagonal distance refuse configurations closer
// to the diagonal than this.
inline constexpr double kEpsilonSep = 1e-9;

double min_pairwise_dist(const Surface& s, const Configuration& x);

// d(x) = (1/sqrt 2) min pairwise distance: the product-metric distance from x
// to the big diagonal. By convention d = 1 for n = 1.
double diag_dist(const Surface& s, const Configuration& x);

// Product-metric norm sqrt(sum |v_i|^2).
double gn_norm(const Surface& s, const Configuration& x, const ConfigTangent& v);

// |v|_gn / d(x).
double gb_norm(const Surface& s, const Configuration& x, const ConfigTangent& v);

// Product-metric displacement between consecutive configurations.
double gn_step(const Surface& s, const Configuration& a, const Configuration& b);

Configuration config_midpoint(const Surface& s, const Configuration& a,
                              const Configuration& b);

// Midpoint-rule polyline length in the rescaled metric:
// sum |dx|_gn / d(midpoint). The metric is only continuous, so higher-order
// quadrature buys nothing here.
double gb_length(const Surface& s, const ConfigPath& path);

struct GbLengthEstimate {
  double length = 0.0;
  double error_estimate = 0.0;  // crude per-step midpoint-rule bound
};
GbLengthEstimate gb_length_detailed(const Surface& s, const ConfigPath& path);

struct LiftOptions {
  int initial_steps = 256;
  int max_steps = 1 << 17;
  double step_ratio = 0.1;  // per-step gn displacement <= step_ratio * d(x)
};

// Component-wise advection of x0 on a shared uniform grid, refined (by
// doubling) until every step moves less than step_ratio times the local
// diagonal distance. Raises CoincidentPoints if separation collapses.
ConfigPath lift_trajectories(const Flow& flow, const Configuration& x0,
                             const LiftOptions& opts = {});

struct EscapeReport {
  double ell = 0.0;      // gb-length of the checked prefix (truncated at 1/2)
  double d_start = 0.0;
  double d_end = 0.0;
  bool ok = true;
};

// Checks the completeness escape bound: along any prefix of gb-length <= 1/2,
// the diagonal distance stays above half its initial value. Reports, never
// throws.
EscapeReport escape_check(const Surface& s, const ConfigPath& path);

// CSV with columns t, x_i, y_i per point, and d(x_t).
void write_path_csv(const Surface& s, const ConfigPath& path, std::ostream& out);
ConfigPath read_path_csv(std::istream& in);

}  // namespace lpflow
