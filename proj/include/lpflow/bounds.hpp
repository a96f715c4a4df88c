#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lpflow/braids.hpp"
#include "lpflow/functionals.hpp"

namespace lpflow {

// U = U_1 x ... x U_n: disjoint discs of common radius rho around the centers.
struct ProductNeighborhood {
  std::vector<SurfacePoint> centers;
  double rho = 0.02;

  int n() const { return static_cast<int>(centers.size()); }
  double mu() const;  // product measure (pi rho^2)^n
  double min_center_dist(const Surface& s) const;
  // Discs must be disjoint (s_min > 2 rho) and, on the disc surface, inside
  // the boundary collar.
  void validate(const Surface& s) const;
};

// Upper bound for the gb-diameter of U via straight chart paths:
// 2 rho sqrt(n) * sqrt(2) / (s_min - 2 rho).
double diam_gb_upper(const Surface& s, const ProductNeighborhood& u);

struct BoundReport {
  std::string surface;
  int n = 0;
  double rho = 0.0;
  double s_min = 0.0;
  double tube_radius = 0.0;
  bool full_twist_applied = false;
  WindingMatrix winding;
  double lh_lower_value = 0.0;
  long long center_shift = 0;
  double diam_upper = 0.0;
  double mu = 0.0;
  double cprime = 0.0;
  double lipschitz = 0.0;
  double lower = 0.0;        // max(0, mu (L_h - 2 diam) / C)
  double upper = 0.0;        // measured l1 of the constructed isotopy
  double upper_sigma = 0.0;
  std::uint64_t seed = 0;
  int mc_samples = 0;
  int time_steps = 0;

  std::string to_json_string() const;
};

struct AssembleOptions {
  QuadratureSpec quad;
  double tube_radius = 0.0;       // 0: 2.5 * rho
  int moving_point = 0;           // which center gamma starts from
  bool multiply_full_twist = false;
  double cprime = 0.0;            // 0: estimate (grid 25)
};

// The certified two-sided estimate for the braid realized by pushing the
// moving center along gamma: lower bound mu(U)(L_h - 2 diam U)/C against the
// measured l1 of the explicit finger-push isotopy.
BoundReport assemble_bound(const Surface& s, const ProductNeighborhood& u,
                           const Polyline& gamma, const AssembleOptions& opts);

// Loop from `from`: straight stem to a circle of the given radius around
// `around`, `turns` full turns, stem back. Repeat passes reuse identical
// vertices so the tube checks identify them as one strand.
Polyline encircling_loop(const SurfacePoint& from, const SurfacePoint& around,
                         double radius, int turns, int segments_per_turn = 48);

struct GrowthRow {
  int k = 0;
  double lh_lower = 0.0;
  double diam_upper = 0.0;
  double mu = 0.0;
  double lipschitz = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double sigma = 0.0;
};

struct GrowthOptions {
  int n = 4;
  double square_side = 0.3;
  double rho = 0.02;
  double loop_radius = 0.1;
  double tube_radius = 0.05;
  int segments_per_turn = 48;
};

struct GrowthResult {
  std::vector<GrowthRow> rows;
  ProductNeighborhood neighborhood;
  double cprime = 0.0;
  // Fit of lower against ceil(k/2) over the rows with positive lower bound.
  double slope = 0.0;
  double r_squared = 0.0;
  std::uint64_t seed = 0;
  int mc_samples = 0;
  int time_steps = 0;

  std::string to_csv_string() const;
  std::string manifest_json_string() const;
};

// k-fold encircling braids on the disc for k = 1..k_max; the numerical shadow
// of the unbounded-length family.
GrowthResult growth_experiment(int k_max, const QuadratureSpec& q,
                               const GrowthOptions& opts = {});

}  // namespace lpflow
