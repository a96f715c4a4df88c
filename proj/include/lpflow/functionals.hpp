#pragma once

#include <cstdint>
#include <functional>

#include "lpflow/confspace.hpp"
#include "lpflow/flows.hpp"
#include "lpflow/geometry.hpp"

namespace lpflow {

struct QuadratureSpec {
  int mc_samples = 4096;
  int time_steps = 128;
  std::uint64_t seed = 1;

  void validate() const;  // mc_samples >= 100, time_steps >= 10
};

struct NormEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

using VectorField = std::function<TangentVector(const SurfacePoint&)>;

// ||X||_p = (integral of |X|^p over the unit-area measure)^(1/p), by Monte
// Carlo; the standard error is propagated through the p-th root.
NormEstimate lp_field_norm(const Surface& s, const VectorField& field, double p,
                           const QuadratureSpec& q);

// l_p of an isotopy: trapezoid over time of the L^p norm of the velocity
// along advected samples. For p = 1 this is the area-average of trajectory
// lengths, and the standard error is the clean per-sample one.
NormEstimate lp_isotopy_length(const Flow& flow, double p, const QuadratureSpec& q);

// sup over base points of the integral of 1 / dist(p, x) over the surface.
// The singular region within one tenth of the diameter of the base point is
// integrated by polar stratification, where the integrand is bounded.
double cprime_estimate(const Surface& s, int grid, const QuadratureSpec& q);

// sqrt(2) (n-1) C' + n (n-1) / sqrt(2) C'.
double lipschitz_constant(int n, double cprime);

struct ProductL1Result {
  NormEstimate estimate;
  long long rejected_samples = 0;  // start configurations resampled off the diagonal
};

// L^1 length of the lifted isotopy on the n-point configuration space,
// measured with the rescaled-metric norm against the product measure:
// Monte Carlo over product-sampled start configurations of the gb-length of
// lifted trajectories.
ProductL1Result product_l1_length(const Flow& flow, int n, const QuadratureSpec& q);

struct EmbeddingReport {
  double lhs = 0.0;        // product L1 length of the lifted isotopy
  double lhs_sigma = 0.0;
  double l1 = 0.0;         // L1 length of the flow itself
  double l1_sigma = 0.0;
  double cprime = 0.0;
  double lipschitz = 0.0;  // C = lipschitz_constant(n, cprime)
  double rhs = 0.0;        // C * l1
  double sigma = 0.0;      // combined
  bool ok = false;         // lhs <= rhs + 3 sigma
  long long rejected_samples = 0;
};

// Checks the Lipschitz embedding inequality l1(f_*) <= C l1(f) numerically.
EmbeddingReport embedding_ratio(const Flow& flow, int n, const QuadratureSpec& q);

}  // namespace lpflow
