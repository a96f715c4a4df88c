#include "lpflow/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "lpflow/error.hpp"

namespace lpflow {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kGoldenAngle = 2.39996322972865332;

// Compensated summation keeps reduction drift below 1e-12 over long streams.
struct KahanSum {
  double sum = 0.0;
  double c = 0.0;
  void add(double v) {
    const double y = v - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

struct MeanAccumulator {
  KahanSum sum, sum_sq;
  long long count = 0;
  void add(double v) {
    sum.add(v);
    sum_sq.add(v * v);
    ++count;
  }
  double mean() const { return count ? sum.sum / count : 0.0; }
  double std_error() const {
    if (count < 2) return 0.0;
    const double m = mean();
    const double var = std::max(0.0, (sum_sq.sum - count * m * m) / (count - 1));
    return std::sqrt(var / count);
  }
};

// Jittered-grid start points: uniform for the area measure, with the smooth
// part of the variance removed by stratification.
std::vector<SurfacePoint> stratified_samples(const Surface& s, int count, Rng& rng) {
  const int m = std::max(4, static_cast<int>(std::floor(std::sqrt(static_cast<double>(count)))));
  std::vector<SurfacePoint> pts;
  pts.reserve(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      switch (s.kind()) {
        case SurfaceKind::FlatTorus:
          pts.push_back({(i + rng.uniform()) / m, (j + rng.uniform()) / m, 0.0});
          break;
        case SurfaceKind::UnitAreaDisc: {
          const double u = (i + rng.uniform()) / m;
          const double theta = kTwoPi * (j + rng.uniform()) / m;
          const double r = s.radius() * std::sqrt(u);
          pts.push_back({r * std::cos(theta), r * std::sin(theta), 0.0});
          break;
        }
        case SurfaceKind::RoundSphere: {
          const double R = s.radius();
          const double z = -R + 2.0 * R * (i + rng.uniform()) / m;
          const double theta = kTwoPi * (j + rng.uniform()) / m;
          const double r2 = std::sqrt(std::max(0.0, R * R - z * z));
          pts.push_back({r2 * std::cos(theta), r2 * std::sin(theta), z});
          break;
        }
      }
    }
  }
  return pts;
}

std::vector<SurfacePoint> base_point_grid(const Surface& s, int grid) {
  std::vector<SurfacePoint> pts;
  switch (s.kind()) {
    case SurfaceKind::UnitAreaDisc: {
      // Sunflower layout; the first point sits at the center, where the
      // integral is largest.
      const double R = s.radius();
      for (int k = 0; k < grid; ++k) {
        const double r = R * std::sqrt(static_cast<double>(k) / grid);
        const double theta = k * kGoldenAngle;
        pts.push_back({r * std::cos(theta), r * std::sin(theta), 0.0});
      }
      break;
    }
    case SurfaceKind::FlatTorus: {
      const int m = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(grid))));
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          pts.push_back({(i + 0.5) / m, (j + 0.5) / m, 0.0});
      break;
    }
    case SurfaceKind::RoundSphere: {
      const double R = s.radius();
      for (int k = 0; k < grid; ++k) {
        const double z = R * (1.0 - 2.0 * (k + 0.5) / grid);
        const double rho = std::sqrt(std::max(0.0, R * R - z * z));
        const double theta = k * kGoldenAngle;
        pts.push_back({rho * std::cos(theta), rho * std::sin(theta), z});
      }
      break;
    }
  }
  return pts;
}

}  // namespace

void QuadratureSpec::validate() const {
  if (mc_samples < 100)
    throw Error(ErrorKind::InvalidArgument, "quadrature: mc_samples must be at least 100");
  if (time_steps < 10)
    throw Error(ErrorKind::InvalidArgument, "quadrature: time_steps must be at least 10");
}

NormEstimate lp_field_norm(const Surface& s, const VectorField& field, double p,
                           const QuadratureSpec& q) {
  if (p < 1.0) throw Error(ErrorKind::InvalidArgument, "lp_field_norm requires p >= 1");
  q.validate();
  Rng rng = Rng(q.seed).fork(0x11);
  MeanAccumulator acc;
  for (const SurfacePoint& x : stratified_samples(s, q.mc_samples, rng)) {
    const double norm = s.tangent_norm(x, field(x));
    acc.add(p == 1.0 ? norm : std::pow(norm, p));
  }
  const double m = acc.mean();
  NormEstimate est;
  if (p == 1.0) {
    est.value = m;
    est.std_error = acc.std_error();
  } else if (m > 0.0) {
    est.value = std::pow(m, 1.0 / p);
    est.std_error = acc.std_error() * std::pow(m, 1.0 / p - 1.0) / p;
  }
  return est;
}

NormEstimate lp_isotopy_length(const Flow& flow, double p, const QuadratureSpec& q) {
  if (p < 1.0) throw Error(ErrorKind::InvalidArgument, "lp_isotopy_length requires p >= 1");
  q.validate();
  const Surface& s = flow.surface();
  const int T = q.time_steps;
  const double dt = 1.0 / T;
  Rng rng = Rng(q.seed).fork(0x22);

  NormEstimate est;
  if (p == 1.0) {
    // Fubini form: the area-average of trajectory lengths, with the length
    // accumulated at integrator resolution.
    MeanAccumulator per_sample;
    for (const SurfacePoint& x : stratified_samples(s, q.mc_samples, rng))
      per_sample.add(flow.advect_with_length(x, 0.0, 1.0).length);
    est.value = per_sample.mean();
    est.std_error = per_sample.std_error();
    return est;
  }

  std::vector<MeanAccumulator> per_node(T + 1);  // |v|^p at each node
  for (SurfacePoint x : stratified_samples(s, q.mc_samples, rng)) {
    for (int j = 0; j <= T; ++j) {
      const double t = static_cast<double>(j) / T;
      const double speed = s.tangent_norm(x, flow.velocity(t, x));
      per_node[j].add(std::pow(speed, p));
      if (j < T) x = flow.advect(x, t, static_cast<double>(j + 1) / T);
    }
  }
  // Trapezoid of per-node norms; the same samples feed every node, so the
  // node errors are treated as fully correlated.
  KahanSum value, sigma;
  for (int j = 0; j <= T; ++j) {
    const double w = (j == 0 || j == T) ? 0.5 * dt : dt;
    const double m = per_node[j].mean();
    if (m > 0.0) {
      value.add(w * std::pow(m, 1.0 / p));
      sigma.add(w * per_node[j].std_error() * std::pow(m, 1.0 / p - 1.0) / p);
    }
  }
  est.value = value.sum;
  est.std_error = sigma.sum;
  return est;
}

double cprime_estimate(const Surface& s, int grid, const QuadratureSpec& q) {
  if (grid < 16) throw Error(ErrorKind::InvalidArgument, "cprime_estimate requires grid >= 16");
  q.validate();
  const double rho = 0.1 * s.diameter();
  const auto bases = base_point_grid(s, grid);

  double sup = 0.0;
  int base_index = 0;
  for (const SurfacePoint& p : bases) {
    Rng rng = Rng(q.seed).fork(0x33 + static_cast<std::uint64_t>(base_index++));

    // Inner region: polar stratification around p, where (1/d) * area element
    // is bounded.
    double inner = 0.0;
    const int inner_samples = std::max(200, q.mc_samples / 4);
    if (s.kind() == SurfaceKind::RoundSphere) {
      // Polar cap: the integrand (1/(R theta)) R^2 sin(theta) is independent
      // of the azimuth.
      const double R = s.radius();
      const double theta_max = rho / R;
      KahanSum acc;
      for (int i = 0; i < inner_samples; ++i) {
        const double theta = rng.uniform(0.0, theta_max);
        acc.add(theta < 1e-12 ? 1.0 : std::sin(theta) / theta);
      }
      inner = kTwoPi * theta_max * R * (acc.sum / inner_samples);
    } else {
      KahanSum acc;
      for (int i = 0; i < inner_samples; ++i) {
        const double r = rng.uniform(0.0, rho);
        const double theta = rng.uniform(0.0, kTwoPi);
        SurfacePoint x{p.x + r * std::cos(theta), p.y + r * std::sin(theta), 0.0};
        acc.add(s.contains(x, 0.0) ? 1.0 : 0.0);
      }
      inner = kTwoPi * rho * (acc.sum / inner_samples);
    }

    // Outer region: jittered-grid (stratified) Monte Carlo of the bounded
    // integrand; the stratification removes most of the smooth-part variance.
    const int m = std::max(10, static_cast<int>(std::floor(std::sqrt(static_cast<double>(q.mc_samples)))));
    KahanSum outer;
    double cell_weight = 1.0 / (m * static_cast<double>(m));
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        SurfacePoint x;
        bool valid = true;
        switch (s.kind()) {
          case SurfaceKind::FlatTorus:
            x = {(i + rng.uniform()) / m, (j + rng.uniform()) / m, 0.0};
            break;
          case SurfaceKind::UnitAreaDisc: {
            const double R = s.radius();
            x = {-R + (i + rng.uniform()) * 2.0 * R / m,
                 -R + (j + rng.uniform()) * 2.0 * R / m, 0.0};
            valid = std::hypot(x.x, x.y) <= R;
            cell_weight = 4.0 * R * R / (m * static_cast<double>(m));
            break;
          }
          case SurfaceKind::RoundSphere: {
            // (z, azimuth) uniform is area-uniform on the sphere.
            const double R = s.radius();
            const double z = -R + (i + rng.uniform()) * 2.0 * R / m;
            const double theta = (j + rng.uniform()) * kTwoPi / m;
            const double r2 = std::sqrt(std::max(0.0, R * R - z * z));
            x = {r2 * std::cos(theta), r2 * std::sin(theta), z};
            break;
          }
        }
        if (!valid) continue;
        const double d = s.dist(p, x);
        if (d >= rho) outer.add(1.0 / d);
      }
    }
    sup = std::max(sup, inner + outer.sum * cell_weight);
  }
  return sup;
}

double lipschitz_constant(int n, double cprime) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "lipschitz_constant requires n >= 2");
  const double root2 = std::sqrt(2.0);
  return root2 * (n - 1) * cprime + n * (n - 1) / root2 * cprime;
}

ProductL1Result product_l1_length(const Flow& flow, int n, const QuadratureSpec& q) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "product_l1_length requires n >= 1");
  q.validate();
  const Surface& s = flow.surface();
  Rng rng = Rng(q.seed).fork(0x44);

  ProductL1Result result;
  MeanAccumulator acc;
  LiftOptions lift_opts;
  lift_opts.initial_steps = std::max(64, q.time_steps);

  const long long max_rejections = 100LL * q.mc_samples + 1000;
  int accepted = 0;
  while (accepted < q.mc_samples) {
    Configuration x0;
    x0.points.reserve(n);
    for (int i = 0; i < n; ++i) x0.points.push_back(s.sample(rng));
    if (n >= 2 && min_pairwise_dist(s, x0) < kEpsilonSep) {
      ++result.rejected_samples;
      if (result.rejected_samples > max_rejections)
        throw Error(ErrorKind::CoincidentPoints,
                    "product_l1_length: persistent rejection of start configurations");
      continue;
    }
    try {
      const ConfigPath path = lift_trajectories(flow, x0, lift_opts);
      acc.add(gb_length(s, path));
      ++accepted;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::CoincidentPoints) throw;
      ++result.rejected_samples;
      if (result.rejected_samples > max_rejections)
        throw Error(ErrorKind::CoincidentPoints,
                    "product_l1_length: persistent separation collapse along lifted paths");
    }
  }
  result.estimate.value = acc.mean();
  result.estimate.std_error = acc.std_error();
  return result;
}

EmbeddingReport embedding_ratio(const Flow& flow, int n, const QuadratureSpec& q) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "embedding_ratio requires n >= 2");
  q.validate();
  EmbeddingReport rep;

  QuadratureSpec q_lhs = q;
  q_lhs.seed = Rng(q.seed).fork(0x55).seed();
  const ProductL1Result lhs = product_l1_length(flow, n, q_lhs);
  rep.lhs = lhs.estimate.value;
  rep.lhs_sigma = lhs.estimate.std_error;
  rep.rejected_samples = lhs.rejected_samples;

  QuadratureSpec q_l1 = q;
  q_l1.seed = Rng(q.seed).fork(0x66).seed();
  const NormEstimate l1 = lp_isotopy_length(flow, 1.0, q_l1);
  rep.l1 = l1.value;
  rep.l1_sigma = l1.std_error;

  QuadratureSpec q_cp = q;
  q_cp.seed = Rng(q.seed).fork(0x77).seed();
  rep.cprime = cprime_estimate(flow.surface(), 25, q_cp);
  rep.lipschitz = lipschitz_constant(n, rep.cprime);

  rep.rhs = rep.lipschitz * rep.l1;
  rep.sigma = std::sqrt(rep.lhs_sigma * rep.lhs_sigma +
                        rep.lipschitz * rep.lipschitz * rep.l1_sigma * rep.l1_sigma);
  rep.ok = rep.lhs <= rep.rhs + 3.0 * rep.sigma;
  return rep;
}

}  // namespace lpflow
