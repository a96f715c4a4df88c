#include "lpflow/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <json.hpp>

#include "lpflow/error.hpp"

namespace lpflow {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

double point_to_polyline_dist(const Surface& s, const SurfacePoint& p,
                              const Polyline& line) {
  const std::size_t segs = line.segment_count();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < segs; ++i) {
    const auto& a = line.points[i];
    const auto& b = line.points[i + 1];
    // Sample-free segment distance in the chart; on the torus shift the
    // segment into the point's lattice copy first.
    double ax = a.x, ay = a.y, bx = b.x, by = b.y;
    if (s.kind() == SurfaceKind::FlatTorus) {
      const double mx = 0.5 * (ax + bx), my = 0.5 * (ay + by);
      const double sx = std::round(mx - p.x), sy = std::round(my - p.y);
      ax -= sx; bx -= sx;
      ay -= sy; by -= sy;
    }
    const double vx = bx - ax, vy = by - ay;
    const double len2 = vx * vx + vy * vy;
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp(((p.x - ax) * vx + (p.y - ay) * vy) / len2, 0.0, 1.0);
    best = std::min(best, std::hypot(p.x - (ax + t * vx), p.y - (ay + t * vy)));
  }
  return best;
}

}  // namespace

double ProductNeighborhood::mu() const {
  double prod = 1.0;
  for (int i = 0; i < n(); ++i) prod *= kPi * rho * rho;
  return prod;
}

double ProductNeighborhood::min_center_dist(const Surface& s) const {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n(); ++i)
    for (int j = i + 1; j < n(); ++j)
      best = std::min(best, s.dist(centers[i], centers[j]));
  return best;
}

void ProductNeighborhood::validate(const Surface& s) const {
  if (n() < 2)
    throw Error(ErrorKind::InvalidArgument, "product neighborhood needs at least two centers");
  if (!(rho > 0.0))
    throw Error(ErrorKind::InvalidArgument, "product neighborhood radius must be positive");
  if (min_center_dist(s) <= 2.0 * rho)
    throw Error(ErrorKind::InvalidArgument,
                "product neighborhood discs overlap (s_min <= 2 rho)");
  if (s.has_boundary()) {
    const double limit = s.radius() * (1.0 - kCollarFraction);
    for (const auto& c : centers)
      if (std::hypot(c.x, c.y) + rho > limit)
        throw Error(ErrorKind::InvalidArgument,
                    "product neighborhood disc leaves the boundary collar");
  }
}

double diam_gb_upper(const Surface& s, const ProductNeighborhood& u) {
  u.validate(s);
  const double s_min = u.min_center_dist(s);
  const double gn_diam = 2.0 * u.rho * std::sqrt(static_cast<double>(u.n()));
  return gn_diam * std::sqrt(2.0) / (s_min - 2.0 * u.rho);
}

std::string BoundReport::to_json_string() const {
  nlohmann::json j;
  j["surface"] = surface;
  j["n"] = n;
  j["rho"] = rho;
  j["s_min"] = s_min;
  j["tube_radius"] = tube_radius;
  j["full_twist_applied"] = full_twist_applied;
  nlohmann::json wj = nlohmann::json::array();
  for (int i = 0; i < winding.n; ++i)
    for (int k = i + 1; k < winding.n; ++k)
      wj.push_back({{"i", i}, {"j", k}, {"raw", winding.at(i, k)},
                    {"rounded", winding.rounded(i, k)}});
  j["winding_upper_triangle"] = std::move(wj);
  j["L_h_lower"] = lh_lower_value;
  j["center_shift"] = center_shift;
  j["diam_gb_upper"] = diam_upper;
  j["mu_U"] = mu;
  j["constants"] = {{"cprime", cprime}, {"C", lipschitz}};
  j["lower_bound"] = lower;
  j["upper_bound"] = upper;
  j["upper_sigma"] = upper_sigma;
  j["seed"] = seed;
  j["mc_samples"] = mc_samples;
  j["time_steps"] = time_steps;
  return j.dump(2);
}

BoundReport assemble_bound(const Surface& s, const ProductNeighborhood& u,
                           const Polyline& gamma, const AssembleOptions& opts) {
  u.validate(s);
  opts.quad.validate();
  if (opts.moving_point < 0 || opts.moving_point >= u.n())
    throw Error(ErrorKind::InvalidArgument, "assemble_bound: moving_point out of range");
  if (gamma.points.empty() || !gamma.closed)
    throw Error(ErrorKind::InvalidArgument, "assemble_bound: gamma must be a closed polyline");
  const SurfacePoint& start = u.centers[opts.moving_point];
  if (s.dist(s.canonical(gamma.points.front()), start) > 1e-9)
    throw Error(ErrorKind::InvalidArgument,
                "assemble_bound: gamma must start at the moving center");

  const double tube = opts.tube_radius > 0.0 ? opts.tube_radius : 2.5 * u.rho;
  if (tube < 2.0 * u.rho)
    throw Error(ErrorKind::InvalidArgument,
                "assemble_bound: tube core (tube_radius/2) must cover the moving disc");

  // The stationary discs must never meet the moving tube.
  for (int j = 0; j < u.n(); ++j) {
    if (j == opts.moving_point) continue;
    if (point_to_polyline_dist(s, u.centers[j], gamma) <= tube + u.rho)
      throw Error(ErrorKind::TubeTooWide,
                  "assemble_bound: tube passes through a stationary disc");
  }

  Flow flow = point_push(s, gamma, tube);
  if (opts.multiply_full_twist) {
    if (s.kind() != SurfaceKind::UnitAreaDisc)
      throw Error(ErrorKind::InvalidArgument, "full twist multiplication needs the disc");
    flow = Flow::concat(flow, rotation_flow(s, 2.0 * kPi, flow.rk4_steps()));
  }

  Configuration x0;
  x0.points = u.centers;
  const ConfigPath lifted = lift_trajectories(flow, x0);

  BoundReport rep;
  rep.surface = std::string(s.name());
  rep.n = u.n();
  rep.rho = u.rho;
  rep.s_min = u.min_center_dist(s);
  rep.tube_radius = tube;
  rep.full_twist_applied = opts.multiply_full_twist;
  rep.winding = winding_matrix(s, lifted);
  const CenterReducedBound lh = lh_lower(rep.winding, s.kind());
  rep.lh_lower_value = lh.value;
  rep.center_shift = lh.center_shift;
  rep.diam_upper = diam_gb_upper(s, u);
  rep.mu = u.mu();

  if (opts.cprime > 0.0) {
    rep.cprime = opts.cprime;
  } else {
    QuadratureSpec q_cp = opts.quad;
    q_cp.seed = Rng(opts.quad.seed).fork(0x88).seed();
    rep.cprime = cprime_estimate(s, 25, q_cp);
  }
  rep.lipschitz = lipschitz_constant(u.n(), rep.cprime);

  rep.lower = std::max(0.0, rep.mu * (rep.lh_lower_value - 2.0 * rep.diam_upper) /
                                rep.lipschitz);

  QuadratureSpec q_up = opts.quad;
  q_up.seed = Rng(opts.quad.seed).fork(0x99).seed();
  const NormEstimate upper = lp_isotopy_length(flow, 1.0, q_up);
  rep.upper = upper.value;
  rep.upper_sigma = upper.std_error;
  rep.seed = opts.quad.seed;
  rep.mc_samples = opts.quad.mc_samples;
  rep.time_steps = opts.quad.time_steps;
  return rep;
}

Polyline encircling_loop(const SurfacePoint& from, const SurfacePoint& around,
                         double radius, int turns, int segments_per_turn) {
  if (turns < 1) throw Error(ErrorKind::InvalidArgument, "encircling_loop: turns >= 1");
  if (segments_per_turn < 8)
    throw Error(ErrorKind::InvalidArgument, "encircling_loop: need at least 8 segments per turn");
  const double dx = from.x - around.x, dy = from.y - around.y;
  const double dist = std::hypot(dx, dy);
  if (dist <= radius)
    throw Error(ErrorKind::InvalidArgument, "encircling_loop: start lies inside the circle");

  // Ring vertices, computed once and reused verbatim for every turn so the
  // tube checks see one strand.
  const double angle0 = std::atan2(dy, dx);
  std::vector<SurfacePoint> ring;
  ring.reserve(segments_per_turn);
  for (int i = 0; i < segments_per_turn; ++i) {
    const double a = angle0 + 2.0 * kPi * i / segments_per_turn;
    ring.push_back({around.x + radius * std::cos(a), around.y + radius * std::sin(a), 0.0});
  }

  Polyline line;
  line.closed = true;
  line.points.push_back(from);
  for (int t = 0; t < turns; ++t)
    for (int i = 0; i < segments_per_turn; ++i) line.points.push_back(ring[i]);
  line.points.push_back(ring[0]);
  line.points.push_back(from);  // stem back; retraces the outgoing stem
  return line;
}

std::string GrowthResult::to_csv_string() const {
  std::string out = "k,L_h_lower,diam_gb_upper,mu_U,C,lower,upper,sigma\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  r.k, r.lh_lower, r.diam_upper, r.mu, r.lipschitz, r.lower, r.upper,
                  r.sigma);
    out += buf;
  }
  return out;
}

std::string GrowthResult::manifest_json_string() const {
  nlohmann::json j;
  j["command"] = "grow";
  j["seed"] = seed;
  j["mc_samples"] = mc_samples;
  j["time_steps"] = time_steps;
  j["cprime"] = cprime;
  j["rho"] = neighborhood.rho;
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : neighborhood.centers) cs.push_back({c.x, c.y});
  j["centers"] = std::move(cs);
  j["fit"] = {{"slope", slope}, {"r_squared", r_squared}};
  return j.dump(2);
}

GrowthResult growth_experiment(int k_max, const QuadratureSpec& q,
                               const GrowthOptions& opts) {
  if (k_max < 3)
    throw Error(ErrorKind::InvalidArgument, "growth_experiment requires k_max >= 3");
  if (opts.n < 4)
    throw Error(ErrorKind::InvalidArgument, "growth_experiment requires n >= 4");
  q.validate();
  const Surface s = Surface::disc();

  GrowthResult result;
  ProductNeighborhood& u = result.neighborhood;
  u.rho = opts.rho;
  const double h = 0.5 * opts.square_side;
  u.centers = {{-h, -h, 0.0}, {h, -h, 0.0}, {h, h, 0.0}, {-h, h, 0.0}};
  for (int i = 4; i < opts.n; ++i) {
    // Extra centers on a larger ring, if requested.
    const double a = 2.0 * kPi * (i - 4 + 0.5) / std::max(1, opts.n - 4);
    u.centers.push_back({2.2 * h * std::cos(a), 2.2 * h * std::sin(a), 0.0});
  }
  u.validate(s);

  QuadratureSpec q_cp = q;
  q_cp.seed = Rng(q.seed).fork(0xAA).seed();
  result.cprime = cprime_estimate(s, 25, q_cp);
  result.seed = q.seed;
  result.mc_samples = q.mc_samples;
  result.time_steps = q.time_steps;

  for (int k = 1; k <= k_max; ++k) {
    const Polyline gamma = encircling_loop(u.centers[0], u.centers[1], opts.loop_radius,
                                           k, opts.segments_per_turn);
    AssembleOptions a;
    a.quad = q;
    a.quad.seed = Rng(q.seed).fork(0xB0 + static_cast<std::uint64_t>(k)).seed();
    a.tube_radius = opts.tube_radius;
    a.cprime = result.cprime;
    const BoundReport rep = assemble_bound(s, u, gamma, a);
    GrowthRow row;
    row.k = k;
    row.lh_lower = rep.lh_lower_value;
    row.diam_upper = rep.diam_upper;
    row.mu = rep.mu;
    row.lipschitz = rep.lipschitz;
    row.lower = rep.lower;
    row.upper = rep.upper;
    row.sigma = rep.upper_sigma;
    result.rows.push_back(row);
  }

  // Least squares of lower against ceil(k/2) over the positive rows; the
  // lower bound is affine in the center-reduced winding there.
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  int m = 0;
  for (const auto& r : result.rows) {
    if (r.lower <= 0.0) continue;
    const double x = std::ceil(r.k / 2.0);
    sx += x;
    sy += r.lower;
    sxx += x * x;
    sxy += x * r.lower;
    syy += r.lower * r.lower;
    ++m;
  }
  if (m >= 2) {
    const double denom = m * sxx - sx * sx;
    if (denom > 0.0) {
      result.slope = (m * sxy - sx * sy) / denom;
      const double ss_tot = syy - sy * sy / m;
      const double intercept = (sy - result.slope * sx) / m;
      double ss_res = 0.0;
      for (const auto& r : result.rows) {
        if (r.lower <= 0.0) continue;
        const double x = std::ceil(r.k / 2.0);
        const double e = r.lower - (result.slope * x + intercept);
        ss_res += e * e;
      }
      result.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    }
  }
  return result;
}

}  // namespace lpflow
