#include "lpflow/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include "lpflow/bounds.hpp"
#include "lpflow/braids.hpp"
#include "lpflow/confspace.hpp"
#include "lpflow/error.hpp"
#include "lpflow/flows.hpp"
#include "lpflow/functionals.hpp"
#include "lpflow/geometry.hpp"

namespace lpflow {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kSqrt2 = 1.41421356237309504880168872420969808;

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

struct ClosedLoop {
  Surface surface;
  ConfigPath path;
};

// Random closed loop realized by a finger push (or a rigid rotation), lifted
// through the flow. Geometry is drawn from safe ranges so construction always
// succeeds; variety comes from the surface, braid class, loop shape, and
// start points. Torus loops are null-homologous so the relative lifts close.
ClosedLoop random_closed_loop(std::uint64_t salt, Rng& master, const Surface& disc) {
  Rng rng = master.fork(salt);
  const int kind = static_cast<int>(rng.below(4));
  if (kind == 3) {
    // Encircling push loop on the torus.
    const Surface torus = Surface::torus();
    const SurfacePoint z1{0.25 + rng.uniform(-0.02, 0.02), 0.25 + rng.uniform(-0.02, 0.02)};
    const SurfacePoint z2{0.55 + rng.uniform(-0.02, 0.02), 0.25};
    const int k = 1 + static_cast<int>(rng.below(2));
    const Polyline gamma = encircling_loop(z1, z2, 0.1, k, 32);
    const Flow flow = point_push(torus, gamma, 0.04);
    Configuration x0;
    x0.points = {z1, z2, {0.55, 0.65}, {0.15, 0.7}};
    return {torus, lift_trajectories(flow, x0)};
  }
  if (kind == 0) {
    // Rigid rotation loop of four generic points.
    const Flow flow = rotation_flow(disc, 2.0 * kPi);
    Configuration x0;
    for (int i = 0; i < 4; ++i) {
      const double r = rng.uniform(0.08, 0.4);
      const double a = rng.uniform(0.0, 2.0 * kPi);
      x0.points.push_back({r * std::cos(a), r * std::sin(a)});
    }
    if (min_pairwise_dist(disc, x0) < 0.03) return random_closed_loop(salt + 977, master, disc);
    return {disc, lift_trajectories(flow, x0)};
  }
  if (kind == 1) {
    // Contractible polygon loop.
    const double cx = rng.uniform(-0.15, 0.15), cy = rng.uniform(-0.15, 0.15);
    const double r = rng.uniform(0.06, 0.12);
    const int nv = 8 + static_cast<int>(rng.below(6));
    Polyline gamma;
    gamma.closed = true;
    for (int i = 0; i <= nv; ++i) {
      const double a = 2.0 * kPi * (i % nv) / nv;
      const double ri = r * (i % nv == 0 ? 1.0 : rng.uniform(0.85, 1.15));
      gamma.points.push_back({cx + ri * std::cos(a), cy + ri * std::sin(a)});
    }
    gamma.points.back() = gamma.points.front();
    const double tube = rng.uniform(0.2, 0.3) * r;
    const Flow flow = point_push(disc, gamma, tube);
    Configuration x0;
    x0.points.push_back(gamma.points.front());
    x0.points.push_back({cx + 2.5 * r, cy});
    x0.points.push_back({cx - 2.5 * r, cy + 0.05});
    x0.points.push_back({cx, cy - 2.7 * r});
    return {disc, lift_trajectories(flow, x0)};
  }
  // k-fold encircling loop on jittered square centers.
  const double j1 = rng.uniform(-0.02, 0.02), j2 = rng.uniform(-0.02, 0.02);
  const SurfacePoint z1{-0.15 + j1, -0.15 + j2};
  const SurfacePoint z2{0.15 + j2, -0.15 - j1};
  const int k = 1 + static_cast<int>(rng.below(3));
  const Polyline gamma = encircling_loop(z1, z2, 0.1, k, 32);
  const Flow flow = point_push(disc, gamma, 0.04);
  Configuration x0;
  x0.points = {z1, z2, {0.15, 0.15}, {-0.15, 0.15}};
  return {disc, lift_trajectories(flow, x0)};
}

CheckResult timed(const std::string& name, const std::function<CheckResult()>& body) {
  const auto start = std::chrono::steady_clock::now();
  CheckResult result;
  try {
    result = body();
  } catch (const Error& e) {
    result.pass = false;
    result.detail = std::string(error_kind_name(e.kind())) + ": " + e.what();
  } catch (const std::exception& e) {
    result.pass = false;
    result.detail = std::string("exception: ") + e.what();
  }
  result.name = name;
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace

std::vector<CheckResult> run_verification(bool quick, std::uint64_t seed) {
  std::vector<CheckResult> results;
  const Surface disc = Surface::disc();
  const Surface torus = Surface::torus();
  Rng master(seed);

  // 1. Singular-integral constants.
  results.push_back(timed("constants: C' on disc and torus, C(n=4)", [&] {
    CheckResult r;
    QuadratureSpec q;
    q.mc_samples = quick ? 4000 : 30000;
    q.seed = master.fork(1).seed();
    const double cp_disc = cprime_estimate(disc, quick ? 16 : 25, q);
    const double cp_torus = cprime_estimate(torus, quick ? 16 : 25, q);
    const double disc_exact = 2.0 * std::sqrt(kPi);
    const double torus_exact = 4.0 * std::log(1.0 + kSqrt2);
    const double e1 = std::abs(cp_disc - disc_exact) / disc_exact;
    const double e2 = std::abs(cp_torus - torus_exact) / torus_exact;
    const double C4 = lipschitz_constant(4, cp_disc);
    const double formula_err = std::abs(C4 - 9.0 * kSqrt2 * cp_disc);
    r.pass = e1 < 0.02 && e2 < 0.02 && formula_err < 1e-12;
    r.detail = fmt("C'(disc)=%.4f (err %.2f%%), C'(torus)=%.4f", cp_disc, 100 * e1, cp_torus) +
               fmt(" (err %.2f%%), C(4)=%.3f", 100 * e2, C4);
    return r;
  }));
  if (!quick && results.back().seconds >= 30.0) {
    results.back().pass = false;
    results.back().detail += " [runtime over 30 s]";
  }

  // 2. L1 length oracle on the rotation flow.
  results.push_back(timed("l1 oracle: full-turn rotation of the disc", [&] {
    CheckResult r;
    QuadratureSpec q;
    q.mc_samples = quick ? 4000 : 20000;
    q.seed = master.fork(2).seed();
    const NormEstimate est = lp_isotopy_length(rotation_flow(disc, 2.0 * kPi), 1.0, q);
    const double expected = 4.0 * std::sqrt(kPi) / 3.0;
    const double rel = std::abs(est.value - expected) / expected;
    r.pass = rel < 0.01;
    r.detail = fmt("l1=%.5f vs %.5f (err %.3f%%)", est.value, expected, 100 * rel);
    return r;
  }));
  if (!quick && results.back().seconds >= 10.0) {
    results.back().pass = false;
    results.back().detail += " [runtime over 10 s]";
  }

  // 3. Completeness escape bound.
  results.push_back(timed("escape bound on random paths and the closed form", [&] {
    CheckResult r;
    const int trials = quick ? 100 : 1000;
    Rng rng = master.fork(3);
    int checked = 0;
    for (int i = 0; i < trials; ++i) {
      const Surface& s = (i % 2 == 0) ? torus : disc;
      Rng flow_rng = rng.fork(2 * i);
      const Flow flow = random_flow(s, flow_rng, 2 + static_cast<int>(rng.below(3)));
      Configuration x0;
      Rng samp = rng.fork(2 * i + 1);
      for (int j = 0; j < 4; ++j) x0.points.push_back(s.sample(samp));
      if (min_pairwise_dist(s, x0) < 1e-4) continue;
      const EscapeReport rep = escape_check(s, lift_trajectories(flow, x0));
      ++checked;
      if (!rep.ok) {
        r.pass = false;
        r.detail = fmt("violated at trial %g: d_end/d_start=%.4f, ell=%.4f",
                       static_cast<double>(i), rep.d_end / rep.d_start, rep.ell);
        return r;
      }
    }
    // Straight approach: d_end/d_start = exp(-1/(2 sqrt 2)) at ell = 1/2.
    ConfigPath path;
    const int steps = 40000;
    for (int k = 0; k <= steps; ++k) {
      const double t = static_cast<double>(k) / steps;
      Configuration c;
      c.points = {{0.0, 0.0}, {0.4 - 0.2 * t, 0.0}};
      path.times.push_back(t);
      path.configs.push_back(std::move(c));
    }
    const EscapeReport rep = escape_check(disc, path);
    const double expected = std::exp(-0.5 / kSqrt2);
    const double rel = std::abs(rep.d_end / rep.d_start - expected) / expected;
    r.pass = rep.ok && rel < 0.005;
    r.detail = fmt("%g random paths ok; closed-form ratio %.5f vs %.5f",
                   static_cast<double>(checked), rep.d_end / rep.d_start, expected);
    return r;
  }));

  // 4. Winding-length inequality and its sharpness.
  results.push_back(timed("winding-length inequality on closed lifted loops", [&] {
    CheckResult r;
    const int trials = quick ? 100 : 1000;
    Rng rng = master.fork(4);
    double min_slack = 1e300;
    for (int i = 0; i < trials; ++i) {
      const ClosedLoop loop = random_closed_loop(i, rng, disc);
      const WindingMatrix w = winding_matrix(loop.surface, loop.path);
      const double len = gb_length(loop.surface, loop.path);
      const double bound = 2.0 * kPi * w.max_abs();
      const double tol = 1e-6 + 0.005 * len;
      if (len + tol < bound) {
        r.pass = false;
        r.detail = fmt("violated at trial %g: gb=%.4f < 2pi max|w|=%.4f",
                       static_cast<double>(i), len, bound);
        return r;
      }
      if (bound > 0.0) min_slack = std::min(min_slack, len / bound);
    }
    // Sharpness: the rigid pair rotation attains the bound.
    ConfigPath pair;
    const int steps = 20000;
    for (int k = 0; k <= steps; ++k) {
      const double t = static_cast<double>(k) / steps;
      const double a = 2.0 * kPi * t;
      Configuration c;
      c.points.push_back({0.15 * std::cos(a), 0.15 * std::sin(a)});
      c.points.push_back({-0.15 * std::cos(a), -0.15 * std::sin(a)});
      pair.times.push_back(t);
      pair.configs.push_back(std::move(c));
    }
    pair.configs.back() = pair.configs.front();
    const double ratio = gb_length(disc, pair) /
                         (2.0 * kPi * winding_matrix(disc, pair).max_abs());
    r.pass = std::abs(ratio - 1.0) < 0.005;
    r.detail = fmt("min slack ratio %.3f; rigid pair ratio %.4f", min_slack, ratio);
    return r;
  }));

  // 5. Lipschitz embedding inequality.
  results.push_back(timed("embedding inequality on random flows (n=4)", [&] {
    CheckResult r;
    const int trials = quick ? 4 : 20;
    Rng rng = master.fork(5);
    double worst_ratio = 0.0;
    for (int i = 0; i < trials; ++i) {
      const Surface& s = (i % 2 == 0) ? disc : torus;
      Rng flow_rng = rng.fork(3 * i);
      const Flow flow = random_flow(s, flow_rng, 2 + static_cast<int>(rng.below(3)));
      QuadratureSpec q;
      q.mc_samples = quick ? 150 : 300;
      q.time_steps = 64;
      q.seed = rng.fork(3 * i + 1).seed();
      const EmbeddingReport rep = embedding_ratio(flow, 4, q);
      if (!rep.ok) {
        r.pass = false;
        r.detail = fmt("violated at trial %g: lhs=%.4f rhs=%.4f",
                       static_cast<double>(i), rep.lhs, rep.rhs);
        return r;
      }
      if (rep.rhs > 0.0) worst_ratio = std::max(worst_ratio, rep.lhs / rep.rhs);
    }
    r.pass = true;
    r.detail = fmt("%g flows ok; worst lhs/rhs = %.4f", static_cast<double>(trials), worst_ratio);
    return r;
  }));
  if (!quick && results.back().seconds >= 300.0) {
    results.back().pass = false;
    results.back().detail += " [runtime over 5 min]";
  }

  // 6. Full twist and the center quotient.
  results.push_back(timed("full twist: central, winding all-ones, invariant bound", [&] {
    CheckResult r;
    const Flow rot = rotation_flow(disc, 2.0 * kPi);
    Configuration x0;
    x0.points = {{0.21, 0.03}, {-0.12, 0.24}, {-0.17, -0.2}, {0.1, -0.27}};
    const ConfigPath loop = lift_trajectories(rot, x0);
    const WindingMatrix w = winding_matrix(disc, loop);
    bool ones = w.max_integrality_defect() < 1e-3;
    for (int i = 0; i < 4 && ones; ++i)
      for (int j = i + 1; j < 4; ++j)
        if (w.rounded(i, j) != 1) ones = false;
    const CenterReducedBound lh = lh_lower(w, SurfaceKind::UnitAreaDisc);

    ProductNeighborhood u;
    u.rho = 0.02;
    u.centers = {{-0.15, -0.15}, {0.15, -0.15}, {0.15, 0.15}, {-0.15, 0.15}};
    const Polyline gamma = encircling_loop(u.centers[0], u.centers[1], 0.1, 2);
    AssembleOptions opts;
    opts.quad.mc_samples = quick ? 1000 : 4000;
    opts.quad.seed = master.fork(6).seed();
    opts.cprime = 2.0 * std::sqrt(kPi);
    const BoundReport base = assemble_bound(disc, u, gamma, opts);
    AssembleOptions twisted = opts;
    twisted.multiply_full_twist = true;
    const BoundReport tw = assemble_bound(disc, u, gamma, twisted);
    r.pass = ones && lh.value == 0.0 && tw.lower == base.lower &&
             tw.lh_lower_value == base.lh_lower_value;
    r.detail = fmt("rotation loop lh=%.4f; bound with/without twist %.3e / %.3e",
                   lh.value, tw.lower, base.lower);
    return r;
  }));

  // 7. Growth experiment: the theorem at desk scale.
  results.push_back(timed("growth of the certified bound for k-fold braids", [&] {
    CheckResult r;
    QuadratureSpec q;
    q.mc_samples = quick ? 2000 : 8000;
    q.time_steps = 256;
    q.seed = master.fork(7).seed();
    GrowthOptions opts;
    if (quick) opts.segments_per_turn = 32;
    const GrowthResult g = growth_experiment(5, q, opts);
    bool sound = true, growing = true;
    for (const auto& row : g.rows)
      if (row.lower > row.upper + 3.0 * row.sigma) sound = false;
    for (std::size_t i = 0; i + 2 < g.rows.size(); ++i) {
      const auto& a = g.rows[i];
      const auto& b = g.rows[i + 2];
      if (a.lh_lower > 2.0 * a.diam_upper && !(b.lower > a.lower)) growing = false;
    }
    r.pass = sound && growing && g.slope > 0.0 && g.r_squared > 0.99;
    r.detail = fmt("rows sound=%g growing=%g; slope=%.3e", sound ? 1.0 : 0.0,
                   growing ? 1.0 : 0.0, g.slope) +
               fmt(", R^2=%.4f, lower(5)=%.3e", g.r_squared, g.rows.back().lower);
    return r;
  }));
  if (!quick && results.back().seconds >= 600.0) {
    results.back().pass = false;
    results.back().detail += " [runtime over 10 min]";
  }

  // 8. Numerics hygiene: RK4 order, area preservation, Holder.
  results.push_back(timed("hygiene: RK4 order, area preservation, Holder", [&] {
    CheckResult r;
    const SurfacePoint probe{0.45, 0.0};
    auto endpoint_error = [&](int steps) {
      const Flow f = rotation_flow(disc, 2.0 * kPi, steps);
      return disc.dist(probe, f.advect(probe, 0.0, 1.0));
    };
    const double ratio = endpoint_error(16) / endpoint_error(32);
    const bool rk4_ok = ratio > 10.0 && ratio < 25.0;

    const int patches = quick ? 1000 : 2000;
    const double a_rot = area_distortion(rotation_flow(disc, 2.0 * kPi), patches);
    Polyline loop;
    loop.closed = true;
    loop.points = {{-0.03, -0.08}, {0.13, -0.08}, {0.13, 0.08}, {-0.03, 0.08}, {-0.03, -0.08}};
    const double a_push = area_distortion(point_push(disc, loop, 0.04), patches);
    Rng rng = master.fork(8);
    double a_random = 0.0;
    for (int i = 0; i < (quick ? 2 : 4); ++i) {
      const Surface& s = (i % 2 == 0) ? disc : torus;
      Rng flow_rng = rng.fork(11 * i);
      a_random = std::max(a_random, area_distortion(random_flow(s, flow_rng, 3), patches));
    }
    const bool area_ok = a_rot < 1e-8 && a_push < 1e-4 && a_random < 1e-4;

    bool holder_ok = true;
    QuadratureSpec q;
    q.mc_samples = quick ? 1000 : 4000;
    const int fields = quick ? 10 : 50;
    for (int i = 0; i < fields && holder_ok; ++i) {
      const Surface& s = (i % 2 == 0) ? disc : torus;
      Rng flow_rng = rng.fork(13 * i + 1);
      const Flow flow = random_flow(s, flow_rng, 3);
      const double t_probe = rng.uniform();
      const VectorField field = [&flow, t_probe](const SurfacePoint& p) {
        return flow.velocity(t_probe, p);
      };
      q.seed = rng.fork(13 * i + 2).seed();
      const NormEstimate n1 = lp_field_norm(s, field, 1.0, q);
      const NormEstimate n2 = lp_field_norm(s, field, 2.0, q);
      const double sigma =
          std::sqrt(n1.std_error * n1.std_error + n2.std_error * n2.std_error);
      if (n1.value > n2.value + 3.0 * sigma) holder_ok = false;
    }
    r.pass = rk4_ok && area_ok && holder_ok;
    r.detail = fmt("rk4 ratio %.1f; area rot %.1e push %.1e", ratio, a_rot, a_push) +
               fmt(" random %.1e; holder ok %.0f", a_random, holder_ok ? 1.0 : 0.0);
    return r;
  }));

  return results;
}

}  // namespace lpflow
