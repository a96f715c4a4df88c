#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "lpflow/error.hpp"
#include "lpflow/flows.hpp"
#include "lpflow/geometry.hpp"

using namespace lpflow;

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// Finite-difference divergence oracle.
double divergence_estimate(const Flow& flow, double t, const SurfacePoint& p,
                           double eps = 5e-6) {
  const Surface& s = flow.surface();
  auto vx = [&](SurfacePoint q) { return flow.velocity(t, s.canonical(q)).x; };
  auto vy = [&](SurfacePoint q) { return flow.velocity(t, s.canonical(q)).y; };
  const double dvx = (vx({p.x + eps, p.y}) - vx({p.x - eps, p.y})) / (2 * eps);
  const double dvy = (vy({p.x, p.y + eps}) - vy({p.x, p.y - eps})) / (2 * eps);
  return dvx + dvy;
}

Polyline square_loop(double cx, double cy, double half) {
  Polyline line;
  line.closed = true;
  line.points = {{cx - half, cy - half}, {cx + half, cy - half},
                 {cx + half, cy + half}, {cx - half, cy + half},
                 {cx - half, cy - half}};
  return line;
}

}  // namespace

TEST_CASE("rotation flow velocity is omega cross r") {
  const Surface disc = Surface::disc();
  const Flow flow = rotation_flow(disc, 2.0 * kPi);
  const TangentVector v = flow.velocity(0.37, {0.25, 0.0});
  CHECK(v.x == doctest::Approx(0.0));
  CHECK(v.y == doctest::Approx(2.0 * kPi * 0.25));
}

TEST_CASE("velocity vanishes outside supports") {
  const Surface disc = Surface::disc();
  Rng rng(11);
  const Flow vortices = random_flow(disc, rng, 3);
  // Beyond the collar cutoff the field is identically zero.
  const double r = disc.radius() * 0.99;
  const TangentVector v = vortices.velocity(0.5, {r, 0.0});
  CHECK(v.x == 0.0);
  CHECK(v.y == 0.0);

  Polyline loop = square_loop(0.0, 0.0, 0.05);
  const Flow push = point_push(disc, loop, 0.02);
  const TangentVector far = push.velocity(0.5, {-0.3, -0.3});
  CHECK(far.x == 0.0);
  CHECK(far.y == 0.0);
}

TEST_CASE("zero flow is the identity") {
  const Surface torus = Surface::torus();
  const Flow flow = Flow::zero(torus);
  const SurfacePoint p{0.3, 0.8};
  const SurfacePoint q = flow.advect(p, 0.0, 1.0);
  CHECK(q.x == doctest::Approx(p.x));
  CHECK(q.y == doctest::Approx(p.y));
}

TEST_CASE("divergence is numerically zero across flow families") {
  const Surface disc = Surface::disc();
  const Surface torus = Surface::torus();
  Rng rng(17);
  std::vector<Flow> flows;
  flows.push_back(rotation_flow(disc, 2.0 * kPi));
  flows.push_back(random_flow(disc, rng, 4));
  flows.push_back(random_flow(torus, rng, 4));
  flows.push_back(point_push(disc, square_loop(0.05, -0.1, 0.08), 0.03));

  for (const Flow& flow : flows) {
    Rng sampler(23);
    const Surface& s = flow.surface();
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      SurfacePoint p = s.sample(sampler);
      if (s.has_boundary() && std::hypot(p.x, p.y) > 0.9 * s.radius()) continue;
      const double t = sampler.uniform();
      worst = std::max(worst, std::abs(divergence_estimate(flow, t, p)));
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("rotation by a full turn returns every point") {
  const Surface disc = Surface::disc();
  const Flow flow = rotation_flow(disc, 2.0 * kPi);
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const SurfacePoint p = disc.sample(rng);
    const SurfacePoint q = flow.advect(p, 0.0, 1.0);
    CHECK(disc.dist(p, q) < 1e-8);
  }
}

TEST_CASE("rotation by angle zero is the identity flow") {
  const Surface disc = Surface::disc();
  const Flow flow = rotation_flow(disc, 0.0);
  const SurfacePoint q = flow.advect({0.2, 0.1}, 0.0, 1.0);
  CHECK(q.x == doctest::Approx(0.2));
  CHECK(q.y == doctest::Approx(0.1));
}

TEST_CASE("rotation preserves mutual distances") {
  const Surface disc = Surface::disc();
  const Flow flow = rotation_flow(disc, 2.0 * kPi);
  const SurfacePoint a0{0.1, 0.05}, b0{-0.2, 0.3};
  const double d0 = disc.dist(a0, b0);
  for (double t : {0.25, 0.5, 0.75, 1.0}) {
    const SurfacePoint a = flow.advect(a0, 0.0, t);
    const SurfacePoint b = flow.advect(b0, 0.0, t);
    CHECK(std::abs(disc.dist(a, b) - d0) < 1e-8);
  }
}

TEST_CASE("RK4 endpoint error shrinks ~16x when the step halves") {
  const Surface disc = Surface::disc();
  const SurfacePoint p{0.45, 0.0};
  auto endpoint_error = [&](int steps) {
    const Flow flow = rotation_flow(disc, 2.0 * kPi, steps);
    const SurfacePoint q = flow.advect(p, 0.0, 1.0);
    return disc.dist(p, q);
  };
  const double e16 = endpoint_error(16);
  const double e32 = endpoint_error(32);
  CHECK(e16 > 1e-12);  // above the floating-point floor
  const double ratio = e16 / e32;
  CHECK(ratio > 10.0);
  CHECK(ratio < 25.0);
}

TEST_CASE("advection composes along time") {
  const Surface torus = Surface::torus();
  Rng rng(31);
  const Flow flow = random_flow(torus, rng, 3);
  const SurfacePoint p{0.21, 0.68};
  const SurfacePoint direct = flow.advect(p, 0.0, 0.83);
  SurfacePoint stepped = flow.advect(p, 0.0, 0.4);
  stepped = flow.advect(stepped, 0.4, 0.83);
  CHECK(torus.dist(direct, stepped) < 1e-10);
}

TEST_CASE("point push: contractible loop returns the core") {
  const Surface disc = Surface::disc();
  Polyline loop = square_loop(0.1, 0.0, 0.06);
  const Flow flow = point_push(disc, loop, 0.04);
  Rng rng(13);
  // Random points in the rigid core around the start vertex.
  const SurfacePoint start = loop.points.front();
  for (int i = 0; i < 100; ++i) {
    const double r = 0.02 * std::sqrt(rng.uniform());
    const double a = rng.uniform(0.0, 2.0 * kPi);
    const SurfacePoint x{start.x + r * std::cos(a), start.y + r * std::sin(a)};
    const SurfacePoint y = flow.advect(x, 0.0, 1.0);
    CHECK(disc.dist(x, y) < 1e-6);
  }
  // A far point does not move at all.
  const SurfacePoint far{-0.35, -0.35};
  const SurfacePoint far1 = flow.advect(far, 0.0, 1.0);
  CHECK(disc.dist(far, far1) < 1e-9);
}

TEST_CASE("point push: torus horizontal loop translates the lift by one period") {
  const Surface torus = Surface::torus();
  Polyline loop;
  loop.closed = true;
  // Lifted coordinates: one full horizontal wind.
  loop.points = {{0.0, 0.5}, {0.25, 0.5}, {0.5, 0.5}, {0.75, 0.5}, {1.0, 0.5}};
  const Flow flow = point_push(torus, loop, 0.05);
  const SurfacePoint start{0.0, 0.5};
  // Halfway in time the core sits half a period away.
  const SurfacePoint mid = flow.advect(start, 0.0, 0.5);
  CHECK(torus.dist(mid, {0.5, 0.5}) < 1e-6);
  const SurfacePoint end = flow.advect(start, 0.0, 1.0);
  CHECK(torus.dist(end, start) < 1e-8);
  // A point far from the tube never moves.
  const SurfacePoint far{0.5, 0.0};
  const SurfacePoint far1 = flow.advect(far, 0.0, 1.0);
  CHECK(torus.dist(far, far1) < 1e-9);
}

TEST_CASE("point push rejects oversized tubes") {
  const Surface disc = Surface::disc();
  // Tube wider than the loop's self-distance scale.
  Polyline tiny = square_loop(0.0, 0.0, 0.02);
  CHECK_THROWS_AS(point_push(disc, tiny, 0.2), Error);
  // Tube violating the boundary collar.
  Polyline near_edge = square_loop(0.45, 0.0, 0.05);
  bool threw = false;
  try {
    point_push(disc, near_edge, 0.05);
  } catch (const Error& e) {
    threw = true;
    CHECK(e.kind() == ErrorKind::TubeTooWide);
  }
  CHECK(threw);
}

TEST_CASE("point push requires a closed polyline") {
  const Surface disc = Surface::disc();
  Polyline open;
  open.closed = false;
  open.points = {{0, 0}, {0.1, 0}};
  CHECK_THROWS_AS(point_push(disc, open, 0.02), Error);
}

TEST_CASE("degenerate polyline segments are merged") {
  const Surface disc = Surface::disc();
  Polyline loop = square_loop(0.0, 0.0, 0.06);
  loop.points.insert(loop.points.begin() + 1, loop.points[1]);  // duplicate vertex
  const Flow flow = point_push(disc, loop, 0.03);
  const SurfacePoint start = loop.points.front();
  const SurfacePoint end = flow.advect(start, 0.0, 1.0);
  CHECK(disc.dist(start, end) < 1e-8);
}

TEST_CASE("StepOut triggers when a flow leaves the disc") {
  const Surface disc = Surface::disc();
  MovingBumpTerm bump;
  bump.ax = 0.45;
  bump.ay = 0.0;
  bump.bx = 0.62;  // beyond the boundary at R ~ 0.5642
  bump.by = 0.0;
  bump.tube_radius = 0.05;
  const Flow bad(disc, {{0.0, 1.0, bump}}, 2048);
  CHECK_THROWS_AS(bad.advect({0.45, 0.0}, 0.0, 1.0), Error);
}

TEST_CASE("area distortion gates") {
  const Surface disc = Surface::disc();
  CHECK(area_distortion(Flow::zero(disc), 2000) == 0.0);
  CHECK(area_distortion(rotation_flow(disc, 2.0 * kPi), 2000) < 1e-8);
  Rng rng(41);
  CHECK(area_distortion(random_flow(disc, rng, 3), 2000) < 1e-4);
  const Flow push = point_push(disc, square_loop(0.05, 0.0, 0.08), 0.04);
  CHECK(area_distortion(push, 2000) < 1e-4);
  const Surface torus = Surface::torus();
  CHECK(area_distortion(random_flow(torus, rng, 3), 2000) < 1e-4);
}

TEST_CASE("flow JSON round trip") {
  const Surface disc = Surface::disc();
  Rng rng(51);
  const Flow original = random_flow(disc, rng, 3);
  const Flow restored = Flow::from_json_string(original.to_json_string());
  Rng probe(52);
  for (int i = 0; i < 20; ++i) {
    const SurfacePoint p = disc.sample(probe);
    const double t = probe.uniform();
    const TangentVector a = original.velocity(t, p);
    const TangentVector b = restored.velocity(t, p);
    CHECK(a.x == doctest::Approx(b.x).epsilon(1e-14));
    CHECK(a.y == doctest::Approx(b.y).epsilon(1e-14));
  }
}

TEST_CASE("polyline JSON round trip") {
  Polyline loop = square_loop(0.1, -0.05, 0.07);
  const Polyline restored = polyline_from_json_string(polyline_to_json_string(loop));
  REQUIRE(restored.points.size() == loop.points.size());
  CHECK(restored.closed == loop.closed);
  for (std::size_t i = 0; i < loop.points.size(); ++i) {
    CHECK(restored.points[i].x == loop.points[i].x);
    CHECK(restored.points[i].y == loop.points[i].y);
  }
  CHECK_THROWS_AS(polyline_from_json_string("{\"points\": [[0, 0], [1]]}"), Error);
}

TEST_CASE("flow JSON rejects unknown kinds") {
  CHECK_THROWS_AS(Flow::from_json_string(
                      "{\"surface\":\"disc\",\"rk4_steps\":64,"
                      "\"segments\":[{\"kind\":\"warp_drive\",\"params\":{},"
                      "\"t_start\":0,\"t_end\":1}]}"),
                  Error);
}
