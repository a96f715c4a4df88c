#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "lpflow/confspace.hpp"
#include "lpflow/error.hpp"
#include "lpflow/flows.hpp"

using namespace lpflow;

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kSqrt2 = 1.41421356237309504880168872420969808;

// Two points a distance `sep` apart rotating rigidly about their midpoint.
ConfigPath pair_rotation_path(double sep, double turns, int steps) {
  ConfigPath path;
  for (int k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) / steps;
    const double a = 2.0 * kPi * turns * t;
    Configuration c;
    c.points.push_back({0.5 * sep * std::cos(a), 0.5 * sep * std::sin(a)});
    c.points.push_back({-0.5 * sep * std::cos(a), -0.5 * sep * std::sin(a)});
    path.times.push_back(t);
    path.configs.push_back(std::move(c));
  }
  return path;
}

// One point fixed at the origin, the other moving straight in from gap s0 to
// gap s1.
ConfigPath straight_approach_path(double s0, double s1, int steps) {
  ConfigPath path;
  for (int k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) / steps;
    Configuration c;
    c.points.push_back({0.0, 0.0});
    c.points.push_back({s0 + t * (s1 - s0), 0.0});
    path.times.push_back(t);
    path.configs.push_back(std::move(c));
  }
  return path;
}

}  // namespace

TEST_CASE("diag_dist closed forms") {
  const Surface torus = Surface::torus();
  Configuration x;
  x.points = {{0.0, 0.0}, {0.3, 0.4}};
  CHECK(diag_dist(torus, x) == doctest::Approx(0.5 / kSqrt2).epsilon(1e-12));

  // Triangle with side lengths 0.2, 0.5, 0.6; the minimum rules.
  const Surface disc = Surface::disc();
  const double cy = std::sqrt(0.36 - 0.375 * 0.375);
  const double sx = (0.2 + 0.375) / 3.0, sy = cy / 3.0;  // recenter into the disc
  Configuration tri;
  tri.points = {{-sx, -sy}, {0.2 - sx, -sy}, {0.375 - sx, cy - sy}};
  CHECK(disc.dist(tri.points[0], tri.points[1]) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(disc.dist(tri.points[1], tri.points[2]) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(disc.dist(tri.points[0], tri.points[2]) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(diag_dist(disc, tri) == doctest::Approx(0.2 / kSqrt2).epsilon(1e-9));
}

TEST_CASE("diag_dist scales with the configuration") {
  const Surface disc = Surface::disc();
  Configuration x, x2;
  x.points = {{0.05, 0.02}, {-0.08, 0.1}, {0.12, -0.07}};
  for (const auto& p : x.points) x2.points.push_back({2 * p.x, 2 * p.y});
  CHECK(diag_dist(disc, x2) == doctest::Approx(2.0 * diag_dist(disc, x)).epsilon(1e-12));
}

TEST_CASE("diag_dist rejects coincident points") {
  const Surface disc = Surface::disc();
  Configuration x;
  x.points = {{0.1, 0.1}, {0.1, 0.1 + 1e-12}};
  CHECK_THROWS_AS(diag_dist(disc, x), Error);
}

TEST_CASE("gb_norm closed forms") {
  const Surface disc = Surface::disc();
  // Square of side 1/sqrt(2): diagonal distance exactly 0.5.
  const double half = 0.5 / kSqrt2;
  Configuration x;
  x.points = {{-half, -half}, {half, -half}, {half, half}, {-half, half}};
  CHECK(diag_dist(disc, x) == doctest::Approx(0.5).epsilon(1e-12));
  ConfigTangent v;
  v.v = {{3, 0}, {0, 4}, {0, 0}, {0, 0}};
  CHECK(gb_norm(disc, x, v) == doctest::Approx(10.0).epsilon(1e-12));
  ConfigTangent zero;
  zero.v = {{0, 0}, {0, 0}, {0, 0}, {0, 0}};
  CHECK(gb_norm(disc, x, zero) == 0.0);
}

TEST_CASE("gb_norm grows as 1/d toward the diagonal") {
  const Surface disc = Surface::disc();
  ConfigTangent v;
  v.v = {{1, 0}, {0, 0}};
  double prev = 0.0;
  for (double sep : {0.4, 0.2, 0.1, 0.05}) {
    Configuration x;
    x.points = {{0, 0}, {sep, 0}};
    const double norm = gb_norm(disc, x, v);
    CHECK(norm == doctest::Approx(kSqrt2 / sep).epsilon(1e-12));
    CHECK(norm > prev);
    prev = norm;
  }
}

TEST_CASE("gb_length: stationary path is zero") {
  const Surface disc = Surface::disc();
  ConfigPath path;
  for (int k = 0; k <= 10; ++k) {
    Configuration c;
    c.points = {{0.1, 0.0}, {-0.1, 0.0}};
    path.times.push_back(k / 10.0);
    path.configs.push_back(c);
  }
  CHECK(gb_length(disc, path) == 0.0);
}

TEST_CASE("gb_length: rigid pair rotation has length 2 pi per turn") {
  const Surface disc = Surface::disc();
  const ConfigPath path = pair_rotation_path(0.3, 1.0, 10000);
  CHECK(gb_length(disc, path) == doctest::Approx(2.0 * kPi).epsilon(0.005));
}

TEST_CASE("gb_length: straight approach integrates sqrt(2) ln(s0/s1)") {
  const Surface disc = Surface::disc();
  const double s0 = 0.4, s1 = 0.1;
  const ConfigPath path = straight_approach_path(s0, s1, 20000);
  CHECK(gb_length(disc, path) ==
        doctest::Approx(kSqrt2 * std::log(s0 / s1)).epsilon(0.005));
}

TEST_CASE("gb_length sandwich between gn-length over extreme distances") {
  const Surface torus = Surface::torus();
  Rng rng(77);
  const Flow flow = random_flow(torus, rng, 3);
  Configuration x0;
  x0.points = {{0.1, 0.2}, {0.6, 0.3}, {0.4, 0.8}};
  const ConfigPath path = lift_trajectories(flow, x0);
  double gn_total = 0.0;
  double d_min = 1e300, d_max = 0.0;
  for (std::size_t k = 0; k + 1 < path.configs.size(); ++k) {
    gn_total += gn_step(torus, path.configs[k], path.configs[k + 1]);
    const Configuration mid = config_midpoint(torus, path.configs[k], path.configs[k + 1]);
    for (const Configuration* c : {&path.configs[k], &path.configs[k + 1], &mid}) {
      const double d = diag_dist(torus, *c);
      d_min = std::min(d_min, d);
      d_max = std::max(d_max, d);
    }
  }
  const double len = gb_length(torus, path);
  CHECK(len >= gn_total / d_max - 1e-10);
  CHECK(len <= gn_total / d_min + 1e-10);
}

TEST_CASE("gb_length is stable under path refinement") {
  const Surface disc = Surface::disc();
  const double a = gb_length(disc, pair_rotation_path(0.3, 1.0, 4000));
  const double b = gb_length(disc, pair_rotation_path(0.3, 1.0, 8000));
  CHECK(a == doctest::Approx(b).epsilon(1e-6));
}

TEST_CASE("lift_trajectories: zero flow gives a constant path") {
  const Surface torus = Surface::torus();
  Configuration x0;
  x0.points = {{0.2, 0.2}, {0.7, 0.7}};
  const ConfigPath path = lift_trajectories(Flow::zero(torus), x0);
  for (const auto& c : path.configs)
    for (int i = 0; i < 2; ++i)
      CHECK(torus.dist(c.points[i], x0.points[i]) < 1e-12);
}

TEST_CASE("lift_trajectories: point push loops close") {
  const Surface disc = Surface::disc();
  Polyline loop;
  loop.closed = true;
  loop.points = {{-0.1, -0.1}, {0.0, -0.1}, {0.0, 0.0}, {-0.1, 0.0}, {-0.1, -0.1}};
  const Flow flow = point_push(disc, loop, 0.03);
  Configuration x0;
  x0.points = {{-0.1, -0.1}, {0.25, 0.25}, {0.25, -0.25}, {-0.25, 0.25}};
  const ConfigPath path = lift_trajectories(flow, x0);
  for (int i = 0; i < 4; ++i)
    CHECK(disc.dist(path.configs.front().points[i], path.configs.back().points[i]) < 1e-6);
}

TEST_CASE("lift_trajectories is equivariant under permuting the configuration") {
  const Surface torus = Surface::torus();
  Rng rng(5);
  const Flow flow = random_flow(torus, rng, 2);
  Configuration x0, x0_perm;
  x0.points = {{0.1, 0.4}, {0.5, 0.9}, {0.8, 0.2}};
  x0_perm.points = {x0.points[2], x0.points[0], x0.points[1]};
  const ConfigPath a = lift_trajectories(flow, x0);
  const ConfigPath b = lift_trajectories(flow, x0_perm);
  REQUIRE(a.configs.size() == b.configs.size());
  for (std::size_t k = 0; k < a.configs.size(); ++k) {
    CHECK(torus.dist(a.configs[k].points[2], b.configs[k].points[0]) < 1e-12);
    CHECK(torus.dist(a.configs[k].points[0], b.configs[k].points[1]) < 1e-12);
  }
}

TEST_CASE("lift_trajectories raises CoincidentPoints on a merging start") {
  const Surface disc = Surface::disc();
  Configuration bad;
  bad.points = {{0.1, 0.1}, {0.1, 0.1}};
  CHECK_THROWS_AS(lift_trajectories(Flow::zero(disc), bad), Error);
}

TEST_CASE("escape_check: stationary path") {
  const Surface disc = Surface::disc();
  ConfigPath path;
  for (int k = 0; k <= 4; ++k) {
    Configuration c;
    c.points = {{0.1, 0.0}, {-0.1, 0.0}};
    path.times.push_back(k / 4.0);
    path.configs.push_back(c);
  }
  const EscapeReport rep = escape_check(disc, path);
  CHECK(rep.ok);
  CHECK(rep.ell == 0.0);
  CHECK(rep.d_start == doctest::Approx(rep.d_end));
}

TEST_CASE("escape_check: straight approach truncated at gb-length 1/2") {
  const Surface disc = Surface::disc();
  // Run well past the truncation point; escape_check stops at ell = 1/2.
  const ConfigPath path = straight_approach_path(0.4, 0.2, 40000);
  const EscapeReport rep = escape_check(disc, path);
  CHECK(rep.ok);
  CHECK(rep.ell == doctest::Approx(0.5).epsilon(1e-3));
  const double expected_ratio = std::exp(-0.5 / kSqrt2);
  CHECK(rep.d_end / rep.d_start == doctest::Approx(expected_ratio).epsilon(0.005));
}

TEST_CASE("escape_check holds on random flow paths") {
  const Surface torus = Surface::torus();
  Rng rng(123);
  for (int trial = 0; trial < 50; ++trial) {
    Rng flow_rng = rng.fork(trial);
    Flow flow = random_flow(torus, flow_rng, 3);
    Configuration x0;
    for (int i = 0; i < 4; ++i) x0.points.push_back(torus.sample(rng));
    if (min_pairwise_dist(torus, x0) < 1e-3) continue;
    const ConfigPath path = lift_trajectories(flow, x0);
    const EscapeReport rep = escape_check(torus, path);
    CHECK(rep.ok);
  }
}

TEST_CASE("path CSV round trip") {
  const Surface disc = Surface::disc();
  const ConfigPath path = pair_rotation_path(0.25, 1.0, 32);
  std::stringstream ss;
  write_path_csv(disc, path, ss);
  const ConfigPath back = read_path_csv(ss);
  REQUIRE(back.configs.size() == path.configs.size());
  REQUIRE(back.n() == 2);
  for (std::size_t k = 0; k < path.configs.size(); ++k)
    for (int i = 0; i < 2; ++i)
      CHECK(disc.dist(back.configs[k].points[i], path.configs[k].points[i]) < 1e-15);
}
