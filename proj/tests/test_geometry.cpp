#include <doctest.h>

#include <cmath>
#include <vector>

#include "lpflow/geometry.hpp"
#include "lpflow/random.hpp"

using namespace lpflow;

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// Independent oracle: polyline length of the great-circle arc between p and q.
double great_circle_length(const Surface& s, const SurfacePoint& p, const SurfacePoint& q,
                           int segments) {
  const double R = s.radius();
  // Spherical linear interpolation via an orthogonal companion of p.
  const double dot = (p.x * q.x + p.y * q.y + p.z * q.z) / (R * R);
  const double omega = std::acos(std::clamp(dot, -1.0, 1.0));
  double ux = q.x - dot * p.x, uy = q.y - dot * p.y, uz = q.z - dot * p.z;
  const double un = std::sqrt(ux * ux + uy * uy + uz * uz);
  if (un < 1e-300) return 0.0;
  ux /= un; uy /= un; uz /= un;
  double total = 0.0;
  double px = p.x, py = p.y, pz = p.z;
  for (int k = 1; k <= segments; ++k) {
    const double a = omega * k / segments;
    const double cx = std::cos(a) * p.x + std::sin(a) * R * ux;
    const double cy = std::cos(a) * p.y + std::sin(a) * R * uy;
    const double cz = std::cos(a) * p.z + std::sin(a) * R * uz;
    total += std::sqrt((cx - px) * (cx - px) + (cy - py) * (cy - py) + (cz - pz) * (cz - pz));
    px = cx; py = cy; pz = cz;
  }
  return total;
}

}  // namespace

TEST_CASE("surface normalization constants") {
  CHECK(Surface::torus().radius() == doctest::Approx(1.0));
  CHECK(Surface::disc().radius() == doctest::Approx(1.0 / std::sqrt(kPi)));
  CHECK(Surface::sphere().radius() == doctest::Approx(0.5 / std::sqrt(kPi)));
  CHECK(Surface::from_name("disc").has_value());
  CHECK(!Surface::from_name("plane").has_value());
}

TEST_CASE("area equals one by chart quadrature") {
  // Disc: midpoint rule for the integral of 2 pi r dr.
  const double R = Surface::disc().radius();
  const int n = 200000;
  double area = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = (i + 0.5) * R / n;
    area += 2.0 * kPi * r * (R / n);
  }
  CHECK(std::abs(area - 1.0) < 1e-10);

  // Sphere: midpoint rule for 2 pi R^2 sin(theta) d theta.
  const double Rs = Surface::sphere().radius();
  double sphere_area = 0.0;
  for (int i = 0; i < n; ++i) {
    const double theta = (i + 0.5) * kPi / n;
    sphere_area += 2.0 * kPi * Rs * Rs * std::sin(theta) * (kPi / n);
  }
  CHECK(std::abs(sphere_area - 1.0) < 1e-10);
}

TEST_CASE("distances: closed forms") {
  const Surface torus = Surface::torus();
  CHECK(torus.dist({0, 0}, {0.5, 0.5}) == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-12));
  CHECK(torus.dist({0.1, 0.1}, {0.9, 0.1}) == doctest::Approx(0.2).epsilon(1e-12));

  const Surface disc = Surface::disc();
  CHECK(disc.dist({0, 0}, {0.3, 0}) == doctest::Approx(0.3).epsilon(1e-12));

  const Surface sphere = Surface::sphere();
  const double R = sphere.radius();
  const SurfacePoint north{0, 0, R};
  const SurfacePoint south{0, 0, -R};
  CHECK(sphere.dist(north, south) == doctest::Approx(kPi / (2.0 * std::sqrt(kPi))).epsilon(1e-12));
  // Cross-check against numerical great-circle integration.
  const SurfacePoint east{R, 0, 0};
  CHECK(sphere.dist(north, east) ==
        doctest::Approx(great_circle_length(sphere, north, east, 4096)).epsilon(1e-6));
}

TEST_CASE("distance is a metric on sampled triples") {
  for (const Surface& s : {Surface::torus(), Surface::disc(), Surface::sphere()}) {
    Rng rng(42);
    for (int i = 0; i < 1000; ++i) {
      const SurfacePoint p = s.sample(rng);
      const SurfacePoint q = s.sample(rng);
      const SurfacePoint r = s.sample(rng);
      const double pq = s.dist(p, q);
      CHECK(pq == doctest::Approx(s.dist(q, p)).epsilon(1e-14));
      CHECK(pq <= s.dist(p, r) + s.dist(r, q) + 1e-12);
      CHECK(pq <= s.diameter() + 1e-12);
    }
    CHECK(s.dist({0.25, 0.75}, {0.25, 0.75}) == 0.0);
  }
}

TEST_CASE("diameters are attained") {
  CHECK(Surface::torus().dist({0, 0}, {0.5, 0.5}) ==
        doctest::Approx(Surface::torus().diameter()));
  const double R = Surface::disc().radius();
  CHECK(Surface::disc().dist({-R, 0}, {R, 0}) == doctest::Approx(Surface::disc().diameter()));
  const double Rs = Surface::sphere().radius();
  CHECK(Surface::sphere().dist({0, 0, Rs}, {0, 0, -Rs}) ==
        doctest::Approx(Surface::sphere().diameter()));
}

TEST_CASE("tangent norms") {
  const Surface torus = Surface::torus();
  CHECK(torus.tangent_norm({0.3, 0.7}, {3, 4}) == doctest::Approx(5.0));
  CHECK(torus.tangent_norm({0.3, 0.7}, {0, 0}) == 0.0);
  const Surface sphere = Surface::sphere();
  const double R = sphere.radius();
  CHECK(sphere.tangent_norm({0, 0, R}, {2, 0, 0}) == doctest::Approx(2.0));
}

TEST_CASE("sampler determinism") {
  const Surface disc = Surface::disc();
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) {
    const SurfacePoint p = disc.sample(a);
    const SurfacePoint q = disc.sample(b);
    CHECK(p.x == q.x);
    CHECK(p.y == q.y);
  }
}

TEST_CASE("torus sampler uniformity (chi-squared on a 10x10 grid)") {
  const Surface torus = Surface::torus();
  Rng rng(2024);
  const int n = 10000;
  int counts[10][10] = {};
  for (int i = 0; i < n; ++i) {
    const SurfacePoint p = torus.sample(rng);
    ++counts[static_cast<int>(p.x * 10)][static_cast<int>(p.y * 10)];
  }
  const double expected = n / 100.0;
  double chi2 = 0.0;
  for (auto& row : counts)
    for (int c : row) chi2 += (c - expected) * (c - expected) / expected;
  // 0.99 quantile of chi-squared with 99 dof via Wilson-Hilferty.
  const double df = 99.0;
  const double z = 2.3263478740408408;  // Phi^{-1}(0.99)
  const double threshold =
      df * std::pow(1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df)), 3.0);
  CHECK(chi2 < threshold);
}

TEST_CASE("disc sampler mean radius") {
  const Surface disc = Surface::disc();
  Rng rng(99);
  const int n = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const SurfacePoint p = disc.sample(rng);
    const double r = std::hypot(p.x, p.y);
    sum += r;
    sum_sq += r * r;
  }
  const double mean = sum / n;
  const double var = (sum_sq - n * mean * mean) / (n - 1);
  const double sigma_mean = std::sqrt(var / n);
  const double expected = (2.0 / 3.0) * disc.radius();
  CHECK(std::abs(mean - expected) < 3.0 * sigma_mean);
}

TEST_CASE("sphere sampler stays on the sphere") {
  const Surface sphere = Surface::sphere();
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const SurfacePoint p = sphere.sample(rng);
    CHECK(sphere.contains(p, 1e-12));
  }
}

TEST_CASE("canonical wraps torus coordinates") {
  const Surface torus = Surface::torus();
  const SurfacePoint p = torus.canonical({1.25, -0.25});
  CHECK(p.x == doctest::Approx(0.25));
  CHECK(p.y == doctest::Approx(0.75));
  const SurfacePoint q = torus.canonical({-1e-17, 0.5});
  CHECK(q.x >= 0.0);
  CHECK(q.x < 1.0);
}

TEST_CASE("midpoint lies halfway") {
  const Surface torus = Surface::torus();
  const SurfacePoint m = torus.midpoint({0.9, 0.5}, {0.1, 0.5});
  CHECK(torus.dist(m, {0.0, 0.5}) < 1e-12);  // crosses the seam
  const Surface disc = Surface::disc();
  const SurfacePoint md = disc.midpoint({-0.2, 0}, {0.4, 0.2});
  CHECK(md.x == doctest::Approx(0.1));
  CHECK(md.y == doctest::Approx(0.1));
}
