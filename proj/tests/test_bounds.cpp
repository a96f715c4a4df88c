#include <doctest.h>

#include <cmath>
#include <vector>

#include "lpflow/bounds.hpp"
#include "lpflow/error.hpp"

using namespace lpflow;

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

ProductNeighborhood square_neighborhood(double side, double rho) {
  ProductNeighborhood u;
  u.rho = rho;
  const double h = 0.5 * side;
  u.centers = {{-h, -h}, {h, -h}, {h, h}, {-h, h}};
  return u;
}

}  // namespace

TEST_CASE("product neighborhood measure and validation") {
  const Surface disc = Surface::disc();
  ProductNeighborhood u = square_neighborhood(0.3, 0.02);
  u.validate(disc);
  CHECK(u.mu() == doctest::Approx(std::pow(kPi * 0.02 * 0.02, 4)).epsilon(1e-12));
  CHECK(u.min_center_dist(disc) == doctest::Approx(0.3).epsilon(1e-12));

  ProductNeighborhood overlapping = square_neighborhood(0.03, 0.02);
  CHECK_THROWS_AS(overlapping.validate(disc), Error);

  ProductNeighborhood outside = square_neighborhood(0.75, 0.02);
  CHECK_THROWS_AS(outside.validate(disc), Error);
}

TEST_CASE("diam_gb_upper closed form and limits") {
  const Surface disc = Surface::disc();
  const ProductNeighborhood u = square_neighborhood(0.3, 0.02);
  const double expected = 2.0 * 0.02 * 2.0 * std::sqrt(2.0) / (0.3 - 0.04);
  CHECK(diam_gb_upper(disc, u) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(0.4352).epsilon(1e-3));

  // Linear in rho as rho -> 0 with fixed centers.
  const ProductNeighborhood u_half = square_neighborhood(0.3, 0.01);
  const ProductNeighborhood u_tiny = square_neighborhood(0.3, 0.005);
  const double r1 = diam_gb_upper(disc, u_half) / 0.01;
  const double r2 = diam_gb_upper(disc, u_tiny) / 0.005;
  CHECK(r1 == doctest::Approx(r2).epsilon(0.05));
}

TEST_CASE("sampled straight paths inside U never exceed diam_gb_upper") {
  const Surface disc = Surface::disc();
  const ProductNeighborhood u = square_neighborhood(0.3, 0.02);
  const double bound = diam_gb_upper(disc, u);
  Rng rng(59);
  for (int trial = 0; trial < 1000; ++trial) {
    Configuration a, b;
    for (int i = 0; i < u.n(); ++i) {
      for (Configuration* c : {&a, &b}) {
        const double r = u.rho * std::sqrt(rng.uniform());
        const double t = rng.uniform(0.0, 2.0 * kPi);
        c->points.push_back({u.centers[i].x + r * std::cos(t),
                             u.centers[i].y + r * std::sin(t)});
      }
    }
    // Straight chart path between the two configurations.
    ConfigPath path;
    const int steps = 64;
    for (int k = 0; k <= steps; ++k) {
      const double t = static_cast<double>(k) / steps;
      Configuration c;
      for (int i = 0; i < u.n(); ++i)
        c.points.push_back({a.points[i].x + t * (b.points[i].x - a.points[i].x),
                            a.points[i].y + t * (b.points[i].y - a.points[i].y)});
      path.times.push_back(t);
      path.configs.push_back(std::move(c));
    }
    CHECK(gb_length(disc, path) <= bound + 1e-9);
  }
}

TEST_CASE("assemble_bound: contractible loop is vacuous but sound") {
  const Surface disc = Surface::disc();
  const ProductNeighborhood u = square_neighborhood(0.3, 0.02);
  Polyline gamma;
  gamma.closed = true;
  gamma.points = {{-0.15, -0.15}, {-0.03, -0.15}, {-0.03, -0.03},
                  {-0.15, -0.03}, {-0.15, -0.15}};
  AssembleOptions opts;
  opts.quad.mc_samples = 2000;
  opts.quad.seed = 61;
  opts.cprime = 3.5449;
  const BoundReport rep = assemble_bound(disc, u, gamma, opts);
  CHECK(rep.lh_lower_value == 0.0);
  CHECK(rep.lower == 0.0);
  CHECK(rep.lower <= rep.upper + 3.0 * rep.upper_sigma);
  CHECK(rep.upper > 0.0);
}

TEST_CASE("assemble_bound: encircling braid with k = 6 certifies a positive bound") {
  const Surface disc = Surface::disc();
  const ProductNeighborhood u = square_neighborhood(0.3, 0.02);
  const Polyline gamma = encircling_loop(u.centers[0], u.centers[1], 0.1, 6);
  AssembleOptions opts;
  opts.quad.mc_samples = 2000;
  opts.quad.seed = 67;
  opts.cprime = 3.5449;
  const BoundReport rep = assemble_bound(disc, u, gamma, opts);
  CHECK(rep.winding.rounded(0, 1) == 6);
  CHECK(rep.lh_lower_value == doctest::Approx(2.0 * kPi * 3.0));
  CHECK(rep.lower > 0.0);
  CHECK(rep.lower <= rep.upper + 3.0 * rep.upper_sigma);
}

TEST_CASE("assemble_bound is invariant under multiplying by the full twist") {
  const Surface disc = Surface::disc();
  const ProductNeighborhood u = square_neighborhood(0.3, 0.02);
  const Polyline gamma = encircling_loop(u.centers[0], u.centers[1], 0.1, 2);
  AssembleOptions opts;
  opts.quad.mc_samples = 1000;
  opts.quad.seed = 71;
  opts.cprime = 3.5449;
  const BoundReport base = assemble_bound(disc, u, gamma, opts);
  AssembleOptions twisted = opts;
  twisted.multiply_full_twist = true;
  const BoundReport tw = assemble_bound(disc, u, gamma, twisted);
  // Winding shifts by one on every pair; the center quotient removes it.
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      CHECK(tw.winding.rounded(i, j) == base.winding.rounded(i, j) + 1);
  CHECK(tw.lh_lower_value == base.lh_lower_value);
  CHECK(tw.lower == base.lower);
  CHECK(tw.lower <= tw.upper + 3.0 * tw.upper_sigma);
}

TEST_CASE("assemble_bound rejects tubes through stationary discs") {
  const Surface disc = Surface::disc();
  const ProductNeighborhood u = square_neighborhood(0.3, 0.02);
  // Loop radius so small the tube would swallow the encircled center.
  const Polyline gamma = encircling_loop(u.centers[0], u.centers[1], 0.06, 1);
  AssembleOptions opts;
  opts.quad.mc_samples = 1000;
  opts.cprime = 3.5449;
  bool threw = false;
  try {
    assemble_bound(disc, u, gamma, opts);
  } catch (const Error& e) {
    threw = true;
    CHECK(e.kind() == ErrorKind::TubeTooWide);
  }
  CHECK(threw);
}

TEST_CASE("growth experiment: soundness, monotonicity, affine fit") {
  QuadratureSpec q;
  q.mc_samples = 2000;
  q.time_steps = 128;
  q.seed = 73;
  GrowthOptions opts;
  opts.segments_per_turn = 32;
  const GrowthResult result = growth_experiment(4, q, opts);
  REQUIRE(result.rows.size() == 4);
  double prev = -1.0;
  for (const auto& row : result.rows) {
    CHECK(row.lower <= row.upper + 3.0 * row.sigma);
    CHECK(row.lower >= prev - 1e-12);  // nondecreasing in k
    prev = row.lower;
    CHECK(row.lh_lower == doctest::Approx(2.0 * kPi * std::ceil(row.k / 2.0)));
  }
  CHECK(result.rows[2].lower > result.rows[0].lower);  // strict at the ceil step
  CHECK(result.slope > 0.0);
  CHECK(result.r_squared > 0.99);

  const std::string csv = result.to_csv_string();
  CHECK(csv.find("k,L_h_lower,diam_gb_upper,mu_U,C,lower,upper,sigma") == 0);
  CHECK(result.manifest_json_string().find("\"seed\"") != std::string::npos);
}
