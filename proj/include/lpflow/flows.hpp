#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "lpflow/geometry.hpp"
#include "lpflow/random.hpp"

namespace lpflow {

// Chain of chart points; segments join consecutive points only. On the torus
// the coordinates are a lift to the plane: consecutive differences are taken
// literally, so loops may wind. A closed polyline lists the closing vertex
// explicitly; its last point must equal the first on the surface (mod 1 on
// the torus).
struct Polyline {
  std::vector<SurfacePoint> points;
  bool closed = false;

  std::size_t segment_count() const;
  double length() const;
  // Drops segments shorter than 1e-9 (merged into their neighbor).
  Polyline simplified() const;
};

// --- Stream-function terms -------------------------------------------------
//
// Every velocity field is the 90-degree-rotated gradient of a stream function,
// differentiated in closed form, so it is divergence-free by construction.

// psi = omega r^2 / 2: rigid rotation about the disc center with angular
// velocity omega. The boundary circle is preserved exactly.
struct RigidRotationTerm {
  double omega = 0.0;
};

// psi = A sin(2 pi (kx x + ky y) + phase) on the torus.
struct FourierTerm {
  int kx = 0;
  int ky = 0;
  double amplitude = 0.0;
  double phase = 0.0;
};

// Translation bump carrying a rigid core along the chart segment a -> b over
// the segment's time span. psi(q) = -|V| (w . n) chi(|w| / tube_radius) with
// w = q - c(t) and n the left normal of the direction of travel. chi is 1 on
// [0, 1/2] and falls smoothly to 0 at 1, so the disc of radius tube_radius/2
// around the moving center translates rigidly and everything outside the tube
// is untouched.
struct MovingBumpTerm {
  double ax = 0.0, ay = 0.0;
  double bx = 0.0, by = 0.0;
  double tube_radius = 0.0;
};

// Sum of Gaussian vortices on the disc, multiplied by a radial plateau cutoff
// that kills the field on the boundary collar:
// psi = xi(|q|) sum_i A_i exp(-|q - c_i|^2 / (2 sigma_i^2)).
struct DiscVortexTerm {
  struct Vortex {
    double cx = 0.0, cy = 0.0;
    double sigma = 0.1;
    double amplitude = 0.0;
  };
  std::vector<Vortex> vortices;
  double cutoff_inner = 0.0;  // xi = 1 for r <= cutoff_inner
  double cutoff_outer = 0.0;  // xi = 0 for r >= cutoff_outer
};

using StreamTerm =
    std::variant<RigidRotationTerm, FourierTerm, MovingBumpTerm, DiscVortexTerm>;

struct FlowSegment {
  double t_start = 0.0;
  double t_end = 1.0;
  StreamTerm term;
};

// Fraction of the disc radius reserved as a boundary collar for compactly
// supported flows (bumps, vortices). Rigid rotations are boundary-tangent and
// exempt.
inline constexpr double kCollarFraction = 0.05;

// Smooth plateau step: 1 on (-inf, 0], 0 on [1, inf), C-infinity monotone in
// between (quotient of exp(-1/t) bumps). value_and_derivative returns both.
double plateau_step(double t);
double plateau_step_derivative(double t);

// Time-dependent area-preserving isotopy of the disc or torus on t in [0,1].
// Segments may overlap; the velocity at time t is the sum over active terms.
class Flow {
 public:
  Flow(Surface surface, std::vector<FlowSegment> segments, int rk4_steps);

  static Flow zero(const Surface& surface);

  const Surface& surface() const { return surface_; }
  const std::vector<FlowSegment>& segments() const { return segments_; }
  int rk4_steps() const { return rk4_steps_; }
  double time_warp() const { return warp_lambda_; }

  TangentVector velocity(double t, const SurfacePoint& p) const;

  // RK4 on a step grid aligned to segment boundaries. Torus coordinates are
  // wrapped at step ends; disc points escaping by more than 1e-9 raise StepOut.
  SurfacePoint advect(SurfacePoint p, double t0, double t1) const;

  struct AdvectResult {
    SurfacePoint point;
    double length = 0.0;  // arc length of the trajectory, RK4-weighted
  };
  AdvectResult advect_with_length(SurfacePoint p, double t0, double t1) const;

  // v'(t, x) = -v(1 - t, x).
  Flow reversed() const;

  // a compressed onto [0, 1/2], b onto [1/2, 1], velocities doubled.
  static Flow concat(const Flow& a, const Flow& b);

  // Reparametrized by phi(t) = t + lambda t (1 - t), |lambda| < 1.
  Flow with_time_warp(double lambda) const;

  std::string to_json_string() const;
  static Flow from_json_string(const std::string& text);

 private:
  struct TermRef {
    const StreamTerm* term;
    double t_start, t_end;
  };
  struct ActiveWindow {
    double t0, t1;
    std::vector<TermRef> terms;
  };

  TangentVector raw_velocity(double t, const SurfacePoint& p) const;
  TangentVector window_velocity(const ActiveWindow& w, double t,
                                const SurfacePoint& p) const;
  SurfacePoint advect_window(const ActiveWindow& w, SurfacePoint p, double a,
                             double b, double* arc) const;
  SurfacePoint advect_impl(SurfacePoint p, double t0, double t1, double* arc) const;
  void rebuild_windows();

  Surface surface_;
  std::vector<FlowSegment> segments_;
  int rk4_steps_;
  double warp_lambda_ = 0.0;
  std::vector<ActiveWindow> windows_;  // disjoint cover of [0,1]
};

// Rigid rotation of the disc by `angle` over unit time. A full turn is a loop
// in the diffeomorphism group: every point returns to its start.
Flow rotation_flow(const Surface& surface, double angle, int rk4_steps = 1024);

// Finger push: the disc of radius tube_radius/2 around the polyline start is
// carried along gamma and returned to its start. Checks the tube against the
// polyline's self-distance (exactly retraced strands exempt) and, on the disc,
// against the boundary collar. rk4_steps = 0 picks a step count matched to the
// bump's speed/width ratio.
Flow point_push(const Surface& surface, const Polyline& gamma, double tube_radius,
                int rk4_steps = 0);

// Smooth random stream-function flow for property sweeps: Fourier modes on the
// torus, collared Gaussian vortices on the disc.
Flow random_flow(const Surface& surface, Rng& rng, int terms = 4);

// Max relative area change over advected grid triangles, a Monte Carlo check
// of area preservation. n_samples is the approximate triangle count.
double area_distortion(const Flow& flow, int n_samples);

// Polyline JSON: {"points": [[x,y],...], "closed": true}.
std::string polyline_to_json_string(const Polyline& line);
Polyline polyline_from_json_string(const std::string& text);

}  // namespace lpflow
