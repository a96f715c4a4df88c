#pragma once

#include <optional>
#include <string_view>

#include "lpflow/random.hpp"

namespace lpflow {

// Surfaces are normalized to total area 1:
//   flat torus  [0,1)^2,
//   round disc  of radius 1/sqrt(pi),
//   round sphere of radius 1/(2 sqrt(pi)).
enum class SurfaceKind { FlatTorus, UnitAreaDisc, RoundSphere };

// Chart coordinates. Torus: (x, y) in [0,1)^2, z unused. Disc: (x, y) with
// x^2 + y^2 <= 1/pi, z unused. Sphere: ambient 3-vector of norm 1/(2 sqrt(pi)).
struct SurfacePoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// Tangent at a base point, units length/time. Flat surfaces use (x, y);
// the sphere uses an ambient vector orthogonal to the radius.
struct TangentVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline TangentVector operator+(TangentVector a, TangentVector b) {
  return {a.x + b.x, a.y + b.y, a.z + b.z};
}
inline TangentVector operator*(double s, TangentVector v) {
  return {s * v.x, s * v.y, s * v.z};
}

class Surface {
 public:
  static Surface torus() { return Surface(SurfaceKind::FlatTorus); }
  static Surface disc() { return Surface(SurfaceKind::UnitAreaDisc); }
  static Surface sphere() { return Surface(SurfaceKind::RoundSphere); }
  static std::optional<Surface> from_name(std::string_view name);

  SurfaceKind kind() const { return kind_; }
  std::string_view name() const;

  double area() const { return 1.0; }

  // Disc and sphere radius; the torus reports its side length (1).
  double radius() const;
  double diameter() const;
  bool has_boundary() const { return kind_ == SurfaceKind::UnitAreaDisc; }
  bool is_flat() const { return kind_ != SurfaceKind::RoundSphere; }

  bool contains(const SurfacePoint& p, double tol = 1e-9) const;

  // Canonical chart representative (torus coordinates wrapped into [0,1)).
  SurfacePoint canonical(const SurfacePoint& p) const;

  // Riemannian distance: torus via the minimum over lattice translates,
  // disc via the chord, sphere via the great-circle arc.
  double dist(const SurfacePoint& p, const SurfacePoint& q) const;

  // Minimal chart displacement from p to q (flat surfaces only); the torus
  // returns the minimum-image difference.
  TangentVector displacement(const SurfacePoint& p, const SurfacePoint& q) const;

  // Geodesic midpoint. Torus: midpoint of the minimal-image segment.
  SurfacePoint midpoint(const SurfacePoint& p, const SurfacePoint& q) const;

  double tangent_norm(const SurfacePoint& p, const TangentVector& v) const;

  // Uniform with respect to area; deterministic given the stream.
  SurfacePoint sample(Rng& rng) const;

 private:
  explicit Surface(SurfaceKind kind) : kind_(kind) {}
  SurfaceKind kind_;
};

}  // namespace lpflow
