#include "lpflow/geometry.hpp"

#include <cmath>

#include "lpflow/error.hpp"

namespace lpflow {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

double wrap_unit(double x) {
  double r = x - std::floor(x);
  if (r >= 1.0) r -= 1.0;  // guards x = -1e-17 rounding to 1.0
  return r;
}

// Minimum-image difference on the unit circle, in [-1/2, 1/2).
double wrap_diff(double d) {
  d -= std::round(d);
  return d;
}

}  // namespace

std::optional<Surface> Surface::from_name(std::string_view name) {
  if (name == "torus") return Surface::torus();
  if (name == "disc") return Surface::disc();
  if (name == "sphere") return Surface::sphere();
  return std::nullopt;
}

std::string_view Surface::name() const {
  switch (kind_) {
    case SurfaceKind::FlatTorus: return "torus";
    case SurfaceKind::UnitAreaDisc: return "disc";
    case SurfaceKind::RoundSphere: return "sphere";
  }
  return "?";
}

double Surface::radius() const {
  switch (kind_) {
    case SurfaceKind::FlatTorus: return 1.0;
    case SurfaceKind::UnitAreaDisc: return 1.0 / std::sqrt(kPi);
    case SurfaceKind::RoundSphere: return 0.5 / std::sqrt(kPi);
  }
  return 0.0;
}

double Surface::diameter() const {
  switch (kind_) {
    case SurfaceKind::FlatTorus: return std::sqrt(0.5);
    case SurfaceKind::UnitAreaDisc: return 2.0 / std::sqrt(kPi);
    case SurfaceKind::RoundSphere: return kPi * radius();
  }
  return 0.0;
}

bool Surface::contains(const SurfacePoint& p, double tol) const {
  switch (kind_) {
    case SurfaceKind::FlatTorus:
      return std::isfinite(p.x) && std::isfinite(p.y);
    case SurfaceKind::UnitAreaDisc:
      return std::hypot(p.x, p.y) <= radius() + tol;
    case SurfaceKind::RoundSphere: {
      const double r = std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
      return std::abs(r - radius()) <= 1e-12 + tol;
    }
  }
  return false;
}

SurfacePoint Surface::canonical(const SurfacePoint& p) const {
  if (kind_ == SurfaceKind::FlatTorus) return {wrap_unit(p.x), wrap_unit(p.y), 0.0};
  return p;
}

double Surface::dist(const SurfacePoint& p, const SurfacePoint& q) const {
  switch (kind_) {
    case SurfaceKind::FlatTorus: {
      // Per-axis minimum image equals the minimum over the 3x3 translate block.
      const double dx = wrap_diff(q.x - p.x);
      const double dy = wrap_diff(q.y - p.y);
      return std::hypot(dx, dy);
    }
    case SurfaceKind::UnitAreaDisc:
      return std::hypot(q.x - p.x, q.y - p.y);
    case SurfaceKind::RoundSphere: {
      const double R = radius();
      const double dot = (p.x * q.x + p.y * q.y + p.z * q.z) / (R * R);
      const double cx = p.y * q.z - p.z * q.y;
      const double cy = p.z * q.x - p.x * q.z;
      const double cz = p.x * q.y - p.y * q.x;
      const double cross = std::sqrt(cx * cx + cy * cy + cz * cz) / (R * R);
      return R * std::atan2(cross, dot);
    }
  }
  return 0.0;
}

TangentVector Surface::displacement(const SurfacePoint& p, const SurfacePoint& q) const {
  switch (kind_) {
    case SurfaceKind::FlatTorus:
      return {wrap_diff(q.x - p.x), wrap_diff(q.y - p.y), 0.0};
    case SurfaceKind::UnitAreaDisc:
      return {q.x - p.x, q.y - p.y, 0.0};
    case SurfaceKind::RoundSphere:
      throw Error(ErrorKind::InvalidArgument,
                  "displacement: chart displacement undefined on the sphere");
  }
  return {};
}

SurfacePoint Surface::midpoint(const SurfacePoint& p, const SurfacePoint& q) const {
  switch (kind_) {
    case SurfaceKind::FlatTorus: {
      const TangentVector d = displacement(p, q);
      return canonical({p.x + 0.5 * d.x, p.y + 0.5 * d.y, 0.0});
    }
    case SurfaceKind::UnitAreaDisc:
      return {0.5 * (p.x + q.x), 0.5 * (p.y + q.y), 0.0};
    case SurfaceKind::RoundSphere: {
      double mx = p.x + q.x, my = p.y + q.y, mz = p.z + q.z;
      const double m = std::sqrt(mx * mx + my * my + mz * mz);
      if (m < 1e-14)
        throw Error(ErrorKind::InvalidArgument, "midpoint: antipodal sphere points");
      const double s = radius() / m;
      return {s * mx, s * my, s * mz};
    }
  }
  return {};
}

double Surface::tangent_norm(const SurfacePoint& p, const TangentVector& v) const {
  (void)p;  // flat metrics and the induced round metric are chart-Euclidean
  if (kind_ == SurfaceKind::RoundSphere)
    return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
  return std::hypot(v.x, v.y);
}

SurfacePoint Surface::sample(Rng& rng) const {
  switch (kind_) {
    case SurfaceKind::FlatTorus:
      return {rng.uniform(), rng.uniform(), 0.0};
    case SurfaceKind::UnitAreaDisc: {
      const double r = radius() * std::sqrt(rng.uniform());
      const double theta = rng.uniform(0.0, 2.0 * kPi);
      return {r * std::cos(theta), r * std::sin(theta), 0.0};
    }
    case SurfaceKind::RoundSphere: {
      // Archimedes: z uniform, angle uniform.
      const double R = radius();
      const double z = rng.uniform(-R, R);
      const double theta = rng.uniform(0.0, 2.0 * kPi);
      const double rho = std::sqrt(std::max(0.0, R * R - z * z));
      return {rho * std::cos(theta), rho * std::sin(theta), z};
    }
  }
  return {};
}

}  // namespace lpflow
