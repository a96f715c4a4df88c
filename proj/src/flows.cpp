#include "lpflow/flows.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <utility>

#include "lpflow/error.hpp"

namespace lpflow {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kMergeTol = 1e-9;

double exp_bump(double t) {  // exp(-1/t) for t > 0, else 0
  if (t <= 0.0) return 0.0;
  return std::exp(-1.0 / t);
}

double exp_bump_derivative(double t) {
  if (t <= 0.0) return 0.0;
  return std::exp(-1.0 / t) / (t * t);
}

struct Vec2 {
  double x = 0.0, y = 0.0;
};

Vec2 perp(Vec2 v) { return {-v.y, v.x}; }  // rotate +90 degrees

double point_segment_dist(Vec2 p, Vec2 a, Vec2 b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p.x - a.x) * vx + (p.y - a.y) * vy) / len2, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

double orient(Vec2 a, Vec2 b, Vec2 c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const double o1 = orient(a, b, c), o2 = orient(a, b, d);
  const double o3 = orient(c, d, a), o4 = orient(c, d, b);
  return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != 0 && o2 != 0 &&
         o3 != 0 && o4 != 0;
}

double segment_segment_dist(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  if (segments_intersect(a, b, c, d)) return 0.0;
  return std::min(std::min(point_segment_dist(a, c, d), point_segment_dist(b, c, d)),
                  std::min(point_segment_dist(c, a, b), point_segment_dist(d, a, b)));
}

}  // namespace

// --- plateau step ------------------------------------------------------------

double plateau_step(double t) {
  if (t <= 1e-9) return 0.0;
  if (t >= 1.0 - 1e-9) return 1.0;
  const double f = exp_bump(t);
  const double g = exp_bump(1.0 - t);
  return f / (f + g);
}

double plateau_step_derivative(double t) {
  if (t <= 1e-9 || t >= 1.0 - 1e-9) return 0.0;
  const double f = exp_bump(t);
  const double g = exp_bump(1.0 - t);
  const double fp = exp_bump_derivative(t);
  const double gp = exp_bump_derivative(1.0 - t);
  const double denom = (f + g) * (f + g);
  return (fp * g + f * gp) / denom;
}

namespace {

// Bump profile: 1 on [0, 1/2], smooth monotone fall to 0 at 1.
double bump_profile(double u) {
  if (u <= 0.5) return 1.0;
  if (u >= 1.0) return 0.0;
  return plateau_step(2.0 * (1.0 - u));
}

double bump_profile_derivative(double u) {
  if (u <= 0.5 || u >= 1.0) return 0.0;
  return -2.0 * plateau_step_derivative(2.0 * (1.0 - u));
}

// Radial cutoff: 1 for r <= inner, 0 for r >= outer.
double radial_cutoff(double r, double inner, double outer) {
  if (r <= inner) return 1.0;
  if (r >= outer) return 0.0;
  return 1.0 - plateau_step((r - inner) / (outer - inner));
}

double radial_cutoff_derivative(double r, double inner, double outer) {
  if (r <= inner || r >= outer) return 0.0;
  return -plateau_step_derivative((r - inner) / (outer - inner)) / (outer - inner);
}

Vec2 min_image(const Surface& s, Vec2 d) {
  if (s.kind() == SurfaceKind::FlatTorus) {
    d.x -= std::round(d.x);
    d.y -= std::round(d.y);
  }
  return d;
}

Vec2 term_velocity(const Surface& s, const StreamTerm& term, double t0, double t1,
                   double t, Vec2 q) {
  if (const auto* rot = std::get_if<RigidRotationTerm>(&term)) {
    return {-rot->omega * q.y, rot->omega * q.x};
  }
  if (const auto* fm = std::get_if<FourierTerm>(&term)) {
    const double theta = kTwoPi * (fm->kx * q.x + fm->ky * q.y) + fm->phase;
    const double g = kTwoPi * fm->amplitude * std::cos(theta);
    return {-g * fm->ky, g * fm->kx};
  }
  if (const auto* bump = std::get_if<MovingBumpTerm>(&term)) {
    const double dur = t1 - t0;
    const double frac = (t - t0) / dur;
    const Vec2 c{bump->ax + frac * (bump->bx - bump->ax),
                 bump->ay + frac * (bump->by - bump->ay)};
    const Vec2 vel{(bump->bx - bump->ax) / dur, (bump->by - bump->ay) / dur};
    const double speed = std::hypot(vel.x, vel.y);
    if (speed == 0.0) return {};
    const Vec2 w = min_image(s, {q.x - c.x, q.y - c.y});
    const double r = std::hypot(w.x, w.y);
    const double u = r / bump->tube_radius;
    if (u >= 1.0) return {};
    const Vec2 dir{vel.x / speed, vel.y / speed};
    const double chi = bump_profile(u);
    Vec2 out{speed * chi * dir.x, speed * chi * dir.y};
    const double dchi = bump_profile_derivative(u);
    if (dchi != 0.0 && r > 1e-300) {
      const Vec2 n = perp(dir);
      const double wn = w.x * n.x + w.y * n.y;
      const double coef = speed * wn * dchi / (bump->tube_radius * r);
      const Vec2 jw = perp(w);
      out.x -= coef * jw.x;
      out.y -= coef * jw.y;
    }
    return out;
  }
  if (const auto* vort = std::get_if<DiscVortexTerm>(&term)) {
    // psi = xi(r) G(q); grad psi = xi'(r) (q/r) G + xi grad G.
    const double r = std::hypot(q.x, q.y);
    const double xi = radial_cutoff(r, vort->cutoff_inner, vort->cutoff_outer);
    const double dxi = radial_cutoff_derivative(r, vort->cutoff_inner, vort->cutoff_outer);
    if (xi == 0.0 && dxi == 0.0) return {};
    double g = 0.0;
    Vec2 grad_g{};
    for (const auto& v : vort->vortices) {
      const double dx = q.x - v.cx, dy = q.y - v.cy;
      const double e = v.amplitude * std::exp(-0.5 * (dx * dx + dy * dy) / (v.sigma * v.sigma));
      g += e;
      grad_g.x -= e * dx / (v.sigma * v.sigma);
      grad_g.y -= e * dy / (v.sigma * v.sigma);
    }
    Vec2 grad{xi * grad_g.x, xi * grad_g.y};
    if (dxi != 0.0 && r > 1e-300) {
      grad.x += dxi * (q.x / r) * g;
      grad.y += dxi * (q.y / r) * g;
    }
    return perp(grad);
  }
  return {};
}

}  // namespace

// --- Polyline ----------------------------------------------------------------

std::size_t Polyline::segment_count() const {
  return points.size() < 2 ? 0 : points.size() - 1;
}

double Polyline::length() const {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i)
    total += std::hypot(points[i + 1].x - points[i].x, points[i + 1].y - points[i].y);
  return total;
}

Polyline Polyline::simplified() const {
  Polyline out;
  out.closed = closed;
  for (const auto& p : points) {
    if (!out.points.empty()) {
      const auto& last = out.points.back();
      if (std::hypot(p.x - last.x, p.y - last.y) < kMergeTol) continue;
    }
    out.points.push_back(p);
  }
  return out;
}

// --- Flow --------------------------------------------------------------------

Flow::Flow(Surface surface, std::vector<FlowSegment> segments, int rk4_steps)
    : surface_(surface), segments_(std::move(segments)), rk4_steps_(rk4_steps) {
  if (surface_.kind() == SurfaceKind::RoundSphere)
    throw Error(ErrorKind::InvalidArgument, "flows are supported on the torus and disc only");
  if (rk4_steps_ < 1)
    throw Error(ErrorKind::InvalidArgument, "rk4_steps must be at least 1");
  for (const auto& seg : segments_) {
    if (!(seg.t_start >= -1e-12 && seg.t_end <= 1.0 + 1e-12 && seg.t_start < seg.t_end))
      throw Error(ErrorKind::InvalidArgument, "flow segment times must satisfy 0 <= t_start < t_end <= 1");
  }
  rebuild_windows();
}

Flow Flow::zero(const Surface& surface) { return Flow(surface, {}, 16); }

void Flow::rebuild_windows() {
  windows_.clear();
  std::set<double> cuts{0.0, 1.0};
  for (const auto& seg : segments_) {
    cuts.insert(std::clamp(seg.t_start, 0.0, 1.0));
    cuts.insert(std::clamp(seg.t_end, 0.0, 1.0));
  }
  std::vector<double> times(cuts.begin(), cuts.end());
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    ActiveWindow w;
    w.t0 = times[i];
    w.t1 = times[i + 1];
    const double mid = 0.5 * (w.t0 + w.t1);
    for (const auto& seg : segments_)
      if (seg.t_start <= mid && mid < seg.t_end)
        w.terms.push_back({&seg.term, seg.t_start, seg.t_end});
    windows_.push_back(std::move(w));
  }
}

TangentVector Flow::raw_velocity(double t, const SurfacePoint& p) const {
  if (windows_.empty()) return {};
  // Find the window containing t; t = 1 uses the last window's field.
  auto it = std::upper_bound(windows_.begin(), windows_.end(), t,
                             [](double v, const ActiveWindow& w) { return v < w.t1; });
  if (it == windows_.end()) it = std::prev(windows_.end());
  return window_velocity(*it, t, p);
}

TangentVector Flow::window_velocity(const ActiveWindow& w, double t,
                                    const SurfacePoint& p) const {
  Vec2 total{};
  for (const TermRef& ref : w.terms) {
    const Vec2 v =
        term_velocity(surface_, *ref.term, ref.t_start, ref.t_end, t, {p.x, p.y});
    total.x += v.x;
    total.y += v.y;
  }
  return {total.x, total.y, 0.0};
}

TangentVector Flow::velocity(double t, const SurfacePoint& p) const {
  if (warp_lambda_ == 0.0) return raw_velocity(t, p);
  const double phi = t + warp_lambda_ * t * (1.0 - t);
  const double dphi = 1.0 + warp_lambda_ * (1.0 - 2.0 * t);
  return dphi * raw_velocity(phi, p);
}

SurfacePoint Flow::advect_window(const ActiveWindow& w, SurfacePoint p, double a,
                                 double b, double* arc) const {
  if (w.terms.empty()) return p;

  const double span = w.t1 - w.t0;
  const int m = std::max<int>(1, static_cast<int>(std::llround(rk4_steps_ * span)));
  const double h = span / m;

  const bool all_bumps =
      std::all_of(w.terms.begin(), w.terms.end(), [](const TermRef& ref) {
        return std::holds_alternative<MovingBumpTerm>(*ref.term);
      });
  const double R = surface_.radius();

  double cur = a;
  Vec2 x{p.x, p.y};
  while (cur < b - 1e-15) {
    const int idx = static_cast<int>(std::floor((cur - w.t0) / h + 1e-9));
    double next = w.t0 + (idx + 1) * h;
    if (next > b || next <= cur) next = b;

    bool skip = false;
    if (all_bumps) {
      // Outside every bump's swept capsule the velocity vanishes identically
      // over the whole step, so the point does not move.
      skip = true;
      for (const TermRef& ref : w.terms) {
        const auto& bump = std::get<MovingBumpTerm>(*ref.term);
        const double dur = ref.t_end - ref.t_start;
        const double f0 = (cur - ref.t_start) / dur;
        const double f1 = (next - ref.t_start) / dur;
        Vec2 c0{bump.ax + f0 * (bump.bx - bump.ax), bump.ay + f0 * (bump.by - bump.ay)};
        Vec2 c1{bump.ax + f1 * (bump.bx - bump.ax), bump.ay + f1 * (bump.by - bump.ay)};
        // Move the capsule into the point's lattice copy on the torus.
        const Vec2 rel = min_image(surface_, {x.x - c0.x, x.y - c0.y});
        const Vec2 shift{(x.x - c0.x) - rel.x, (x.y - c0.y) - rel.y};
        c0.x += shift.x;
        c0.y += shift.y;
        c1.x += shift.x;
        c1.y += shift.y;
        if (point_segment_dist(x, c0, c1) <= bump.tube_radius + 1e-12) {
          skip = false;
          break;
        }
      }
    }

    if (!skip) {
      const double step = next - cur;
      auto eval = [&](double t, Vec2 q) {
        const TangentVector v = window_velocity(w, t, {q.x, q.y, 0.0});
        return Vec2{v.x, v.y};
      };
      const Vec2 k1 = eval(cur, x);
      const Vec2 k2 = eval(cur + 0.5 * step, {x.x + 0.5 * step * k1.x, x.y + 0.5 * step * k1.y});
      const Vec2 k3 = eval(cur + 0.5 * step, {x.x + 0.5 * step * k2.x, x.y + 0.5 * step * k2.y});
      const Vec2 k4 = eval(cur + step, {x.x + step * k3.x, x.y + step * k3.y});
      x.x += step / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
      x.y += step / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
      if (arc != nullptr) {
        *arc += step / 6.0 *
                (std::hypot(k1.x, k1.y) + 2.0 * std::hypot(k2.x, k2.y) +
                 2.0 * std::hypot(k3.x, k3.y) + std::hypot(k4.x, k4.y));
      }
      if (surface_.has_boundary()) {
        const double r = std::hypot(x.x, x.y);
        if (r > R + 1e-9)
          throw Error(ErrorKind::StepOut,
                      "advect: disc point escaped the domain (integrator or collar misconfiguration)");
      }
    }
    cur = next;
  }
  return {x.x, x.y, 0.0};
}

SurfacePoint Flow::advect_impl(SurfacePoint p, double t0, double t1, double* arc) const {
  if (!(t0 >= -1e-12 && t1 <= 1.0 + 1e-12 && t0 <= t1))
    throw Error(ErrorKind::InvalidArgument, "advect requires 0 <= t0 <= t1 <= 1");
  if (warp_lambda_ != 0.0) {
    // Reparametrized trajectories coincide with base trajectories at the
    // warped times, and arc length is reparametrization-invariant.
    Flow base = *this;
    base.warp_lambda_ = 0.0;
    auto phi = [&](double t) { return t + warp_lambda_ * t * (1.0 - t); };
    return base.advect_impl(p, phi(t0), phi(t1), arc);
  }
  t0 = std::clamp(t0, 0.0, 1.0);
  t1 = std::clamp(t1, 0.0, 1.0);
  SurfacePoint x = p;
  auto first = std::upper_bound(windows_.begin(), windows_.end(), t0,
                                [](double v, const ActiveWindow& w) { return v < w.t1; });
  for (auto it = first; it != windows_.end() && it->t0 < t1; ++it) {
    const double a = std::max(t0, it->t0);
    const double b = std::min(t1, it->t1);
    if (b - a <= 1e-15) continue;
    x = advect_window(*it, x, a, b, arc);
  }
  return surface_.canonical(x);
}

SurfacePoint Flow::advect(SurfacePoint p, double t0, double t1) const {
  return advect_impl(p, t0, t1, nullptr);
}

Flow::AdvectResult Flow::advect_with_length(SurfacePoint p, double t0, double t1) const {
  AdvectResult res;
  res.point = advect_impl(p, t0, t1, &res.length);
  return res;
}

Flow Flow::reversed() const {
  std::vector<FlowSegment> segs;
  segs.reserve(segments_.size());
  for (const auto& seg : segments_) {
    FlowSegment r;
    r.t_start = 1.0 - seg.t_end;
    r.t_end = 1.0 - seg.t_start;
    r.term = seg.term;
    if (auto* rot = std::get_if<RigidRotationTerm>(&r.term)) {
      rot->omega = -rot->omega;
    } else if (auto* fm = std::get_if<FourierTerm>(&r.term)) {
      fm->amplitude = -fm->amplitude;
    } else if (auto* bump = std::get_if<MovingBumpTerm>(&r.term)) {
      std::swap(bump->ax, bump->bx);
      std::swap(bump->ay, bump->by);
    } else if (auto* vort = std::get_if<DiscVortexTerm>(&r.term)) {
      for (auto& v : vort->vortices) v.amplitude = -v.amplitude;
    }
    segs.push_back(std::move(r));
  }
  Flow out(surface_, std::move(segs), rk4_steps_);
  return out;
}

Flow Flow::concat(const Flow& a, const Flow& b) {
  if (a.surface_.kind() != b.surface_.kind())
    throw Error(ErrorKind::InvalidArgument, "concat requires flows on the same surface");
  std::vector<FlowSegment> segs;
  auto emit = [&segs](const Flow& f, double offset) {
    for (const auto& seg : f.segments_) {
      FlowSegment s;
      s.t_start = offset + 0.5 * seg.t_start;
      s.t_end = offset + 0.5 * seg.t_end;
      s.term = seg.term;
      if (auto* rot = std::get_if<RigidRotationTerm>(&s.term)) {
        rot->omega *= 2.0;
      } else if (auto* fm = std::get_if<FourierTerm>(&s.term)) {
        fm->amplitude *= 2.0;
      } else if (auto* vort = std::get_if<DiscVortexTerm>(&s.term)) {
        for (auto& v : vort->vortices) v.amplitude *= 2.0;
      }
      // MovingBumpTerm speeds up automatically with the shorter duration.
      segs.push_back(std::move(s));
    }
  };
  emit(a, 0.0);
  emit(b, 0.5);
  return Flow(a.surface_, std::move(segs), 2 * std::max(a.rk4_steps_, b.rk4_steps_));
}

Flow Flow::with_time_warp(double lambda) const {
  if (!(std::abs(lambda) < 1.0))
    throw Error(ErrorKind::InvalidArgument, "time warp requires |lambda| < 1");
  Flow out = *this;
  out.warp_lambda_ = lambda;
  return out;
}

// --- constructions -----------------------------------------------------------

Flow rotation_flow(const Surface& surface, double angle, int rk4_steps) {
  if (surface.kind() != SurfaceKind::UnitAreaDisc)
    throw Error(ErrorKind::InvalidArgument, "rotation_flow is defined on the disc");
  if (!std::isfinite(angle))
    throw Error(ErrorKind::InvalidArgument, "rotation angle must be finite");
  if (angle == 0.0) return Flow::zero(surface);
  std::vector<FlowSegment> segs;
  segs.push_back({0.0, 1.0, RigidRotationTerm{angle}});
  return Flow(surface, std::move(segs), rk4_steps);
}

namespace {

// Self-distance of the polyline support. Strands retraced over identical
// vertices are identified before measuring (repeat passes of a loop count
// once), and segment pairs closer along the support graph than the tube's
// own bending scale are excluded: a short-range fold of the tube over itself
// is curvature, not self-approach.
double support_self_distance(const Surface& surface, const Polyline& line,
                             double tube_radius) {
  const std::size_t seg_count = line.segment_count();
  if (seg_count < 2) return std::numeric_limits<double>::infinity();

  // Vertex ids are keyed on canonical surface coordinates so that lifted
  // torus copies of the same point coincide.
  auto key_of = [&surface](const SurfacePoint& p) {
    const SurfacePoint c = surface.canonical(p);
    return std::pair<long long, long long>(std::llround(c.x * 1e9), std::llround(c.y * 1e9));
  };
  std::map<std::pair<long long, long long>, int> vertex_ids;
  int next_vertex = 0;
  struct Seg {
    int va, vb;
    Vec2 a, b;  // lift coordinates for the actual geometry
    double len;
  };
  std::vector<Seg> segs;
  std::set<std::pair<int, int>> seen;
  double support_length = 0.0;
  for (std::size_t i = 0; i < seg_count; ++i) {
    const SurfacePoint& pa = line.points[i];
    const SurfacePoint& pb = line.points[i + 1];
    int ids[2];
    for (int j = 0; j < 2; ++j) {
      auto [it, inserted] = vertex_ids.try_emplace(key_of(j == 0 ? pa : pb), next_vertex);
      if (inserted) ++next_vertex;
      ids[j] = it->second;
    }
    auto key = std::minmax(ids[0], ids[1]);
    if (!seen.insert({key.first, key.second}).second) continue;
    Seg seg;
    seg.va = ids[0];
    seg.vb = ids[1];
    seg.a = {pa.x, pa.y};
    seg.b = {pb.x, pb.y};
    seg.len = std::hypot(pb.x - pa.x, pb.y - pa.y);
    segs.push_back(seg);
    support_length += seg.len;
  }

  // Shortest path lengths between support vertices.
  const int nv = next_vertex;
  std::vector<std::vector<std::pair<int, double>>> adj(nv);
  for (const auto& seg : segs) {
    adj[seg.va].push_back({seg.vb, seg.len});
    adj[seg.vb].push_back({seg.va, seg.len});
  }
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> dist(nv, std::vector<double>(nv, inf));
  for (int s = 0; s < nv; ++s) {
    auto& d = dist[s];
    d[s] = 0.0;
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    pq.push({0.0, s});
    while (!pq.empty()) {
      auto [dd, u] = pq.top();
      pq.pop();
      if (dd > d[u]) continue;
      for (const auto& [v, w] : adj[u])
        if (d[u] + w < d[v]) {
          d[v] = d[u] + w;
          pq.push({d[v], v});
        }
    }
  }

  const double arc_threshold = std::min(kPi * tube_radius, 0.25 * support_length);
  double best = inf;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    for (std::size_t j = i + 1; j < segs.size(); ++j) {
      const Seg& s1 = segs[i];
      const Seg& s2 = segs[j];
      if (s1.va == s2.va || s1.va == s2.vb || s1.vb == s2.va || s1.vb == s2.vb) continue;
      const double arc = std::min(std::min(dist[s1.va][s2.va], dist[s1.va][s2.vb]),
                                  std::min(dist[s1.vb][s2.va], dist[s1.vb][s2.vb]));
      if (arc < arc_threshold) continue;
      double d;
      if (surface.kind() == SurfaceKind::FlatTorus) {
        // Lifts can sit several periods apart; recenter, then scan neighbors.
        const double bx = std::round(0.5 * (s2.a.x + s2.b.x) - 0.5 * (s1.a.x + s1.b.x));
        const double by = std::round(0.5 * (s2.a.y + s2.b.y) - 0.5 * (s1.a.y + s1.b.y));
        d = inf;
        for (int sx = -1; sx <= 1; ++sx)
          for (int sy = -1; sy <= 1; ++sy)
            d = std::min(d, segment_segment_dist(s1.a, s1.b,
                                                 {s2.a.x - bx + sx, s2.a.y - by + sy},
                                                 {s2.b.x - bx + sx, s2.b.y - by + sy}));
      } else {
        d = segment_segment_dist(s1.a, s1.b, s2.a, s2.b);
      }
      best = std::min(best, d);
    }
  }
  return best;
}

}  // namespace

Flow point_push(const Surface& surface, const Polyline& gamma, double tube_radius,
                int rk4_steps) {
  if (surface.kind() == SurfaceKind::RoundSphere)
    throw Error(ErrorKind::InvalidArgument, "point_push is defined on the torus and disc");
  if (!(tube_radius > 0.0))
    throw Error(ErrorKind::InvalidArgument, "tube_radius must be positive");
  if (!gamma.closed)
    throw Error(ErrorKind::InvalidArgument, "point_push requires a closed polyline");

  const Polyline line = gamma.simplified();
  const double total_len = line.length();
  if (line.points.size() < 2 || total_len < kMergeTol) return Flow::zero(surface);
  if (surface.dist(surface.canonical(line.points.front()),
                   surface.canonical(line.points.back())) > 1e-9)
    throw Error(ErrorKind::InvalidArgument,
                "point_push: closed polyline must end where it starts (mod the lattice on the torus)");

  if (surface.has_boundary()) {
    const double R = surface.radius();
    const double collar = kCollarFraction * R;
    for (const auto& p : line.points) {
      if (std::hypot(p.x, p.y) + tube_radius > R - collar)
        throw Error(ErrorKind::TubeTooWide,
                    "point_push: tube violates the disc boundary collar");
    }
  }

  const double self_dist = support_self_distance(surface, line, tube_radius);
  if (!(tube_radius < 0.5 * self_dist))
    throw Error(ErrorKind::TubeTooWide,
                "point_push: tube_radius exceeds half the polyline self-distance");

  const std::size_t seg_count = line.segment_count();
  std::vector<FlowSegment> segs;
  segs.reserve(seg_count);
  double t = 0.0;
  for (std::size_t i = 0; i < seg_count; ++i) {
    const SurfacePoint& a = line.points[i];
    const SurfacePoint& b = line.points[i + 1];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const double t_next = (i + 1 == seg_count) ? 1.0 : t + len / total_len;
    MovingBumpTerm bump;
    bump.ax = a.x;
    bump.ay = a.y;
    bump.bx = b.x;
    bump.by = b.y;
    bump.tube_radius = tube_radius;
    segs.push_back({t, t_next, bump});
    t = t_next;
  }

  if (rk4_steps <= 0) {
    // The bump's shear rate is ~4 V0 / tube_radius at the shoulder; the RK4
    // area drift scales like shear^5 / steps^4, so steps grow as shear^(5/4).
    const double shear = 4.0 * total_len / tube_radius;
    double steps = std::clamp(24.0 * std::pow(shear, 1.25), 2048.0, 65536.0);
    int pow2 = 1;
    while (pow2 < steps) pow2 <<= 1;
    rk4_steps = pow2;
  }
  return Flow(surface, std::move(segs), rk4_steps);
}

Flow random_flow(const Surface& surface, Rng& rng, int terms) {
  if (terms < 1) terms = 1;
  // Amplitudes are drawn by shear rate, not speed: the accumulated stretching
  // over unit time stays mild, so area preservation survives integration at
  // the default step count.
  std::vector<FlowSegment> segs;
  if (surface.kind() == SurfaceKind::FlatTorus) {
    for (int i = 0; i < terms; ++i) {
      FourierTerm fm;
      do {
        fm.kx = static_cast<int>(rng.below(7)) - 3;
        fm.ky = static_cast<int>(rng.below(7)) - 3;
      } while (fm.kx == 0 && fm.ky == 0);
      const double shear = rng.uniform(0.2, 0.7);
      const double k2 = fm.kx * fm.kx + fm.ky * fm.ky;
      fm.amplitude = shear / (kTwoPi * kTwoPi * k2);
      fm.phase = rng.uniform(0.0, kTwoPi);
      double t0 = 0.0, t1 = 1.0;
      if (rng.uniform() < 0.3) {
        t0 = rng.uniform(0.0, 0.5);
        t1 = rng.uniform(t0 + 0.25, 1.0);
      }
      segs.push_back({t0, t1, fm});
    }
    return Flow(surface, std::move(segs), 2048);
  }
  if (surface.kind() == SurfaceKind::UnitAreaDisc) {
    const double R = surface.radius();
    const double collar = kCollarFraction * R;
    DiscVortexTerm term;
    term.cutoff_inner = R - 2.0 * collar;
    term.cutoff_outer = R - collar;
    for (int i = 0; i < terms; ++i) {
      DiscVortexTerm::Vortex v;
      const double r = 0.65 * R * std::sqrt(rng.uniform());
      const double theta = rng.uniform(0.0, kTwoPi);
      v.cx = r * std::cos(theta);
      v.cy = r * std::sin(theta);
      v.sigma = rng.uniform(0.08, 0.2) * R;
      const double shear = rng.uniform(0.2, 0.7);
      const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
      v.amplitude = sign * shear * v.sigma * v.sigma;
      term.vortices.push_back(v);
    }
    segs.push_back({0.0, 1.0, std::move(term)});
    return Flow(surface, std::move(segs), 2048);
  }
  throw Error(ErrorKind::InvalidArgument, "random_flow: unsupported surface");
}

double area_distortion(const Flow& flow, int n_samples) {
  if (n_samples < 1000)
    throw Error(ErrorKind::InvalidArgument, "area_distortion needs n_samples >= 1000");
  const Surface& s = flow.surface();

  // Micro-patches: a pair of triangles spanning the quad p +- h e_x, p +- h e_y,
  // advected over [0, 1]. The patch is far smaller than any flow feature, so
  // the quad's shoelace area against its starting area isolates the
  // integrator's area error; errors of nearby endpoints cancel in the
  // differences. The patch size is picked per anchor: the larger patch wins
  // where the map is smooth (no rounding), the smaller one near sharp bump
  // shoulders (no truncation).
  std::vector<SurfacePoint> anchors;
  const int cells = std::max(8, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_samples)))));
  if (s.kind() == SurfaceKind::FlatTorus) {
    for (int i = 0; i < cells; ++i)
      for (int j = 0; j < cells; ++j)
        anchors.push_back({(i + 0.5) / cells, (j + 0.5) / cells, 0.0});
  } else {
    const double R = s.radius();
    const double rmax = 0.99 * R;
    for (int i = 0; i < cells; ++i)
      for (int j = 0; j < cells; ++j) {
        const SurfacePoint p{-R + (i + 0.5) * 2.0 * R / cells,
                             -R + (j + 0.5) * 2.0 * R / cells, 0.0};
        if (std::hypot(p.x, p.y) <= rmax) anchors.push_back(p);
      }
  }

  auto patch_defect = [&](const SurfacePoint& p, double h) {
    const SurfacePoint vxp{p.x + h, p.y, 0.0}, vxm{p.x - h, p.y, 0.0};
    const SurfacePoint vyp{p.x, p.y + h, 0.0}, vym{p.x, p.y - h, 0.0};
    const TangentVector b1 = s.displacement(vxm, vxp);
    const TangentVector b2 = s.displacement(vym, vyp);
    const double base = b1.x * b2.y - b1.y * b2.x;
    const SurfacePoint xp = flow.advect(vxp, 0.0, 1.0);
    const SurfacePoint xm = flow.advect(vxm, 0.0, 1.0);
    const SurfacePoint yp = flow.advect(vyp, 0.0, 1.0);
    const SurfacePoint ym = flow.advect(vym, 0.0, 1.0);
    const TangentVector d1 = s.displacement(xm, xp);
    const TangentVector d2 = s.displacement(ym, yp);
    return std::abs((d1.x * d2.y - d1.y * d2.x) / base - 1.0);
  };

  double worst = 0.0;
  for (const auto& p : anchors)
    worst = std::max(worst, std::min(patch_defect(p, 1e-5), patch_defect(p, 1e-7)));
  return worst;
}

}  // namespace lpflow
