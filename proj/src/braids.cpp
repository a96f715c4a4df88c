#include "lpflow/braids.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "lpflow/error.hpp"

namespace lpflow {

namespace {

constexpr double kTwoPi = 6.28318530717958647692528676655900577;
constexpr double kClosureTol = 1e-6;

void require_closed(const Surface& s, const ConfigPath& path) {
  if (path.configs.size() < 2)
    throw Error(ErrorKind::NotClosed, "path has fewer than two samples");
  const Configuration& a = path.configs.front();
  const Configuration& b = path.configs.back();
  for (int i = 0; i < a.n(); ++i)
    if (s.dist(a.points[i], b.points[i]) > kClosureTol)
      throw Error(ErrorKind::NotClosed, "path endpoints differ beyond the closure tolerance");
}

}  // namespace

WindingMatrix WindingMatrix::zeros(int n) {
  WindingMatrix w;
  w.n = n;
  w.raw.assign(static_cast<std::size_t>(n) * n, 0.0);
  return w;
}

long long WindingMatrix::rounded(int i, int j) const { return std::llround(at(i, j)); }

double WindingMatrix::max_abs() const {
  double best = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) best = std::max(best, std::abs(at(i, j)));
  return best;
}

double WindingMatrix::max_integrality_defect() const {
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      worst = std::max(worst, std::abs(at(i, j) - std::llround(at(i, j))));
  return worst;
}

WindingMatrix winding_matrix(const Surface& s, const ConfigPath& path) {
  require_closed(s, path);
  const int n = path.n();
  WindingMatrix w = WindingMatrix::zeros(n);
  if (n < 2) return w;

  const bool torus = s.kind() == SurfaceKind::FlatTorus;
  const std::size_t steps = path.steps();

  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      // Track the lifted relative vector x_i - x_j.
      TangentVector rel = s.displacement(path.configs[0].points[j], path.configs[0].points[i]);
      double angle = 0.0;
      for (std::size_t k = 0; k < steps; ++k) {
        const auto& cur = path.configs[k];
        const auto& nxt = path.configs[k + 1];
        const TangentVector di = s.displacement(cur.points[i], nxt.points[i]);
        const TangentVector dj = s.displacement(cur.points[j], nxt.points[j]);
        TangentVector delta{di.x - dj.x, di.y - dj.y, 0.0};
        if (torus && (std::abs(delta.x) >= 0.25 || std::abs(delta.y) >= 0.25))
          throw Error(ErrorKind::LiftAmbiguous,
                      "winding_matrix: relative step exceeds half the injectivity radius");
        const TangentVector next_rel{rel.x + delta.x, rel.y + delta.y, 0.0};
        angle += std::atan2(rel.x * next_rel.y - rel.y * next_rel.x,
                            rel.x * next_rel.x + rel.y * next_rel.y);
        rel = next_rel;
      }
      const double turns = angle / kTwoPi;
      w.raw[static_cast<std::size_t>(i) * n + j] = turns;
      w.raw[static_cast<std::size_t>(j) * n + i] = -turns;
    }
  }
  return w;
}

BraidWord artin_word(const Surface& s, const ConfigPath& path) {
  if (s.kind() != SurfaceKind::UnitAreaDisc)
    throw Error(ErrorKind::InvalidArgument, "artin_word is defined on the disc only");
  require_closed(s, path);
  const int n = path.n();
  BraidWord word;
  word.n_strands = n;
  if (n < 2) return word;

  // Initial order by x-coordinate.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const Configuration& start = path.configs.front();
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return start.points[a].x < start.points[b].x;
  });
  for (int p = 0; p + 1 < n; ++p)
    if (std::abs(start.points[order[p]].x - start.points[order[p + 1]].x) < 1e-12)
      throw Error(ErrorKind::DegenerateCrossing,
                  "artin_word: two strands share an x-coordinate at t = 0");
  std::vector<int> pos(n);
  for (int p = 0; p < n; ++p) pos[order[p]] = p;

  struct Event {
    double t;  // within the step, in [0, 1]
    int a, b;  // strands, a left of b before the crossing
  };

  for (std::size_t k = 0; k + 1 < path.configs.size(); ++k) {
    const Configuration& c0 = path.configs[k];
    const Configuration& c1 = path.configs[k + 1];
    std::vector<Event> events;
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        const double dx0 = c0.points[a].x - c0.points[b].x;
        const double dx1 = c1.points[a].x - c1.points[b].x;
        if ((dx0 > 0.0 && dx1 < 0.0) || (dx0 < 0.0 && dx1 > 0.0)) {
          const double t = dx0 / (dx0 - dx1);
          events.push_back({t, dx0 < 0.0 ? a : b, dx0 < 0.0 ? b : a});
        } else if (dx0 == 0.0 || dx1 == 0.0) {
          throw Error(ErrorKind::DegenerateCrossing,
                      "artin_word: strands share an x-coordinate at a sample (refine the path)");
        }
      }
    }
    std::sort(events.begin(), events.end(), [](const Event& u, const Event& v) {
      if (u.t != v.t) return u.t < v.t;
      return std::pair(u.a, u.b) < std::pair(v.a, v.b);
    });
    for (std::size_t e = 0; e + 1 < events.size(); ++e) {
      if (std::abs(events[e].t - events[e + 1].t) < 1e-12) {
        const auto& u = events[e];
        const auto& v = events[e + 1];
        if (u.a == v.a || u.a == v.b || u.b == v.a || u.b == v.b)
          throw Error(ErrorKind::DegenerateCrossing,
                      "artin_word: simultaneous crossings share a strand (refine the path)");
      }
    }
    for (const Event& ev : events) {
      const int pa = pos[ev.a], pb = pos[ev.b];
      if (std::abs(pa - pb) != 1)
        throw Error(ErrorKind::DegenerateCrossing,
                    "artin_word: crossing strands are not adjacent (refine the path)");
      const int left_pos = std::min(pa, pb);
      const int left = order[left_pos];
      const int right = order[left_pos + 1];
      const double y_left = c0.points[left].y +
                            ev.t * (c1.points[left].y - c0.points[left].y);
      const double y_right = c0.points[right].y +
                             ev.t * (c1.points[right].y - c0.points[right].y);
      if (y_left == y_right)
        throw Error(ErrorKind::DegenerateCrossing, "artin_word: strands meet at a crossing");
      const int index = left_pos + 1;  // 1-based generator
      word.letters.push_back(y_left < y_right ? index : -index);
      std::swap(order[left_pos], order[left_pos + 1]);
      pos[left] = left_pos + 1;
      pos[right] = left_pos;
    }
  }
  return word;
}

BraidWord free_reduce(const BraidWord& w) {
  BraidWord out;
  out.n_strands = w.n_strands;
  for (int letter : w.letters) {
    if (!out.letters.empty() && out.letters.back() == -letter)
      out.letters.pop_back();
    else
      out.letters.push_back(letter);
  }
  return out;
}

std::vector<int> induced_permutation(const BraidWord& w) {
  const int n = w.n_strands;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int letter : w.letters) {
    const int i = std::abs(letter) - 1;
    if (i < 0 || i + 1 >= n)
      throw Error(ErrorKind::InvalidArgument, "braid letter index out of range");
    std::swap(order[i], order[i + 1]);
  }
  // order[p] = strand now at position p; report final position of each strand.
  std::vector<int> final_pos(n);
  for (int p = 0; p < n; ++p) final_pos[order[p]] = p;
  return final_pos;
}

std::vector<int> initial_strand_order(const ConfigPath& path) {
  const int n = path.n();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const Configuration& start = path.configs.front();
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return start.points[a].x < start.points[b].x;
  });
  return order;
}

WindingMatrix winding_from_word(const BraidWord& w,
                                const std::vector<int>& initial_order) {
  const int n = w.n_strands;
  WindingMatrix m = WindingMatrix::zeros(n);
  std::vector<int> order = initial_order;
  if (order.empty()) {
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
  }
  if (static_cast<int>(order.size()) != n)
    throw Error(ErrorKind::InvalidArgument, "winding_from_word: initial order size mismatch");
  for (int letter : w.letters) {
    const int i = std::abs(letter) - 1;
    if (i < 0 || i + 1 >= n)
      throw Error(ErrorKind::InvalidArgument, "braid letter index out of range");
    const int a = order[i], b = order[i + 1];
    const double half = letter > 0 ? 0.5 : -0.5;
    const int lo = std::min(a, b), hi = std::max(a, b);
    m.raw[static_cast<std::size_t>(lo) * n + hi] += half;
    m.raw[static_cast<std::size_t>(hi) * n + lo] -= half;
    std::swap(order[i], order[i + 1]);
  }
  return m;
}

ConfigPath polyline_loop_path(const Surface& s, const Polyline& gamma,
                              const std::vector<SurfacePoint>& stationary,
                              int samples) {
  if (!gamma.closed)
    throw Error(ErrorKind::InvalidArgument, "polyline_loop_path requires a closed polyline");
  const Polyline line = gamma.simplified();
  const double total = line.length();
  if (line.points.size() < 2 || total <= 0.0)
    throw Error(ErrorKind::InvalidArgument, "polyline_loop_path: degenerate polyline");
  if (samples < 16) samples = 16;

  const std::size_t segs = line.segment_count();
  std::vector<double> cum(segs + 1, 0.0);
  for (std::size_t i = 0; i < segs; ++i) {
    const auto& a = line.points[i];
    const auto& b = line.points[i + 1];
    cum[i + 1] = cum[i] + std::hypot(b.x - a.x, b.y - a.y);
  }

  ConfigPath path;
  path.times.reserve(samples + 1);
  path.configs.reserve(samples + 1);
  std::size_t seg = 0;
  for (int k = 0; k <= samples; ++k) {
    const double t = static_cast<double>(k) / samples;
    const double arc = t * total;
    while (seg + 1 < segs && cum[seg + 1] < arc) ++seg;
    const auto& a = line.points[seg];
    const auto& b = line.points[seg + 1];
    const double span = cum[seg + 1] - cum[seg];
    const double f = span > 0.0 ? (arc - cum[seg]) / span : 0.0;
    SurfacePoint mover{a.x + f * (b.x - a.x), a.y + f * (b.y - a.y), 0.0};
    Configuration cfg;
    cfg.points.push_back(s.canonical(mover));
    for (const auto& p : stationary) cfg.points.push_back(p);
    path.times.push_back(t);
    path.configs.push_back(std::move(cfg));
  }
  // Snap the endpoint onto the start so closure is exact.
  path.configs.back() = path.configs.front();
  return path;
}

CenterReducedBound lh_lower(const WindingMatrix& w, SurfaceKind kind) {
  if (kind == SurfaceKind::RoundSphere)
    throw Error(ErrorKind::InvalidArgument, "lh_lower: sphere braids are not supported");
  CenterReducedBound bound;
  if (w.n < 2) return bound;
  if (!w.is_integral())
    throw Error(ErrorKind::NonIntegralWinding,
                "lh_lower: winding matrix is not integral (path not closed or too coarse)");

  long long max_abs = 0;
  for (int i = 0; i < w.n; ++i)
    for (int j = i + 1; j < w.n; ++j)
      max_abs = std::max(max_abs, std::llabs(w.rounded(i, j)));

  if (kind == SurfaceKind::FlatTorus) {
    bound.value = kTwoPi * static_cast<double>(max_abs);
    bound.center_shift = 0;
    return bound;
  }

  // Disc: the center is generated by the full twist, which shifts every
  // pairwise winding by exactly one.
  long long best = std::numeric_limits<long long>::max();
  long long best_c = 0;
  for (long long c = -max_abs - 1; c <= max_abs + 1; ++c) {
    long long worst = 0;
    for (int i = 0; i < w.n; ++i)
      for (int j = i + 1; j < w.n; ++j)
        worst = std::max(worst, std::llabs(w.rounded(i, j) + c));
    if (worst < best || (worst == best && std::llabs(c) < std::llabs(best_c))) {
      best = worst;
      best_c = c;
    }
  }
  bound.value = kTwoPi * static_cast<double>(best);
  bound.center_shift = best_c;
  return bound;
}

}  // namespace lpflow
