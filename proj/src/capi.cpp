#include "lpflow.h"

#include <cstring>
#include <functional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "lpflow/bounds.hpp"
#include "lpflow/braids.hpp"
#include "lpflow/checks.hpp"
#include "lpflow/confspace.hpp"
#include "lpflow/error.hpp"
#include "lpflow/flows.hpp"
#include "lpflow/functionals.hpp"
#include "lpflow/geometry.hpp"

using nlohmann::json;

struct lpf_surface {
  lpflow::Surface surface;
};
struct lpf_flow {
  lpflow::Flow flow;
};
struct lpf_path {
  lpflow::ConfigPath path;
};

namespace {

thread_local std::string g_last_error;

lpf_status status_of(lpflow::ErrorKind kind) {
  using lpflow::ErrorKind;
  switch (kind) {
    case ErrorKind::InvalidArgument: return LPF_ERR_INVALID_ARGUMENT;
    case ErrorKind::CoincidentPoints: return LPF_ERR_COINCIDENT_POINTS;
    case ErrorKind::TubeTooWide: return LPF_ERR_TUBE_TOO_WIDE;
    case ErrorKind::DegenerateCrossing: return LPF_ERR_DEGENERATE_CROSSING;
    case ErrorKind::NotClosed: return LPF_ERR_NOT_CLOSED;
    case ErrorKind::LiftAmbiguous: return LPF_ERR_LIFT_AMBIGUOUS;
    case ErrorKind::StepOut: return LPF_ERR_STEP_OUT;
    case ErrorKind::NonIntegralWinding: return LPF_ERR_NON_INTEGRAL_WINDING;
    case ErrorKind::Io: return LPF_ERR_IO;
  }
  return LPF_ERR_INTERNAL;
}

lpf_status guarded(const std::function<void()>& body) {
  try {
    body();
    g_last_error.clear();
    return LPF_OK;
  } catch (const lpflow::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return LPF_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return LPF_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

lpflow::QuadratureSpec to_spec(lpf_quadrature q) {
  lpflow::QuadratureSpec spec;
  spec.mc_samples = q.mc_samples;
  spec.time_steps = q.time_steps;
  spec.seed = q.seed;
  return spec;
}

lpflow::SurfacePoint to_point(const double p[3]) { return {p[0], p[1], p[2]}; }

}  // namespace

extern "C" {

const char* lpf_version(void) { return "0.1.0"; }

const char* lpf_last_error(void) { return g_last_error.c_str(); }

const char* lpf_status_name(lpf_status status) {
  switch (status) {
    case LPF_OK: return "ok";
    case LPF_ERR_INVALID_ARGUMENT: return "invalid argument";
    case LPF_ERR_COINCIDENT_POINTS: return "coincident points";
    case LPF_ERR_TUBE_TOO_WIDE: return "tube too wide";
    case LPF_ERR_DEGENERATE_CROSSING: return "degenerate crossing";
    case LPF_ERR_NOT_CLOSED: return "path not closed";
    case LPF_ERR_LIFT_AMBIGUOUS: return "lift ambiguous";
    case LPF_ERR_STEP_OUT: return "step out of domain";
    case LPF_ERR_NON_INTEGRAL_WINDING: return "non-integral winding";
    case LPF_ERR_IO: return "io error";
    case LPF_ERR_INTERNAL: return "internal error";
  }
  return "unknown";
}

void lpf_string_free(char* s) { delete[] s; }

/* ---- surfaces ---- */

lpf_status lpf_surface_create(const char* kind, lpf_surface** out) {
  return guarded([&] {
    if (kind == nullptr || out == nullptr)
      throw lpflow::Error(lpflow::ErrorKind::InvalidArgument, "null argument");
    const auto surface = lpflow::Surface::from_name(kind);
    if (!surface)
      throw lpflow::Error(lpflow::ErrorKind::InvalidArgument,
                          std::string("unknown surface kind: ") + kind);
    *out = new lpf_surface{*surface};
  });
}

void lpf_surface_destroy(lpf_surface* s) { delete s; }

const char* lpf_surface_name(const lpf_surface* s) {
  return s == nullptr ? "" : s->surface.name().data();
}

double lpf_surface_diameter(const lpf_surface* s) {
  return s == nullptr ? 0.0 : s->surface.diameter();
}

lpf_status lpf_surface_dist(const lpf_surface* s, const double p[3], const double q[3],
                            double* out) {
  return guarded([&] {
    if (s == nullptr || out == nullptr)
      throw lpflow::Error(lpflow::ErrorKind::InvalidArgument, "null argument");
    *out = s->surface.dist(to_point(p), to_point(q));
  });
}

lpf_status lpf_surface_tangent_norm(const lpf_surface* s, const double p[3],
                                    const double v[3], double* out) {
  return guarded([&] {
    if (s == nullptr || out == nullptr)
      throw lpflow::Error(lpflow::ErrorKind::InvalidArgument, "null argument");
    *out = s->surface.tangent_norm(to_point(p), {v[0], v[1], v[2]});
  });
}

lpf_status lpf_surface_sample(const lpf_surface* s, uint64_t seed, int count,
                              double* xyz_out) {
  return guarded([&] {
    if (s == nullptr || xyz_out == nullptr || count < 0)
      throw lpflow::Error(lpflow::ErrorKind::InvalidArgument, "bad sample request");
    lpflow::Rng rng(seed);
    for (int i = 0; i < count; ++i) {
      const lpflow::SurfacePoint p = s->surface.sample(rng);
      xyz_out[3 * i] = p.x;
      xyz_out[3 * i + 1] = p.y;
      xyz_out[3 * i + 2] = p.z;
    }
  });
}

/* ---- flows ---- */

lpf_status lpf_flow_from_json(const char* text, lpf_flow** out) {
  return guarded([&] {
    if (text == nullptr || out == nullptr)
      throw lpflow::Error(lpflow::ErrorKind::InvalidArgument, "null argument");
    *out = new lpf_flow{lpflow::Flow::from_json_string(text)};
  });
}

lpf_status lpf_flow_to_json(const lpf_flow* f, char** json_out) {
  return guarded([&] {
    if (f == nullptr || json_out == nullptr)
      throw lpflow::Error(lpflow::ErrorKind::InvalidArgument, "null argument");
    *json_out = dup_string(f->flow.to_json_string());
  });
}

lpf_status lpf_flow_rotation(const lpf_surface* s, double angle, int rk4_steps,
                             lpf_flow** out) {
  return guarded([&] {
    if (s == nullptr || out == nullptr)
      throw lpflow::Error(lpflow::ErrorKind::InvalidArgument, "null argument");
    *out = new lpf_flow{rk4_steps > 0
                            ? lpflow::rotation_flow(s->surface, angle, rk4_steps)
                            : lpflow::rotation_flow(s->surface, angle)};
  });
}

lpf_status lpf_flow_point_push(const lpf_surface* s, const char* polyline_json,
                               double tube_radius, int rk4_steps, lpf_flow** out) {
  return guarded([&] {
    if (s == nullptr || polyline_json == nullptr || out == nullptr)
      throw lpflow::Error(lpflow::ErrorKind::InvalidArgument, "null argument");
    const lpflow::Polyline gamma = lpflow::polyline_from_json_string(polyline_json);
    *out = new lpf_flow{lpflow::point_push(s->surface, gamma, tube_radius, rk4_steps)};
  });
}

lpf_status lpf_flow_random(const lpf_surface* s, uint64_t seed, int terms,
                           lpf_flow** out) {
  return guarded([&] {
    if (s == nullptr || out == nullptr)
      throw lpflow::Error(lpflow::ErrorKind::InvalidArgument, "null argument");
    lpflow::Rng rng(seed);
    *out = new lpf_flow{lpflow::random_flow(s->surface, rng, terms)};
  });
}

lpf_status lpf_flow_velocity(const lpf_flow* f, double t, const double p[3],
                             double v_out[3]) {
  return guarded([&] {
    if (f == nullptr || v_out == nullptr)
      throw lpflow::Error(lpflow::ErrorKind::InvalidArgument, "null argument");
    const lpflow::TangentVector v = f->flow.velocity(t, to_point(p));
    v_out[0] = v.x;
    v_out[1] = v.y;
    v_out[2] = v.z;
  });
}

lpf_status lpf_flow_advect(const lpf_flow* f, const double p[3], double t0, double t1,
                           double p_out[3]) {
  return guarded([&] {
    if (f == nullptr || p_out == nullptr)
      throw lpflow::Error(lpflow::ErrorKind::InvalidArgument, "null argument");
    const lpflow::SurfacePoint q = f->flow.advect(to_point(p), t0, t1);
    p_out[0] = q.x;
    p_out[1] = q.y;
    p_out[2] = q.z;
  });
}

lpf_status lpf_flow_area_distortion(const lpf_flow* f, int n_samples, double* out) {
  return guarded([&] {
    if (f == nullptr || out == nullptr)
      throw lpflow::Error(lpflow::ErrorKind::InvalidArgument, "null argument");
    *out = lpflow::area_distortion(f->flow, n_samples);
  });
}

void lpf_flow_destroy(lpf_flow* f) { delete f; }

/* ---- configuration paths ---- */

lpf_status lpf_path_lift(const lpf_flow* f, const double* xy, int n_points,
                         lpf_path** out) {
  return guarded([&] {
    if (f == nullptr || xy == nullptr || out == nullptr || n_points < 1)
      throw lpflow::Error(lpflow::ErrorKind::InvalidArgument, "bad lift request");
    lpflow::Configuration x0;
    for (int i = 0; i < n_points; ++i)
      x0.points.push_back({xy[2 * i], xy[2 * i + 1], 0.0});
    *out = new lpf_path{lpflow::lift_trajectories(f->flow, x0)};
  });
}

lpf_status lpf_path_from_csv(const char* csv_text, lpf_path** out) {
  return guarded([&] {
    if (csv_text == nullptr || out == nullptr)
      throw lpflow::Error(lpflow::ErrorKind::InvalidArgument, "null argument");
    std::istringstream in{std::string(csv_text)};
    *out = new lpf_path{lpflow::read_path_csv(in)};
  });
}

lpf_status lpf_path_to_csv(const lpf_surface* s, const lpf_path* p, char** csv_out) {
  return guarded([&] {
    if (s == nullptr || p == nullptr || csv_out == nullptr)
      throw lpflow::Error(lpflow::ErrorKind::InvalidArgument, "null argument");
    std::ostringstream out;
    lpflow::write_path_csv(s->surface, p->path, out);
    *csv_out = dup_string(out.str());
  });
}

int lpf_path_points(const lpf_path* p) { return p == nullptr ? 0 : p->path.n(); }

lpf_status lpf_path_gb_length(const lpf_surface* s, const lpf_path* p, double* out) {
  return guarded([&] {
    if (s == nullptr || p == nullptr || out == nullptr)
      throw lpflow::Error(lpflow::ErrorKind::InvalidArgument, "null argument");
    *out = lpflow::gb_length(s->surface, p->path);
  });
}

lpf_status lpf_path_escape_check(const lpf_surface* s, const lpf_path* p, double* ell,
                                 double* d_start, double* d_end, int* ok) {
  return guarded([&] {
    if (s == nullptr || p == nullptr)
      throw lpflow::Error(lpflow::ErrorKind::InvalidArgument, "null argument");
    const lpflow::EscapeReport rep = lpflow::escape_check(s->surface, p->path);
    if (ell != nullptr) *ell = rep.ell;
    if (d_start != nullptr) *d_start = rep.d_start;
    if (d_end != nullptr) *d_end = rep.d_end;
    if (ok != nullptr) *ok = rep.ok ? 1 : 0;
  });
}

lpf_status lpf_path_winding_json(const lpf_surface* s, const lpf_path* p,
                                 char** json_out) {
  return guarded([&] {
    if (s == nullptr || p == nullptr || json_out == nullptr)
      throw lpflow::Error(lpflow::ErrorKind::InvalidArgument, "null argument");
    const lpflow::WindingMatrix w = lpflow::winding_matrix(s->surface, p->path);
    json j;
    j["n"] = w.n;
    json pairs = json::array();
    for (int i = 0; i < w.n; ++i)
      for (int k = i + 1; k < w.n; ++k)
        pairs.push_back({{"i", i}, {"j", k}, {"raw", w.at(i, k)}, {"rounded", w.rounded(i, k)}});
    j["pairs"] = std::move(pairs);
    j["max_abs"] = w.max_abs();
    j["integral"] = w.is_integral();
    *json_out = dup_string(j.dump(2));
  });
}

lpf_status lpf_path_artin_json(const lpf_surface* s, const lpf_path* p, char** json_out) {
  return guarded([&] {
    if (s == nullptr || p == nullptr || json_out == nullptr)
      throw lpflow::Error(lpflow::ErrorKind::InvalidArgument, "null argument");
    const lpflow::BraidWord word = lpflow::artin_word(s->surface, p->path);
    const lpflow::BraidWord reduced = lpflow::free_reduce(word);
    const std::vector<int> perm = lpflow::induced_permutation(word);
    bool pure = true;
    for (std::size_t i = 0; i < perm.size(); ++i)
      if (perm[i] != static_cast<int>(i)) pure = false;
    json j;
    j["n"] = word.n_strands;
    j["letters"] = word.letters;
    j["reduced"] = reduced.letters;
    j["pure"] = pure;
    *json_out = dup_string(j.dump(2));
  });
}

lpf_status lpf_path_lh_lower(const lpf_surface* s, const lpf_path* p, double* value,
                             long long* center_shift) {
  return guarded([&] {
    if (s == nullptr || p == nullptr || value == nullptr)
      throw lpflow::Error(lpflow::ErrorKind::InvalidArgument, "null argument");
    const lpflow::WindingMatrix w = lpflow::winding_matrix(s->surface, p->path);
    const lpflow::CenterReducedBound b = lpflow::lh_lower(w, s->surface.kind());
    *value = b.value;
    if (center_shift != nullptr) *center_shift = b.center_shift;
  });
}

void lpf_path_destroy(lpf_path* p) { delete p; }

/* ---- functionals ---- */

lpf_status lpf_cprime(const lpf_surface* s, int grid, lpf_quadrature q, double* out) {
  return guarded([&] {
    if (s == nullptr || out == nullptr)
      throw lpflow::Error(lpflow::ErrorKind::InvalidArgument, "null argument");
    *out = lpflow::cprime_estimate(s->surface, grid, to_spec(q));
  });
}

lpf_status lpf_lipschitz_constant(int n, double cprime, double* out) {
  return guarded([&] {
    if (out == nullptr)
      throw lpflow::Error(lpflow::ErrorKind::InvalidArgument, "null argument");
    *out = lpflow::lipschitz_constant(n, cprime);
  });
}

lpf_status lpf_lp_length(const lpf_flow* f, double p, lpf_quadrature q, double* value,
                         double* sigma) {
  return guarded([&] {
    if (f == nullptr || value == nullptr)
      throw lpflow::Error(lpflow::ErrorKind::InvalidArgument, "null argument");
    const lpflow::NormEstimate est = lpflow::lp_isotopy_length(f->flow, p, to_spec(q));
    *value = est.value;
    if (sigma != nullptr) *sigma = est.std_error;
  });
}

lpf_status lpf_product_l1(const lpf_flow* f, int n, lpf_quadrature q, double* value,
                          double* sigma, long long* rejected) {
  return guarded([&] {
    if (f == nullptr || value == nullptr)
      throw lpflow::Error(lpflow::ErrorKind::InvalidArgument, "null argument");
    const lpflow::ProductL1Result res = lpflow::product_l1_length(f->flow, n, to_spec(q));
    *value = res.estimate.value;
    if (sigma != nullptr) *sigma = res.estimate.std_error;
    if (rejected != nullptr) *rejected = res.rejected_samples;
  });
}

lpf_status lpf_embedding_json(const lpf_flow* f, int n, lpf_quadrature q,
                              char** json_out) {
  return guarded([&] {
    if (f == nullptr || json_out == nullptr)
      throw lpflow::Error(lpflow::ErrorKind::InvalidArgument, "null argument");
    const lpflow::EmbeddingReport rep = lpflow::embedding_ratio(f->flow, n, to_spec(q));
    json j;
    j["lhs"] = rep.lhs;
    j["lhs_sigma"] = rep.lhs_sigma;
    j["l1"] = rep.l1;
    j["l1_sigma"] = rep.l1_sigma;
    j["constants"] = {{"cprime", rep.cprime}, {"C", rep.lipschitz}};
    j["rhs"] = rep.rhs;
    j["sigma"] = rep.sigma;
    j["ok"] = rep.ok;
    j["rejected_samples"] = rep.rejected_samples;
    *json_out = dup_string(j.dump(2));
  });
}

/* ---- bounds ---- */

lpf_status lpf_bound_json(const lpf_surface* s, const double* centers_xy, int n,
                          double rho, const char* gamma_json, double tube_radius,
                          int multiply_full_twist, double cprime_override,
                          lpf_quadrature q, char** json_out) {
  return guarded([&] {
    if (s == nullptr || centers_xy == nullptr || gamma_json == nullptr ||
        json_out == nullptr || n < 2)
      throw lpflow::Error(lpflow::ErrorKind::InvalidArgument, "bad bound request");
    lpflow::ProductNeighborhood u;
    u.rho = rho;
    for (int i = 0; i < n; ++i)
      u.centers.push_back({centers_xy[2 * i], centers_xy[2 * i + 1], 0.0});
    lpflow::AssembleOptions opts;
    opts.quad = to_spec(q);
    opts.tube_radius = tube_radius;
    opts.multiply_full_twist = multiply_full_twist != 0;
    opts.cprime = cprime_override;
    const lpflow::BoundReport rep = lpflow::assemble_bound(
        s->surface, u, lpflow::polyline_from_json_string(gamma_json), opts);
    *json_out = dup_string(rep.to_json_string());
  });
}

lpf_status lpf_grow(int k_max, int n, lpf_quadrature q, double rho, double loop_radius,
                    double tube_radius, int segments_per_turn, char** csv_out,
                    char** manifest_json_out) {
  return guarded([&] {
    if (csv_out == nullptr || manifest_json_out == nullptr)
      throw lpflow::Error(lpflow::ErrorKind::InvalidArgument, "null argument");
    lpflow::GrowthOptions opts;
    if (n > 0) opts.n = n;
    if (rho > 0.0) opts.rho = rho;
    if (loop_radius > 0.0) opts.loop_radius = loop_radius;
    if (tube_radius > 0.0) opts.tube_radius = tube_radius;
    if (segments_per_turn > 0) opts.segments_per_turn = segments_per_turn;
    const lpflow::GrowthResult res = lpflow::growth_experiment(k_max, to_spec(q), opts);
    *csv_out = dup_string(res.to_csv_string());
    *manifest_json_out = dup_string(res.manifest_json_string());
  });
}

/* ---- verification ---- */

lpf_status lpf_verify_json(int quick, uint64_t seed, char** json_out, int* all_passed) {
  return guarded([&] {
    if (json_out == nullptr)
      throw lpflow::Error(lpflow::ErrorKind::InvalidArgument, "null argument");
    const auto results = lpflow::run_verification(quick != 0, seed);
    bool pass = true;
    json checks = json::array();
    for (const auto& r : results) {
      pass = pass && r.pass;
      checks.push_back({{"name", r.name}, {"pass", r.pass}, {"detail", r.detail},
                        {"seconds", r.seconds}});
    }
    json j;
    j["passed"] = pass;
    j["checks"] = std::move(checks);
    *json_out = dup_string(j.dump(2));
    if (all_passed != nullptr) *all_passed = pass ? 1 : 0;
  });
}

}  // extern "C"
