/* C interface to the lpflow core: opaque handles, status codes, JSON strings
 * for structured payloads. Every function that can fail returns lpf_status;
 * lpf_last_error() describes the most recent failure on the calling thread.
 * Strings returned through char** are owned by the caller and released with
 * lpf_string_free(). */

#ifndef LPFLOW_H
#define LPFLOW_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct lpf_surface lpf_surface;
typedef struct lpf_flow lpf_flow;
typedef struct lpf_path lpf_path;

typedef enum lpf_status {
  LPF_OK = 0,
  LPF_ERR_INVALID_ARGUMENT = 1,
  LPF_ERR_COINCIDENT_POINTS = 2,
  LPF_ERR_TUBE_TOO_WIDE = 3,
  LPF_ERR_DEGENERATE_CROSSING = 4,
  LPF_ERR_NOT_CLOSED = 5,
  LPF_ERR_LIFT_AMBIGUOUS = 6,
  LPF_ERR_STEP_OUT = 7,
  LPF_ERR_NON_INTEGRAL_WINDING = 8,
  LPF_ERR_IO = 9,
  LPF_ERR_INTERNAL = 10
} lpf_status;

typedef struct lpf_quadrature {
  uint64_t seed;
  int32_t mc_samples;
  int32_t time_steps;
} lpf_quadrature;

const char* lpf_version(void);
const char* lpf_last_error(void);
const char* lpf_status_name(lpf_status status);
void lpf_string_free(char* s);

/* ---- surfaces ---- */

/* kind: "torus" | "disc" | "sphere" (all normalized to unit area). */
lpf_status lpf_surface_create(const char* kind, lpf_surface** out);
void lpf_surface_destroy(lpf_surface* s);
const char* lpf_surface_name(const lpf_surface* s);
double lpf_surface_diameter(const lpf_surface* s);

/* Points are chart coordinates (x, y, z); flat surfaces ignore z. */
lpf_status lpf_surface_dist(const lpf_surface* s, const double p[3], const double q[3],
                            double* out);
lpf_status lpf_surface_tangent_norm(const lpf_surface* s, const double p[3],
                                    const double v[3], double* out);
/* Fills xyz_out with 3*count doubles of area-uniform samples. */
lpf_status lpf_surface_sample(const lpf_surface* s, uint64_t seed, int count,
                              double* xyz_out);

/* ---- flows ---- */

lpf_status lpf_flow_from_json(const char* json, lpf_flow** out);
lpf_status lpf_flow_to_json(const lpf_flow* f, char** json_out);
lpf_status lpf_flow_rotation(const lpf_surface* s, double angle, int rk4_steps,
                             lpf_flow** out);
/* polyline_json: {"points": [[x,y],...], "closed": true}; rk4_steps 0 = auto. */
lpf_status lpf_flow_point_push(const lpf_surface* s, const char* polyline_json,
                               double tube_radius, int rk4_steps, lpf_flow** out);
lpf_status lpf_flow_random(const lpf_surface* s, uint64_t seed, int terms,
                           lpf_flow** out);
lpf_status lpf_flow_velocity(const lpf_flow* f, double t, const double p[3],
                             double v_out[3]);
lpf_status lpf_flow_advect(const lpf_flow* f, const double p[3], double t0, double t1,
                           double p_out[3]);
lpf_status lpf_flow_area_distortion(const lpf_flow* f, int n_samples, double* out);
void lpf_flow_destroy(lpf_flow* f);

/* ---- configuration paths ---- */

/* xy: 2*n_points chart coordinates of the start configuration. */
lpf_status lpf_path_lift(const lpf_flow* f, const double* xy, int n_points,
                         lpf_path** out);
lpf_status lpf_path_from_csv(const char* csv_text, lpf_path** out);
lpf_status lpf_path_to_csv(const lpf_surface* s, const lpf_path* p, char** csv_out);
int lpf_path_points(const lpf_path* p);
lpf_status lpf_path_gb_length(const lpf_surface* s, const lpf_path* p, double* out);
lpf_status lpf_path_escape_check(const lpf_surface* s, const lpf_path* p, double* ell,
                                 double* d_start, double* d_end, int* ok);
/* {"n":, "pairs":[{"i","j","raw","rounded"},...]} */
lpf_status lpf_path_winding_json(const lpf_surface* s, const lpf_path* p,
                                 char** json_out);
/* {"n":, "letters":[...], "reduced":[...], "pure":bool} (disc only) */
lpf_status lpf_path_artin_json(const lpf_surface* s, const lpf_path* p, char** json_out);
lpf_status lpf_path_lh_lower(const lpf_surface* s, const lpf_path* p, double* value,
                             long long* center_shift);
void lpf_path_destroy(lpf_path* p);

/* ---- functionals ---- */

lpf_status lpf_cprime(const lpf_surface* s, int grid, lpf_quadrature q, double* out);
lpf_status lpf_lipschitz_constant(int n, double cprime, double* out);
lpf_status lpf_lp_length(const lpf_flow* f, double p, lpf_quadrature q, double* value,
                         double* sigma);
lpf_status lpf_product_l1(const lpf_flow* f, int n, lpf_quadrature q, double* value,
                          double* sigma, long long* rejected);
lpf_status lpf_embedding_json(const lpf_flow* f, int n, lpf_quadrature q,
                              char** json_out);

/* ---- bounds ---- */

/* centers_xy: 2*n chart coordinates. tube_radius 0 = auto (2.5 rho);
 * cprime_override 0 = estimate. */
lpf_status lpf_bound_json(const lpf_surface* s, const double* centers_xy, int n,
                          double rho, const char* gamma_json, double tube_radius,
                          int multiply_full_twist, double cprime_override,
                          lpf_quadrature q, char** json_out);
/* n 0 = default (4). The experiment runs on the disc. */
lpf_status lpf_grow(int k_max, int n, lpf_quadrature q, double rho, double loop_radius,
                    double tube_radius, int segments_per_turn, char** csv_out,
                    char** manifest_json_out);

/* ---- verification ---- */

/* {"passed":bool, "checks":[{"name","pass","detail","seconds"},...]} */
lpf_status lpf_verify_json(int quick, uint64_t seed, char** json_out, int* all_passed);

#ifdef __cplusplus
}
#endif

#endif /* LPFLOW_H */
