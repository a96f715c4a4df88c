// lpflow command-line laboratory. All numerics go through the C API in
// lpflow.h; this layer only parses arguments, reads and writes files, and
// shapes reports.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lpflow.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

[[noreturn]] void fail_status(lpf_status status) {
  std::cerr << "error (" << lpf_status_name(status) << "): " << lpf_last_error() << "\n";
  const bool validation = status == LPF_ERR_INVALID_ARGUMENT || status == LPF_ERR_IO;
  std::exit(validation ? kExitValidation : kExitNumerical);
}

void check(lpf_status status) {
  if (status != LPF_OK) fail_status(status);
}

std::string take_string(char* owned) {
  std::string out = owned == nullptr ? "" : owned;
  lpf_string_free(owned);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read " << path << "\n";
    std::exit(kExitValidation);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    std::exit(kExitValidation);
  }
  out << content;
}

struct SurfaceHandle {
  lpf_surface* ptr = nullptr;
  ~SurfaceHandle() { lpf_surface_destroy(ptr); }
};
struct FlowHandle {
  lpf_flow* ptr = nullptr;
  ~FlowHandle() { lpf_flow_destroy(ptr); }
};
struct PathHandle {
  lpf_path* ptr = nullptr;
  ~PathHandle() { lpf_path_destroy(ptr); }
};

// Shared run settings; precedence: flag > config file > LPFLOW_SEED > default.
struct Settings {
  std::string surface = "disc";
  int n = 4;
  double p = 1.0;
  std::uint64_t seed = 2024;
  int mc_samples = 8192;
  int time_steps = 256;
  std::string out_dir = "out";
  std::string config_path;
};

const std::vector<std::string> kConfigKeys = {
    "surface", "n", "p", "seed", "mc_samples", "time_steps", "out"};

void apply_config(Settings& s, CLI::App* cmd) {
  if (const char* env = std::getenv("LPFLOW_SEED"); env != nullptr && *env != '\0') {
    if (cmd->count("--seed") == 0) s.seed = std::strtoull(env, nullptr, 10);
  }
  if (s.config_path.empty()) return;
  json cfg;
  try {
    cfg = json::parse(read_file(s.config_path));
  } catch (const json::exception& e) {
    std::cerr << "error: config parse: " << e.what() << "\n";
    std::exit(kExitValidation);
  }
  for (const auto& [key, value] : cfg.items()) {
    if (std::find(kConfigKeys.begin(), kConfigKeys.end(), key) == kConfigKeys.end()) {
      std::cerr << "error: unknown config field \"" << key << "\"\n";
      std::exit(kExitValidation);
    }
    (void)value;
  }
  auto take = [&](const char* flag, const char* key, auto& field) {
    using T = std::decay_t<decltype(field)>;
    if (cfg.contains(key) && cmd->count(flag) == 0) field = cfg.at(key).get<T>();
  };
  take("--surface", "surface", s.surface);
  take("--n", "n", s.n);
  take("--p", "p", s.p);
  take("--seed", "seed", s.seed);
  take("--mc-samples", "mc_samples", s.mc_samples);
  take("--time-steps", "time_steps", s.time_steps);
  take("--out", "out", s.out_dir);
}

void add_common_options(CLI::App* cmd, Settings& s, bool with_surface = true) {
  if (with_surface)
    cmd->add_option("--surface", s.surface, "Surface: torus | disc | sphere");
  cmd->add_option("--seed", s.seed, "Random seed (also via LPFLOW_SEED)");
  cmd->add_option("--mc-samples", s.mc_samples, "Monte Carlo samples");
  cmd->add_option("--time-steps", s.time_steps, "Time quadrature steps");
  cmd->add_option("--out", s.out_dir, "Output directory");
  cmd->add_option("--config", s.config_path, "JSON config file (flags override)");
}

lpf_quadrature quadrature(const Settings& s) {
  return lpf_quadrature{s.seed, s.mc_samples, s.time_steps};
}

json manifest_base(const std::string& command, const Settings& s) {
  json m;
  m["command"] = command;
  m["version"] = lpf_version();
  m["config"] = {{"surface", s.surface},       {"n", s.n},
                 {"p", s.p},                   {"seed", s.seed},
                 {"mc_samples", s.mc_samples}, {"time_steps", s.time_steps}};
  return m;
}

void write_manifest(const Settings& s, json manifest, const std::vector<std::string>& outputs) {
  manifest["outputs"] = outputs;
  write_file(fs::path(s.out_dir) / "manifest.json", manifest.dump(2) + "\n");
}

SurfaceHandle make_surface(const std::string& name) {
  SurfaceHandle h;
  check(lpf_surface_create(name.c_str(), &h.ptr));
  return h;
}

// Flow source shared by measure/braid: a descriptor file, a rotation, or a
// seeded random flow.
struct FlowArgs {
  std::string flow_path;
  double rotation_angle = 0.0;
  int random_terms = 0;
  bool rotation_set = false;
};

void add_flow_options(CLI::App* cmd, FlowArgs& f) {
  cmd->add_option("--flow", f.flow_path, "Flow descriptor JSON file");
  cmd->add_option("--rotation-angle", f.rotation_angle, "Rigid disc rotation by this angle")
      ->each([&f](const std::string&) { f.rotation_set = true; });
  cmd->add_option("--random", f.random_terms, "Random stream-function flow with N terms");
}

FlowHandle make_flow(const FlowArgs& f, const Settings& s, const SurfaceHandle& surface) {
  FlowHandle h;
  const int sources = (f.flow_path.empty() ? 0 : 1) + (f.rotation_set ? 1 : 0) +
                      (f.random_terms > 0 ? 1 : 0);
  if (sources != 1) {
    std::cerr << "error: specify exactly one of --flow, --rotation-angle, --random\n";
    std::exit(kExitValidation);
  }
  if (!f.flow_path.empty()) {
    check(lpf_flow_from_json(read_file(f.flow_path).c_str(), &h.ptr));
  } else if (f.rotation_set) {
    check(lpf_flow_rotation(surface.ptr, f.rotation_angle, 0, &h.ptr));
  } else {
    check(lpf_flow_random(surface.ptr, s.seed, f.random_terms, &h.ptr));
  }
  return h;
}

std::vector<double> parse_points(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    std::cerr << "error: points parse: " << e.what() << "\n";
    std::exit(kExitValidation);
  }
  std::vector<double> xy;
  if (!j.is_array()) {
    std::cerr << "error: points must be a JSON array of [x, y] pairs\n";
    std::exit(kExitValidation);
  }
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2) {
      std::cerr << "error: points must be a JSON array of [x, y] pairs\n";
      std::exit(kExitValidation);
    }
    xy.push_back(p[0].get<double>());
    xy.push_back(p[1].get<double>());
  }
  return xy;
}

std::vector<double> default_square_centers(double side) {
  const double h = 0.5 * side;
  return {-h, -h, h, -h, h, h, -h, h};
}

std::string build_encircling_gamma(const std::vector<double>& centers, double loop_radius,
                                   int k, int segments_per_turn) {
  // Stem from the first center, k turns around the second, stem back.
  const double z1x = centers[0], z1y = centers[1];
  const double z2x = centers[2], z2y = centers[3];
  const double dx = z1x - z2x, dy = z1y - z2y;
  if (std::hypot(dx, dy) <= loop_radius) {
    std::cerr << "error: loop radius reaches the moving center\n";
    std::exit(kExitValidation);
  }
  json pts = json::array();
  pts.push_back({z1x, z1y});
  std::vector<std::pair<double, double>> ring;
  const double angle0 = std::atan2(dy, dx);
  for (int i = 0; i < segments_per_turn; ++i) {
    const double a = angle0 + 2.0 * M_PI * i / segments_per_turn;
    ring.push_back({z2x + loop_radius * std::cos(a), z2y + loop_radius * std::sin(a)});
  }
  for (int t = 0; t < k; ++t)
    for (const auto& [x, y] : ring) pts.push_back({x, y});
  pts.push_back({ring[0].first, ring[0].second});
  pts.push_back({z1x, z1y});
  json gamma;
  gamma["points"] = std::move(pts);
  gamma["closed"] = true;
  return gamma.dump();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for the L^p geometry of area-preserving "
               "surface diffeomorphisms"};
  app.require_subcommand(1);
  app.set_version_flag("--version", lpf_version());

  Settings s;

  // constant
  auto* constant = app.add_subcommand(
      "constant", "Estimate the singular-integral constant C' and C(n)");
  int grid = 25;
  constant->add_option("--grid", grid, "Base-point grid size");
  constant->add_option("--n", s.n, "Configuration size for C(n)");
  add_common_options(constant, s);

  // measure
  auto* measure = app.add_subcommand("measure", "Measure the L^p length of an isotopy");
  FlowArgs measure_flow;
  add_flow_options(measure, measure_flow);
  measure->add_option("--p", s.p, "Exponent p >= 1");
  add_common_options(measure, s);

  // braid
  auto* braid = app.add_subcommand(
      "braid", "Extract winding matrix and braid word from trajectories");
  FlowArgs braid_flow;
  add_flow_options(braid, braid_flow);
  std::string braid_points, trajectories_path;
  braid->add_option("--points", braid_points, "Start configuration [[x,y],...]");
  braid->add_option("--trajectories", trajectories_path, "Configuration path CSV file");
  add_common_options(braid, s);

  // push
  auto* push = app.add_subcommand("push", "Build a finger-push flow along a polyline");
  std::string gamma_path;
  double tube_radius = 0.0;
  int rk4_steps = 0;
  push->add_option("--gamma", gamma_path, "Closed polyline JSON file")->required();
  push->add_option("--tube-radius", tube_radius, "Tube radius")->required();
  push->add_option("--rk4-steps", rk4_steps, "Integrator steps per unit time (0 = auto)");
  add_common_options(push, s);

  // bound
  auto* bound = app.add_subcommand(
      "bound", "Assemble the certified lower bound against the measured upper bound");
  std::string bound_gamma_path, centers_text;
  double rho = 0.02, loop_radius = 0.1, bound_tube = 0.0, cprime_override = 0.0;
  int bound_k = 0, segments_per_turn = 48;
  bool full_twist = false;
  bound->add_option("--gamma", bound_gamma_path, "Closed polyline JSON file");
  bound->add_option("--k", bound_k, "Shorthand: k-fold encircling loop");
  bound->add_option("--centers", centers_text, "Centers [[x,y],...] (default square)");
  bound->add_option("--rho", rho, "Disc radius of each neighborhood factor");
  bound->add_option("--loop-radius", loop_radius, "Encircling loop radius (with --k)");
  bound->add_option("--tube-radius", bound_tube, "Tube radius (0 = auto)");
  bound->add_option("--segments-per-turn", segments_per_turn, "Loop resolution (with --k)");
  bound->add_option("--cprime", cprime_override, "Use this C' instead of estimating");
  bound->add_flag("--full-twist", full_twist, "Multiply the braid by the full twist");
  bound->add_option("--n", s.n, "Number of marked points");
  add_common_options(bound, s);

  // grow
  auto* grow = app.add_subcommand(
      "grow", "Growth table of certified bounds for k-fold braids");
  int k_max = 5;
  double grow_rho = 0.0, grow_loop = 0.0, grow_tube = 0.0;
  int grow_segments = 0;
  grow->add_option("--kmax", k_max, "Largest winding k");
  grow->add_option("--rho", grow_rho, "Neighborhood radius");
  grow->add_option("--loop-radius", grow_loop, "Encircling loop radius");
  grow->add_option("--tube-radius", grow_tube, "Tube radius");
  grow->add_option("--segments-per-turn", grow_segments, "Loop resolution");
  grow->add_option("--n", s.n, "Number of marked points");
  add_common_options(grow, s);

  // verify
  auto* verify = app.add_subcommand("verify", "Run the invariant suites");
  bool quick = false;
  verify->add_flag("--quick", quick, "Reduced sample counts");
  add_common_options(verify, s, /*with_surface=*/false);

  CLI11_PARSE(app, argc, argv);
  CLI::App* active = app.get_subcommands().front();
  apply_config(s, active);

  if (active == constant) {
    SurfaceHandle surface = make_surface(s.surface);
    double cprime = 0.0;
    check(lpf_cprime(surface.ptr, grid, quadrature(s), &cprime));
    json report;
    report["op"] = "constant";
    report["surface"] = s.surface;
    report["grid"] = grid;
    report["seed"] = s.seed;
    report["mc_samples"] = s.mc_samples;
    report["constants"]["cprime"] = cprime;
    if (s.n >= 2) {
      double C = 0.0;
      check(lpf_lipschitz_constant(s.n, cprime, &C));
      report["n"] = s.n;
      report["constants"]["C"] = C;
      std::printf("C_prime(%s) = %.6f\nC(n=%d) = %.6f\n", s.surface.c_str(), cprime,
                  s.n, C);
    } else {
      std::printf("C_prime(%s) = %.6f\n", s.surface.c_str(), cprime);
    }
    write_file(fs::path(s.out_dir) / "constants.json", report.dump(2) + "\n");
    write_manifest(s, manifest_base("constant", s), {"constants.json"});
    return 0;
  }

  if (active == measure) {
    SurfaceHandle surface = make_surface(s.surface);
    FlowHandle flow = make_flow(measure_flow, s, surface);
    double value = 0.0, sigma = 0.0;
    check(lpf_lp_length(flow.ptr, s.p, quadrature(s), &value, &sigma));
    json report;
    report["op"] = "measure";
    report["surface"] = s.surface;
    report["p"] = s.p;
    report["value"] = value;
    report["std_error"] = sigma;
    report["seed"] = s.seed;
    report["mc_samples"] = s.mc_samples;
    report["time_steps"] = s.time_steps;
    std::printf("l_%g = %.6f +- %.6f\n", s.p, value, sigma);
    write_file(fs::path(s.out_dir) / "measure.json", report.dump(2) + "\n");
    write_manifest(s, manifest_base("measure", s), {"measure.json"});
    return 0;
  }

  if (active == braid) {
    SurfaceHandle surface = make_surface(s.surface);
    PathHandle path;
    if (!trajectories_path.empty()) {
      check(lpf_path_from_csv(read_file(trajectories_path).c_str(), &path.ptr));
    } else {
      if (braid_points.empty()) {
        std::cerr << "error: braid needs --trajectories or --flow with --points\n";
        return kExitValidation;
      }
      FlowHandle flow = make_flow(braid_flow, s, surface);
      const std::vector<double> xy = parse_points(braid_points);
      check(lpf_path_lift(flow.ptr, xy.data(), static_cast<int>(xy.size() / 2), &path.ptr));
    }
    char* winding_raw = nullptr;
    check(lpf_path_winding_json(surface.ptr, path.ptr, &winding_raw));
    json report;
    report["op"] = "braid";
    report["surface"] = s.surface;
    report["n"] = lpf_path_points(path.ptr);
    report["winding"] = json::parse(take_string(winding_raw));
    double lh = 0.0;
    long long shift = 0;
    check(lpf_path_lh_lower(surface.ptr, path.ptr, &lh, &shift));
    report["L_h_lower"] = lh;
    report["center_shift"] = shift;
    if (s.surface == "disc") {
      char* word_raw = nullptr;
      check(lpf_path_artin_json(surface.ptr, path.ptr, &word_raw));
      report["word"] = json::parse(take_string(word_raw));
    }
    double gb = 0.0;
    check(lpf_path_gb_length(surface.ptr, path.ptr, &gb));
    report["gb_length"] = gb;
    std::printf("max |w| = %.3f, L_h_lower = %.6f, gb_length = %.6f\n",
                report["winding"]["max_abs"].get<double>(), lh, gb);
    write_file(fs::path(s.out_dir) / "braid.json", report.dump(2) + "\n");
    write_manifest(s, manifest_base("braid", s), {"braid.json"});
    return 0;
  }

  if (active == push) {
    SurfaceHandle surface = make_surface(s.surface);
    FlowHandle flow;
    check(lpf_flow_point_push(surface.ptr, read_file(gamma_path).c_str(), tube_radius,
                              rk4_steps, &flow.ptr));
    char* flow_json_raw = nullptr;
    check(lpf_flow_to_json(flow.ptr, &flow_json_raw));
    const std::string flow_json = take_string(flow_json_raw);
    double distortion = 0.0;
    check(lpf_flow_area_distortion(flow.ptr, 2000, &distortion));
    json report;
    report["op"] = "push";
    report["surface"] = s.surface;
    report["tube_radius"] = tube_radius;
    report["area_distortion"] = distortion;
    std::printf("push flow written; area distortion %.2e\n", distortion);
    write_file(fs::path(s.out_dir) / "flow.json", flow_json + "\n");
    write_file(fs::path(s.out_dir) / "push.json", report.dump(2) + "\n");
    write_manifest(s, manifest_base("push", s), {"flow.json", "push.json"});
    return 0;
  }

  if (active == bound) {
    SurfaceHandle surface = make_surface(s.surface);
    std::vector<double> centers = centers_text.empty() ? default_square_centers(0.3)
                                                       : parse_points(centers_text);
    const int n = static_cast<int>(centers.size() / 2);
    std::string gamma_json;
    if (!bound_gamma_path.empty()) {
      gamma_json = read_file(bound_gamma_path);
    } else if (bound_k >= 1) {
      gamma_json = build_encircling_gamma(centers, loop_radius, bound_k, segments_per_turn);
    } else {
      std::cerr << "error: bound needs --gamma or --k\n";
      return kExitValidation;
    }
    char* report_raw = nullptr;
    check(lpf_bound_json(surface.ptr, centers.data(), n, rho, gamma_json.c_str(),
                         bound_tube, full_twist ? 1 : 0, cprime_override, quadrature(s),
                         &report_raw));
    const std::string report = take_string(report_raw);
    const json rep = json::parse(report);
    std::printf("lower = %.6e, upper = %.6e +- %.2e\n", rep["lower_bound"].get<double>(),
                rep["upper_bound"].get<double>(), rep["upper_sigma"].get<double>());
    write_file(fs::path(s.out_dir) / "bound.json", report + "\n");
    write_manifest(s, manifest_base("bound", s), {"bound.json"});
    return 0;
  }

  if (active == grow) {
    if (s.surface != "disc") {
      std::cerr << "error: grow runs on the disc\n";
      return kExitValidation;
    }
    char* csv_raw = nullptr;
    char* manifest_raw = nullptr;
    check(lpf_grow(k_max, s.n, quadrature(s), grow_rho, grow_loop, grow_tube,
                   grow_segments, &csv_raw, &manifest_raw));
    const std::string csv = take_string(csv_raw);
    const json core_manifest = json::parse(take_string(manifest_raw));
    std::fputs(csv.c_str(), stdout);
    write_file(fs::path(s.out_dir) / "grow.csv", csv);
    json manifest = manifest_base("grow", s);
    manifest["experiment"] = core_manifest;
    write_manifest(s, manifest, {"grow.csv"});
    return 0;
  }

  if (active == verify) {
    char* report_raw = nullptr;
    int passed = 0;
    check(lpf_verify_json(quick ? 1 : 0, s.seed, &report_raw, &passed));
    const std::string report = take_string(report_raw);
    const json rep = json::parse(report);
    for (const auto& c : rep["checks"]) {
      std::printf("[%s] %s (%.1fs) — %s\n", c["pass"].get<bool>() ? "PASS" : "FAIL",
                  c["name"].get<std::string>().c_str(), c["seconds"].get<double>(),
                  c["detail"].get<std::string>().c_str());
    }
    write_file(fs::path(s.out_dir) / "verify.json", report + "\n");
    write_manifest(s, manifest_base("verify", s), {"verify.json"});
    return passed != 0 ? 0 : 1;
  }

  return kExitValidation;
}
