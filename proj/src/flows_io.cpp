#include <string>

#include <json.hpp>

#include "lpflow/error.hpp"
#include "lpflow/flows.hpp"

namespace lpflow {

namespace {

using nlohmann::json;

json term_to_json(const StreamTerm& term) {
  json j;
  if (const auto* rot = std::get_if<RigidRotationTerm>(&term)) {
    j["kind"] = "rotation";
    j["params"] = {{"omega", rot->omega}};
  } else if (const auto* fm = std::get_if<FourierTerm>(&term)) {
    j["kind"] = "fourier";
    j["params"] = {{"kx", fm->kx}, {"ky", fm->ky}, {"amplitude", fm->amplitude}, {"phase", fm->phase}};
  } else if (const auto* bump = std::get_if<MovingBumpTerm>(&term)) {
    j["kind"] = "moving_bump";
    j["params"] = {{"ax", bump->ax}, {"ay", bump->ay}, {"bx", bump->bx},
                   {"by", bump->by}, {"tube_radius", bump->tube_radius}};
  } else if (const auto* vort = std::get_if<DiscVortexTerm>(&term)) {
    j["kind"] = "disc_vortices";
    json vs = json::array();
    for (const auto& v : vort->vortices)
      vs.push_back({{"cx", v.cx}, {"cy", v.cy}, {"sigma", v.sigma}, {"amplitude", v.amplitude}});
    j["params"] = {{"vortices", vs},
                   {"cutoff_inner", vort->cutoff_inner},
                   {"cutoff_outer", vort->cutoff_outer}};
  }
  return j;
}

StreamTerm term_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const json& p = j.at("params");
  if (kind == "rotation") {
    return RigidRotationTerm{p.at("omega").get<double>()};
  }
  if (kind == "fourier") {
    FourierTerm fm;
    fm.kx = p.at("kx").get<int>();
    fm.ky = p.at("ky").get<int>();
    fm.amplitude = p.at("amplitude").get<double>();
    fm.phase = p.at("phase").get<double>();
    return fm;
  }
  if (kind == "moving_bump") {
    MovingBumpTerm bump;
    bump.ax = p.at("ax").get<double>();
    bump.ay = p.at("ay").get<double>();
    bump.bx = p.at("bx").get<double>();
    bump.by = p.at("by").get<double>();
    bump.tube_radius = p.at("tube_radius").get<double>();
    return bump;
  }
  if (kind == "disc_vortices") {
    DiscVortexTerm term;
    term.cutoff_inner = p.at("cutoff_inner").get<double>();
    term.cutoff_outer = p.at("cutoff_outer").get<double>();
    for (const auto& vj : p.at("vortices")) {
      DiscVortexTerm::Vortex v;
      v.cx = vj.at("cx").get<double>();
      v.cy = vj.at("cy").get<double>();
      v.sigma = vj.at("sigma").get<double>();
      v.amplitude = vj.at("amplitude").get<double>();
      term.vortices.push_back(v);
    }
    return term;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown flow segment kind: " + kind);
}

}  // namespace

std::string Flow::to_json_string() const {
  json j;
  j["surface"] = std::string(surface_.name());
  j["rk4_steps"] = rk4_steps_;
  if (warp_lambda_ != 0.0) j["time_warp"] = warp_lambda_;
  json segs = json::array();
  for (const auto& seg : segments_) {
    json sj = term_to_json(seg.term);
    sj["t_start"] = seg.t_start;
    sj["t_end"] = seg.t_end;
    segs.push_back(std::move(sj));
  }
  j["segments"] = std::move(segs);
  return j.dump(2);
}

Flow Flow::from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("flow JSON parse error: ") + e.what());
  }
  try {
    const auto surface = Surface::from_name(j.at("surface").get<std::string>());
    if (!surface)
      throw Error(ErrorKind::InvalidArgument, "flow JSON: unknown surface");
    const int rk4_steps = j.value("rk4_steps", 1024);
    std::vector<FlowSegment> segs;
    for (const auto& sj : j.at("segments")) {
      FlowSegment seg;
      seg.t_start = sj.at("t_start").get<double>();
      seg.t_end = sj.at("t_end").get<double>();
      seg.term = term_from_json(sj);
      segs.push_back(std::move(seg));
    }
    Flow flow(*surface, std::move(segs), rk4_steps);
    if (j.contains("time_warp")) flow = flow.with_time_warp(j.at("time_warp").get<double>());
    return flow;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("flow JSON: ") + e.what());
  }
}

std::string polyline_to_json_string(const Polyline& line) {
  json j;
  json pts = json::array();
  for (const auto& p : line.points) pts.push_back({p.x, p.y});
  j["points"] = std::move(pts);
  j["closed"] = line.closed;
  return j.dump(2);
}

Polyline polyline_from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("polyline JSON parse error: ") + e.what());
  }
  try {
    Polyline line;
    const json& pts = j.is_array() ? j : j.at("points");
    for (const auto& pj : pts) {
      if (!pj.is_array() || pj.size() != 2)
        throw Error(ErrorKind::InvalidArgument, "polyline JSON: points must be [x, y] pairs");
      line.points.push_back({pj[0].get<double>(), pj[1].get<double>(), 0.0});
    }
    line.closed = j.is_array() ? true : j.value("closed", false);
    return line;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("polyline JSON: ") + e.what());
  }
}

}  // namespace lpflow
