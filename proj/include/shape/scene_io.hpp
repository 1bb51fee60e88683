#pragma once

// JSON encoding of scenes and scene configurations.
//
// Scene:  {"camera":{"f","N","tau"}, "pose":{"tx","tz","theta"},
//          "points":[[x,z],...], "observations":[q|null,...]}
// "pose" is optional (ground truth). null encodes the out-of-view sentinel.
//
// Config: {"seed", "num_points", "depth_range":[lo,hi], "lateral_margin",
//          "pose_box":{"x":[lo,hi],"z":[lo,hi]}, "theta_range":[lo,hi],
//          "camera":{"f","N", "tau" | "fov_deg"}}
// Every config field is optional and defaults to SceneConfig's value.

#include <fstream>
#include <string>
#include <tuple>
#include <utility>

#include <json.hpp>

#include "shape/camera.hpp"
#include "shape/error.hpp"
#include "shape/scenegen.hpp"

namespace shape {

using json = nlohmann::json;

inline json to_json(const Scene& scene) {
  json j;
  j["camera"] = {{"f", scene.camera.focal_length()},
                 {"N", scene.camera.resolution()},
                 {"tau", scene.camera.sensor_width()}};
  if (scene.true_pose) {
    j["pose"] = {{"tx", scene.true_pose->t_x}, {"tz", scene.true_pose->t_z},
                 {"theta", scene.true_pose->theta}};
  }
  j["points"] = json::array();
  for (const Point2& p : scene.points) j["points"].push_back({p.x, p.z});
  j["observations"] = json::array();
  for (const Observation& q : scene.observations) {
    j["observations"].push_back(q ? json(*q) : json(nullptr));
  }
  return j;
}

namespace detail {

inline CameraModel camera_from_json(const json& c) {
  const double f = c.value("f", 1.0);
  const int n = c.value("N", 320);
  if (c.contains("tau")) return CameraModel(f, n, c.at("tau").get<double>());
  return fov_from_degrees(f, c.value("fov_deg", 90.0), n);
}

inline std::pair<double, double> range_from_json(const json& j, const char* key,
                                                  std::pair<double, double> fallback) {
  if (!j.contains(key)) return fallback;
  const json& r = j.at(key);
  if (!r.is_array() || r.size() != 2) {
    throw Error(ErrorCode::kParse, std::string(key) + " must be a [lo, hi] pair");
  }
  return {r[0].get<double>(), r[1].get<double>()};
}

template <typename F>
auto parse_guard(F&& body) {
  try {
    return body();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
}

}  // namespace detail

inline Scene scene_from_json(const json& j) {
  return detail::parse_guard([&] {
    Scene scene;
    scene.camera = detail::camera_from_json(j.at("camera"));
    if (j.contains("pose") && !j.at("pose").is_null()) {
      const json& p = j.at("pose");
      scene.true_pose = Pose(p.at("tx").get<double>(), p.at("tz").get<double>(),
                             p.at("theta").get<double>());
    }
    for (const json& p : j.at("points")) {
      if (!p.is_array() || p.size() != 2) throw Error(ErrorCode::kParse, "points must be [x, z] pairs");
      scene.points.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    for (const json& q : j.at("observations")) {
      scene.observations.push_back(q.is_null() ? Observation{} : Observation{q.get<double>()});
    }
    if (scene.points.size() != scene.observations.size()) {
      throw Error(ErrorCode::kParse, "points and observations differ in length");
    }
    return scene;
  });
}

inline json to_json(const SceneConfig& c) {
  return {{"seed", c.seed},
          {"num_points", c.num_points},
          {"depth_range", {c.depth_min, c.depth_max}},
          {"lateral_margin", c.lateral_margin},
          {"pose_box", {{"x", {c.pose_x_min, c.pose_x_max}}, {"z", {c.pose_z_min, c.pose_z_max}}}},
          {"theta_range", {c.theta_min, c.theta_max}},
          {"camera",
           {{"f", c.camera.focal_length()}, {"N", c.camera.resolution()}, {"tau", c.camera.sensor_width()}}}};
}

inline SceneConfig config_from_json(const json& j) {
  return detail::parse_guard([&] {
    if (!j.is_object()) throw Error(ErrorCode::kParse, "config must be a JSON object");
    SceneConfig c;
    c.seed = j.value("seed", c.seed);
    c.num_points = j.value("num_points", c.num_points);
    std::tie(c.depth_min, c.depth_max) =
        detail::range_from_json(j, "depth_range", {c.depth_min, c.depth_max});
    c.lateral_margin = j.value("lateral_margin", c.lateral_margin);
    if (j.contains("pose_box")) {
      const json& b = j.at("pose_box");
      std::tie(c.pose_x_min, c.pose_x_max) = detail::range_from_json(b, "x", {c.pose_x_min, c.pose_x_max});
      std::tie(c.pose_z_min, c.pose_z_max) = detail::range_from_json(b, "z", {c.pose_z_min, c.pose_z_max});
    }
    std::tie(c.theta_min, c.theta_max) =
        detail::range_from_json(j, "theta_range", {c.theta_min, c.theta_max});
    if (j.contains("camera")) c.camera = detail::camera_from_json(j.at("camera"));
    c.validate();
    return c;
  });
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, path + ": " + e.what());
  }
}

}  // namespace shape
