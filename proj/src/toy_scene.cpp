// Copyright Contributors to the HybridRender Project
// SPDX-License-Identifier: Apache-2.0

#include "toy_scene.h"

#include <json.hpp>

#include <cmath>
#include <fstream>

using nlohmann::json;

namespace hr {

namespace {

Vec3 parse_vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw FormatError("expected a 3-element array");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

Texture parse_texture(const json& j) {
  Texture t;
  const std::string kind = j.value("kind", "constant");
  if (kind == "constant")
    t.kind = Texture::Kind::Constant;
  else if (kind == "checker")
    t.kind = Texture::Kind::Checker;
  else if (kind == "gradient")
    t.kind = Texture::Kind::Gradient;
  else if (kind == "sine")
    t.kind = Texture::Kind::Sine;
  else if (kind == "noise")
    t.kind = Texture::Kind::Noise;
  else
    throw FormatError("unknown texture kind: " + kind);
  if (j.contains("color_a")) t.color_a = parse_vec3(j["color_a"]);
  if (j.contains("color_b")) t.color_b = parse_vec3(j["color_b"]);
  t.scale = j.value("scale", 0.25);
  if (!(t.scale > 0)) throw FormatError("texture scale must be positive");
  return t;
}

Vec3 texture_color(const Texture& tex, double u, double v, std::uint64_t seed) {
  switch (tex.kind) {
    case Texture::Kind::Constant:
      return tex.color_a;
    case Texture::Kind::Checker: {
      const long iu = long(std::floor(u / tex.scale));
      const long iv = long(std::floor(v / tex.scale));
      return ((iu + iv) & 1) == 0 ? tex.color_a : tex.color_b;
    }
    case Texture::Kind::Gradient: {
      double f = u / tex.scale - std::floor(u / tex.scale);
      return tex.color_a + (tex.color_b - tex.color_a) * f;
    }
    case Texture::Kind::Sine: {
      const double m = 0.5 + 0.25 * std::sin(2.0 * M_PI * u / tex.scale) +
                       0.25 * std::sin(2.0 * M_PI * v / tex.scale);
      return tex.color_a + (tex.color_b - tex.color_a) * m;
    }
    case Texture::Kind::Noise: {
      const std::uint64_t iu = std::uint64_t(std::int64_t(std::floor(u / tex.scale)));
      const std::uint64_t iv = std::uint64_t(std::int64_t(std::floor(v / tex.scale)));
      const std::uint64_t h = splitmix64(splitmix64(seed ^ iu * 0x9e3779b97f4a7c15ull) ^ iv);
      const double m = double(h >> 11) * 0x1.0p-53;
      return tex.color_a + (tex.color_b - tex.color_a) * m;
    }
  }
  return tex.color_a;
}

struct RectHit {
  bool hit = false;
  double t = 0;
  double u = 0, v = 0;
};

RectHit intersect_rect(const RectPrimitive& r, const Vec3& o, const Vec3& d) {
  RectHit out;
  const int k = r.axis();
  if (std::abs(d[k]) < 1e-12) return out;
  const double t = (r.min[k] - o[k]) / d[k];
  if (t <= 1e-9) return out;
  const Vec3 p = o + t * d;
  const int a = (k + 1) % 3, b = (k + 2) % 3;
  if (p[a] < r.min[a] - 1e-12 || p[a] > r.max[a] + 1e-12) return out;
  if (p[b] < r.min[b] - 1e-12 || p[b] > r.max[b] + 1e-12) return out;
  out.hit = true;
  out.t = t;
  out.u = p[a];
  out.v = p[b];
  return out;
}

std::vector<RectPrimitive> box_faces(const BoxPrimitive& b) {
  std::vector<RectPrimitive> faces;
  for (int k = 0; k < 3; ++k) {
    for (int side = 0; side < 2; ++side) {
      RectPrimitive r;
      r.min = b.min;
      r.max = b.max;
      const double c = side == 0 ? b.min[k] : b.max[k];
      r.min[k] = c;
      r.max[k] = c;
      r.texture = b.texture;
      faces.push_back(r);
    }
  }
  return faces;
}

std::vector<Pose> parse_trajectory(const json& j) {
  std::vector<Pose> poses;
  const std::string type = j.value("type", "poses");
  if (type == "poses") {
    for (const json& p : j.at("poses"))
      poses.push_back(Pose::look_at(parse_vec3(p.at("eye")), parse_vec3(p.at("target"))));
  } else if (type == "line") {
    const Vec3 start = parse_vec3(j.at("start"));
    const Vec3 end = parse_vec3(j.at("end"));
    const int frames = j.at("frames").get<int>();
    if (frames < 1) throw FormatError("trajectory needs at least one frame");
    const bool track = j.contains("target");
    const Vec3 target = track ? parse_vec3(j.at("target")) : Vec3::Zero();
    const Vec3 offset = j.contains("target_offset") ? parse_vec3(j.at("target_offset"))
                                                    : Vec3(0, 0, 1);
    for (int i = 0; i < frames; ++i) {
      const double f = frames == 1 ? 0.0 : double(i) / (frames - 1);
      const Vec3 eye = start + (end - start) * f;
      poses.push_back(Pose::look_at(eye, track ? target : Vec3(eye + offset)));
    }
  } else if (type == "arc") {
    const Vec3 center = parse_vec3(j.at("center"));
    const double radius = j.at("radius").get<double>();
    const double y = j.value("y", 0.0);
    const Vec3 target = parse_vec3(j.at("target"));
    const double a0 = j.at("start_deg").get<double>() * M_PI / 180.0;
    const double a1 = j.at("end_deg").get<double>() * M_PI / 180.0;
    const int frames = j.at("frames").get<int>();
    if (frames < 1) throw FormatError("trajectory needs at least one frame");
    for (int i = 0; i < frames; ++i) {
      const double f = frames == 1 ? 0.0 : double(i) / (frames - 1);
      const double a = a0 + (a1 - a0) * f;
      const Vec3 eye = center + Vec3(radius * std::sin(a), y, -radius * std::cos(a));
      poses.push_back(Pose::look_at(eye, target));
    }
  } else {
    throw FormatError("unknown trajectory type: " + type);
  }
  return poses;
}

}  // namespace

int RectPrimitive::axis() const {
  for (int k = 0; k < 3; ++k)
    if (min[k] == max[k]) return k;
  throw FormatError("rect primitive has no constant coordinate");
}

ToySceneSpec parse_toy_scene_spec(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("cannot parse scene spec: ") + e.what());
  }
  ToySceneSpec spec;
  spec.width = j.value("width", 64);
  spec.height = j.value("height", 64);
  spec.fov_deg = j.value("fov_deg", 60.0);
  if (j.contains("background")) spec.background = parse_vec3(j["background"]);
  for (const json& p : j.value("primitives", json::array())) {
    const std::string type = p.at("type").get<std::string>();
    Texture tex = p.contains("texture") ? parse_texture(p["texture"]) : Texture{};
    if (type == "rect") {
      RectPrimitive r;
      r.min = parse_vec3(p.at("min"));
      r.max = parse_vec3(p.at("max"));
      r.texture = tex;
      r.axis();  // validates
      spec.rects.push_back(r);
    } else if (type == "box") {
      BoxPrimitive b;
      b.min = parse_vec3(p.at("min"));
      b.max = parse_vec3(p.at("max"));
      b.texture = tex;
      for (int k = 0; k < 3; ++k)
        if (!(b.min[k] < b.max[k])) throw FormatError("box min must be strictly below max");
      spec.boxes.push_back(b);
    } else {
      throw FormatError("unknown primitive type: " + type);
    }
  }
  spec.trajectory = parse_trajectory(j.at("trajectory"));
  return spec;
}

ToySceneSpec load_toy_scene_spec(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw LoadError("cannot read scene spec: " + path);
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return parse_toy_scene_spec(text);
}

ToyHit trace_toy_ray(const ToySceneSpec& spec, const Vec3& origin, const Vec3& dir,
                     std::uint64_t seed) {
  ToyHit best;
  auto consider = [&](const RectPrimitive& r) {
    const RectHit h = intersect_rect(r, origin, dir);
    if (h.hit && (!best.hit || h.t < best.t)) {
      best.hit = true;
      best.t = h.t;
      best.point = origin + h.t * dir;
      best.color = texture_color(r.texture, h.u, h.v, seed);
    }
  };
  for (const RectPrimitive& r : spec.rects) consider(r);
  for (const BoxPrimitive& b : spec.boxes)
    for (const RectPrimitive& f : box_faces(b)) consider(f);
  return best;
}

SceneDataset generate_toy_scene(const ToySceneSpec& spec, std::uint64_t seed) {
  if (spec.trajectory.empty()) throw GenerationError("scene has no trajectory poses");
  CameraIntrinsics K;
  K.width = spec.width;
  K.height = spec.height;
  const double f = (spec.width / 2.0) / std::tan(spec.fov_deg * M_PI / 360.0);
  K.fx = K.fy = f;
  K.cx = spec.width / 2.0;
  K.cy = spec.height / 2.0;

  for (const Pose& pose : spec.trajectory)
    for (const BoxPrimitive& b : spec.boxes) {
      const Vec3 e = pose.center();
      if (e.x() > b.min.x() && e.x() < b.max.x() && e.y() > b.min.y() && e.y() < b.max.y() &&
          e.z() > b.min.z() && e.z() < b.max.z())
        throw GenerationError("camera is inside a box primitive");
    }

  SceneDataset out;
  for (std::size_t i = 0; i < spec.trajectory.size(); ++i) {
    const Pose& pose = spec.trajectory[i];
    Frame fr;
    fr.index = int(i);
    fr.intrinsics = K;
    fr.pose = pose;
    fr.rgb = Image<float>(spec.width, spec.height, 3);
    fr.depth = Image<float>(spec.width, spec.height, 1);
    const Vec3 axis = pose.optical_axis();
    for (int y = 0; y < spec.height; ++y) {
      for (int x = 0; x < spec.width; ++x) {
        const Vec3 dir = pixel_ray_direction(K, pose, x, y);
        const ToyHit hit = trace_toy_ray(spec, pose.center(), dir, seed);
        if (hit.hit) {
          for (int c = 0; c < 3; ++c) fr.rgb.at(x, y, c) = float(clamp01(hit.color[c]));
          fr.depth.at(x, y) = float((hit.point - pose.center()).dot(axis));
        } else {
          for (int c = 0; c < 3; ++c) fr.rgb.at(x, y, c) = float(clamp01(spec.background[c]));
          fr.depth.at(x, y) = 0.0f;  // invalid
        }
      }
    }
    out.frames.push_back(std::move(fr));
  }
  return out;
}

}  // namespace hr
