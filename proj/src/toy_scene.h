// Copyright Contributors to the HybridRender Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "dataset.h"

namespace hr {

// Procedural texture evaluated on the planar (u, v) coordinates of a hit.
struct Texture {
  enum class Kind { Constant, Checker, Gradient, Sine, Noise };
  Kind kind = Kind::Constant;
  Vec3 color_a = Vec3(0.8, 0.8, 0.8);
  Vec3 color_b = Vec3(0.2, 0.2, 0.2);
  double scale = 0.25;  // feature size in meters
};

// Axis-aligned rectangle: exactly one coordinate of min/max coincides.
// Boxes are expanded into their six faces at load time.
struct RectPrimitive {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();
  Texture texture;
  int axis() const;  // index of the constant coordinate
};

struct BoxPrimitive {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();
  Texture texture;
};

struct ToySceneSpec {
  int width = 64, height = 64;
  double fov_deg = 60.0;
  Vec3 background = Vec3::Zero();
  std::vector<RectPrimitive> rects;
  std::vector<BoxPrimitive> boxes;
  std::vector<Pose> trajectory;
};

// Parses the structured scene config (JSON). See README for the schema.
ToySceneSpec load_toy_scene_spec(const std::string& path);
ToySceneSpec parse_toy_scene_spec(const std::string& json_text);

// Analytic one-ray-per-pixel render of the scene: sharp RGB, exact z-depth,
// exact poses. Deterministic for a fixed (spec, seed).
SceneDataset generate_toy_scene(const ToySceneSpec& spec, std::uint64_t seed);

// Single-hit query used by tests and by the dataset generator.
struct ToyHit {
  bool hit = false;
  double t = 0;  // ray parameter
  Vec3 point = Vec3::Zero();
  Vec3 color = Vec3::Zero();
};
ToyHit trace_toy_ray(const ToySceneSpec& spec, const Vec3& origin, const Vec3& dir,
                     std::uint64_t seed);

}  // namespace hr
