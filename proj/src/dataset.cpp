// Copyright Contributors to the HybridRender Project
// SPDX-License-Identifier: Apache-2.0

#include "dataset.h"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "image_io.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace hr {

namespace {

std::string frame_stem(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06d", index);
  return buf;
}

CameraIntrinsics load_intrinsics(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw LoadError("missing intrinsics file: " + path.string());
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw FormatError("cannot parse " + path.string() + ": " + e.what());
  }
  CameraIntrinsics K;
  try {
    K.fx = j.at("fx").get<double>();
    K.fy = j.at("fy").get<double>();
    K.cx = j.at("cx").get<double>();
    K.cy = j.at("cy").get<double>();
    K.width = j.at("width").get<int>();
    K.height = j.at("height").get<int>();
  } catch (const json::exception& e) {
    throw FormatError("intrinsics fields invalid in " + path.string() + ": " + e.what());
  }
  K.validate();
  return K;
}

Pose load_pose(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw LoadError("missing pose file: " + path.string());
  std::vector<double> vals;
  double v;
  while (f >> v) vals.push_back(v);
  if (vals.size() != 16)
    throw FormatError("pose file " + path.string() + " has " + std::to_string(vals.size()) +
                      " values, expected 16 (4x4 row-major)");
  Mat4 m;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m(r, c) = vals[r * 4 + c];
  if (std::abs(m(3, 0)) > 1e-9 || std::abs(m(3, 1)) > 1e-9 || std::abs(m(3, 2)) > 1e-9 ||
      std::abs(m(3, 3) - 1.0) > 1e-9)
    throw FormatError("pose file " + path.string() + " bottom row is not [0 0 0 1]");
  Pose pose = Pose::from_matrix(m);
  try {
    pose.validate();
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return pose;
}

}  // namespace

SceneDataset load_dataset(const std::string& dir) {
  const fs::path root(dir);
  if (!fs::is_directory(root)) throw LoadError("dataset directory not found: " + dir);
  const CameraIntrinsics K = load_intrinsics(root / "intrinsics.json");

  const fs::path frames_dir = root / "frames";
  if (!fs::is_directory(frames_dir)) throw LoadError("missing frames/ in " + dir);

  std::vector<int> indices;
  for (const auto& entry : fs::directory_iterator(frames_dir)) {
    const std::string name = entry.path().filename().string();
    const auto pos = name.find(".rgb.png");
    if (pos == std::string::npos) continue;
    indices.push_back(std::stoi(name.substr(0, pos)));
  }
  std::sort(indices.begin(), indices.end());
  if (indices.empty()) throw LoadError("no frames found in " + frames_dir.string());

  SceneDataset out;
  for (int idx : indices) {
    const std::string stem = frame_stem(idx);
    Frame fr;
    fr.index = idx;
    fr.intrinsics = K;
    fr.rgb = load_rgb_png((frames_dir / (stem + ".rgb.png")).string());
    const fs::path depth_path = frames_dir / (stem + ".depth.png");
    if (!fs::exists(depth_path)) throw LoadError("frame " + std::to_string(idx) +
                                                 ": missing depth file " + depth_path.string());
    fr.depth = load_depth_png(depth_path.string());
    fr.pose = load_pose(frames_dir / (stem + ".pose.txt"));
    if (fr.rgb.width != K.width || fr.rgb.height != K.height)
      throw FormatError("frame " + std::to_string(idx) + ": rgb size does not match intrinsics");
    if (fr.depth.width != K.width || fr.depth.height != K.height)
      throw FormatError("frame " + std::to_string(idx) + ": depth size does not match intrinsics");
    out.frames.push_back(std::move(fr));
  }
  return out;
}

void save_dataset(const std::string& dir, const SceneDataset& dataset) {
  const fs::path root(dir);
  fs::create_directories(root / "frames");
  if (dataset.frames.empty()) throw ParamError("cannot save empty dataset");

  const CameraIntrinsics& K = dataset.frames.front().intrinsics;
  json j{{"fx", K.fx},       {"fy", K.fy},        {"cx", K.cx},
         {"cy", K.cy},       {"width", K.width},  {"height", K.height}};
  std::ofstream f(root / "intrinsics.json");
  f << j.dump(2) << "\n";

  for (const Frame& fr : dataset.frames) {
    const std::string stem = frame_stem(fr.index);
    save_rgb_png((root / "frames" / (stem + ".rgb.png")).string(), fr.rgb);
    save_depth_png((root / "frames" / (stem + ".depth.png")).string(), fr.depth);
    std::ofstream pf(root / "frames" / (stem + ".pose.txt"));
    const Mat4 m = fr.pose.matrix();
    pf.precision(17);
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) pf << m(r, c) << (c == 3 ? "" : " ");
      pf << "\n";
    }
  }
}

SplitResult split_train_test(SceneDataset& dataset, int stride) {
  if (stride < 2) throw ParamError("split stride must be >= 2");
  SplitResult res;
  dataset.train_tags.assign(dataset.frames.size(), false);
  if (int(dataset.frames.size()) < stride) {
    res.degenerate = true;
    res.warning = "fewer frames than stride; tagging all frames as train";
    std::fill(dataset.train_tags.begin(), dataset.train_tags.end(), true);
    return res;
  }
  for (std::size_t i = 0; i < dataset.frames.size(); ++i)
    dataset.train_tags[i] = dataset.frames[i].index % stride == 0;
  return res;
}

void save_quality_manifest(const std::string& path, const std::vector<QualityRow>& rows) {
  std::ofstream f(path);
  if (!f) throw LoadError("cannot open for writing: " + path);
  f << "frame_index,raw_score,chained_score,quality_weight\n";
  f.precision(17);
  for (const QualityRow& r : rows)
    f << r.frame_index << "," << r.raw_score << "," << r.chained_score << ","
      << r.quality_weight << "\n";
}

std::vector<QualityRow> load_quality_manifest(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw LoadError("cannot read manifest: " + path);
  std::vector<QualityRow> rows;
  std::string line;
  std::getline(f, line);  // header
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    QualityRow r;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    if (!(ss >> r.frame_index >> r.raw_score >> r.chained_score >> r.quality_weight))
      throw FormatError("bad manifest row: " + line);
    rows.push_back(r);
  }
  return rows;
}

void apply_quality_manifest(SceneDataset& dataset, const std::vector<QualityRow>& rows) {
  for (const QualityRow& r : rows)
    for (Frame& fr : dataset.frames)
      if (fr.index == r.frame_index) fr.quality_weight = r.quality_weight;
}

}  // namespace hr
