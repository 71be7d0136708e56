// Copyright Contributors to the HybridRender Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "camera.h"
#include "image.h"

namespace hr {

// One posed RGB-D observation. Depth is in meters, 0 marks invalid pixels.
struct Frame {
  int index = 0;
  Image<float> rgb;    // H x W x 3, values in [0,1]
  Image<float> depth;  // H x W, meters
  CameraIntrinsics intrinsics;
  Pose pose;
  double quality_weight = 1.0;  // omega_t^b, >= 0
};

struct SceneDataset {
  std::vector<Frame> frames;
  std::vector<bool> train_tags;  // parallel to frames; empty until split

  bool has_split() const { return train_tags.size() == frames.size(); }
  bool is_train(std::size_t i) const { return has_split() ? train_tags[i] : true; }

  std::vector<int> train_indices() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < frames.size(); ++i)
      if (is_train(i)) out.push_back(int(i));
    return out;
  }
  std::vector<int> test_indices() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < frames.size(); ++i)
      if (!is_train(i)) out.push_back(int(i));
    return out;
  }
};

// Directory layout:
//   intrinsics.json                    fx, fy, cx, cy, width, height
//   frames/NNNNNN.rgb.png              8-bit RGB
//   frames/NNNNNN.depth.png            16-bit grayscale, millimeters
//   frames/NNNNNN.pose.txt             4x4 row-major world-from-camera
SceneDataset load_dataset(const std::string& dir);
void save_dataset(const std::string& dir, const SceneDataset& dataset);

// Tags frames with index % stride == 0 as train, the rest as test. With fewer
// than `stride` frames the split degenerates: all frames train, warning set.
struct SplitResult {
  bool degenerate = false;
  std::string warning;
};
SplitResult split_train_test(SceneDataset& dataset, int stride = 5);

// Quality-weight manifest (CSV: frame_index, raw_score, chained_score,
// quality_weight). Loading assigns weights onto matching frames.
struct QualityRow {
  int frame_index = 0;
  double raw_score = 0;
  double chained_score = 0;
  double quality_weight = 1;
};
void save_quality_manifest(const std::string& path, const std::vector<QualityRow>& rows);
std::vector<QualityRow> load_quality_manifest(const std::string& path);
void apply_quality_manifest(SceneDataset& dataset, const std::vector<QualityRow>& rows);

}  // namespace hr
