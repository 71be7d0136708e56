// Copyright Contributors to the HybridRender Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "dataset.h"
#include "point_field.h"

namespace hr {

struct FusionConfig {
  double voxel_size = 0.02;       // meters
  double initial_confidence = 0.3;
  std::uint64_t seed = 0;          // descriptor initialization
  double descriptor_std = 0.1;
};

// Back-projects every valid depth pixel of the train frames, deduplicates by
// voxel hashing (one centroid per voxel), and initializes learnable state.
template <typename T>
PointField<T> build_point_cloud(const SceneDataset& dataset, const FusionConfig& cfg);

extern template PointField<float> build_point_cloud(const SceneDataset&, const FusionConfig&);
extern template PointField<double> build_point_cloud(const SceneDataset&, const FusionConfig&);

}  // namespace hr
