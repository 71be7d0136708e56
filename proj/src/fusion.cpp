// Copyright Contributors to the HybridRender Project
// SPDX-License-Identifier: Apache-2.0

#include "fusion.h"

#include <map>

namespace hr {

template <typename T>
PointField<T> build_point_cloud(const SceneDataset& dataset, const FusionConfig& cfg) {
  if (!(cfg.voxel_size > 0)) throw ParamError("voxel_size must be positive");

  std::vector<Vec3> samples;
  for (std::size_t i = 0; i < dataset.frames.size(); ++i) {
    if (!dataset.is_train(i)) continue;
    const Frame& fr = dataset.frames[i];
    for (int y = 0; y < fr.depth.height; ++y) {
      for (int x = 0; x < fr.depth.width; ++x) {
        const double d = fr.depth.at(x, y);
        if (!(d > 0)) continue;
        samples.push_back(back_project(fr.intrinsics, fr.pose, x, y, d));
      }
    }
  }
  if (samples.empty()) throw DomainError("build_point_cloud: no valid depth pixels");

  // Voxel grid anchored at the scene minimum so the cell layout does not
  // depend on where the world origin happens to fall.
  Vec3 lo = samples[0];
  for (const Vec3& p : samples) lo = lo.cwiseMin(p);

  struct Accum {
    Vec3 sum = Vec3::Zero();
    int count = 0;
  };
  // Ordered map keeps the fused cloud independent of sample iteration order.
  std::map<std::array<long, 3>, Accum> voxels;
  for (const Vec3& p : samples) {
    const std::array<long, 3> key = {long(std::floor((p.x() - lo.x()) / cfg.voxel_size)),
                                     long(std::floor((p.y() - lo.y()) / cfg.voxel_size)),
                                     long(std::floor((p.z() - lo.z()) / cfg.voxel_size))};
    Accum& a = voxels[key];
    a.sum += p;
    a.count += 1;
  }

  PointField<T> field;
  field.voxel_size = cfg.voxel_size;
  field.positions.reserve(voxels.size());
  for (const auto& [key, acc] : voxels) field.positions.push_back(acc.sum / acc.count);

  const int p_count = int(field.positions.size());
  field.descriptors = MatX<T>(p_count, kDescriptorDim);
  Rng rng = make_stream(cfg.seed, stream_tag("descriptor_init"));
  for (int p = 0; p < p_count; ++p)
    for (int d = 0; d < kDescriptorDim; ++d)
      field.descriptors(p, d) = T(rng.normal() * cfg.descriptor_std);

  const double logit = std::log(cfg.initial_confidence / (1.0 - cfg.initial_confidence));
  field.conf_logits = VecX<T>::Constant(p_count, T(logit));

  field.rebuild_index();
  field.alloc_grads();
  return field;
}

template PointField<float> build_point_cloud(const SceneDataset&, const FusionConfig&);
template PointField<double> build_point_cloud(const SceneDataset&, const FusionConfig&);

}  // namespace hr
