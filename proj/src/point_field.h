// Copyright Contributors to the HybridRender Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <unordered_map>
#include <vector>

#include "camera.h"
#include "mlp.h"

namespace hr {

constexpr int kDescriptorDim = 32;
constexpr int kDefaultNeighbors = 8;
constexpr double kInterpEps = 1e-8;  // meters, guards the zero-distance singularity

// Uniform grid over 3D points. Cell size is 2x the median nearest-neighbor
// spacing; below 512 points queries fall back to an exhaustive scan.
class GridIndex {
 public:
  static constexpr int kExhaustiveBelow = 512;

  void build(const std::vector<Vec3>& positions);

  // Indices and squared distances of the k nearest points, ordered by
  // (distance^2, x, y, z) ascending. Returns fewer when the field is smaller.
  struct Neighbor {
    int index;
    double dist_sq;
  };
  std::vector<Neighbor> knn(const Vec3& q, int k) const;

  bool any_within(const Vec3& q, double radius) const;
  double nearest_dist(const Vec3& q) const;

  double cell_size() const { return cell_; }
  bool exhaustive() const { return exhaustive_; }

 private:
  std::array<long, 3> cell_of(const Vec3& p) const;
  const std::vector<Vec3>* points_ = nullptr;
  std::unordered_map<std::uint64_t, std::vector<int>> cells_;
  double cell_ = 1.0;
  Vec3 origin_ = Vec3::Zero();
  bool exhaustive_ = true;
  bool less_than(int a, int b, double da, double db) const;
  void scan_cell(std::uint64_t key, const Vec3& q, int k,
                 std::vector<Neighbor>& best) const;
};

// The point-based neural 3D representation. Positions are fixed geometry;
// descriptors and confidence logits are trainable.
template <typename T>
struct PointField {
  std::vector<Vec3> positions;
  MatX<T> descriptors;   // P x 32
  VecX<T> conf_logits;   // P; confidence = sigmoid(logit)
  MatX<T> grad_descriptors;
  VecX<T> grad_conf_logits;
  GridIndex index;
  double voxel_size = 0.02;

  int size() const { return int(positions.size()); }
  bool empty() const { return positions.empty(); }
  T confidence(int p) const { return sigmoid(conf_logits[p]); }

  void rebuild_index() { index.build(positions); }
  void alloc_grads() {
    grad_descriptors = MatX<T>::Zero(descriptors.rows(), descriptors.cols());
    grad_conf_logits = VecX<T>::Zero(conf_logits.size());
  }
  void zero_grad() {
    grad_descriptors.setZero();
    grad_conf_logits.setZero();
  }
  void collect_params(std::vector<ParamView<T>>& out) {
    out.push_back({"field.descriptors", descriptors.data(), grad_descriptors.data(),
                   std::size_t(descriptors.size())});
    out.push_back({"field.conf_logits", conf_logits.data(), grad_conf_logits.data(),
                   std::size_t(conf_logits.size())});
  }
};

// Result of a neural-3D-feature query: the k nearest points with their
// normalized interpolation weights, and the interpolated descriptor.
template <typename T>
struct InterpResult {
  std::vector<int> indices;
  std::vector<double> distances;
  std::vector<T> weights;  // >= 0, sum to 1
  VecX<T> feature;         // 32-vector r_i
};

// r_i = sum_p w_p * descriptor_p with w_p ~ confidence_p / (dist_p + eps),
// normalized over the k nearest neighbors (all points when P < k).
template <typename T>
InterpResult<T> query_interpolate(const PointField<T>& field, const Vec3& q,
                                  int k = kDefaultNeighbors);

// Backward pass: accumulates descriptor and confidence-logit gradients for
// one query given d(loss)/d(feature).
template <typename T>
void query_interpolate_backward(PointField<T>& field, const InterpResult<T>& fwd,
                                const VecX<T>& grad_feature);

// (1/P) * sum_p [log(g_p) + log(1 - g_p)]; minimizing pushes confidences
// toward 0 or 1. Throws DomainError if any confidence leaves (0,1).
template <typename T>
T sparsity_loss(const VecX<T>& confidences);

// Adds d(loss)/d(logit) of the sparsity term, scaled by `scale`, onto grads.
template <typename T>
void sparsity_loss_backward_logits(const VecX<T>& logits, T scale, VecX<T>& grad_logits);

// Density head: five layers, hidden widths {256,256,256,256,1}, softplus
// output so the predicted density is non-negative.
inline std::vector<int> density_head_dims() { return {kDescriptorDim, 256, 256, 256, 256, 1}; }

template <typename T>
T predict_density(const Mlp<T>& head, const VecX<T>& feature) {
  if (!feature.allFinite()) throw InputError("predict_density: non-finite feature");
  const MatX<T> out = head.forward(feature.transpose());
  return softplus(out(0, 0));
}

struct MaintenanceConfig {
  double prune_threshold = 0.1;
  double grow_distance = 0.04;  // default 2x voxel size
  double grown_confidence = 0.3;
};

struct MaintenanceReport {
  int pruned = 0;
  int grown = 0;
  bool aborted = false;
  std::string warning;
  // Surviving old-point indices in new order (before grown points are
  // appended); lets the optimizer migrate per-point moments.
  std::vector<int> kept_indices;
};

// Removes low-confidence points and adds points at recorded high-opacity
// sample locations that are far from all existing points. Descriptors of
// grown points are interpolated from their neighbors. Rebuilds the index.
template <typename T>
MaintenanceReport prune_and_grow(PointField<T>& field, const std::vector<Vec3>& grow_candidates,
                                 const MaintenanceConfig& cfg);

extern template struct PointField<float>;
extern template struct PointField<double>;
extern template InterpResult<float> query_interpolate(const PointField<float>&, const Vec3&, int);
extern template InterpResult<double> query_interpolate(const PointField<double>&, const Vec3&,
                                                       int);
extern template void query_interpolate_backward(PointField<float>&, const InterpResult<float>&,
                                                const VecX<float>&);
extern template void query_interpolate_backward(PointField<double>&, const InterpResult<double>&,
                                                const VecX<double>&);
extern template float sparsity_loss(const VecX<float>&);
extern template double sparsity_loss(const VecX<double>&);
extern template void sparsity_loss_backward_logits(const VecX<float>&, float, VecX<float>&);
extern template void sparsity_loss_backward_logits(const VecX<double>&, double, VecX<double>&);
extern template MaintenanceReport prune_and_grow(PointField<float>&, const std::vector<Vec3>&,
                                                 const MaintenanceConfig&);
extern template MaintenanceReport prune_and_grow(PointField<double>&, const std::vector<Vec3>&,
                                                 const MaintenanceConfig&);

}  // namespace hr
