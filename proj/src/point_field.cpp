// Copyright Contributors to the HybridRender Project
// SPDX-License-Identifier: Apache-2.0

#include "point_field.h"

#include <algorithm>
#include <cmath>

namespace hr {

namespace {

std::uint64_t cell_key(long x, long y, long z) {
  std::uint64_t h = splitmix64(std::uint64_t(x) * 0x9e3779b97f4a7c15ull);
  h = splitmix64(h ^ std::uint64_t(y) * 0xc2b2ae3d27d4eb4full);
  return splitmix64(h ^ std::uint64_t(z) * 0x165667b19e3779f9ull);
}

}  // namespace

std::array<long, 3> GridIndex::cell_of(const Vec3& p) const {
  return {long(std::floor((p.x() - origin_.x()) / cell_)),
          long(std::floor((p.y() - origin_.y()) / cell_)),
          long(std::floor((p.z() - origin_.z()) / cell_))};
}

// Tie order: (distance, x, y, z) so results are independent of point order.
bool GridIndex::less_than(int a, int b, double da, double db) const {
  if (da != db) return da < db;
  const Vec3& pa = (*points_)[a];
  const Vec3& pb = (*points_)[b];
  if (pa.x() != pb.x()) return pa.x() < pb.x();
  if (pa.y() != pb.y()) return pa.y() < pb.y();
  return pa.z() < pb.z();
}

void GridIndex::build(const std::vector<Vec3>& positions) {
  points_ = &positions;
  cells_.clear();
  exhaustive_ = int(positions.size()) < kExhaustiveBelow;
  if (positions.empty()) return;

  origin_ = positions[0];
  for (const Vec3& p : positions) origin_ = origin_.cwiseMin(p);

  if (exhaustive_) return;

  // Median nearest-neighbor spacing over a deterministic subsample, found
  // with a coarse bootstrap grid sized by point density.
  Vec3 hi = positions[0];
  for (const Vec3& p : positions) hi = hi.cwiseMax(p);
  const double diag = (hi - origin_).norm();
  const double boot_cell = std::max(diag / std::cbrt(double(positions.size())), 1e-9);

  std::unordered_map<std::uint64_t, std::vector<int>> boot;
  auto boot_cell_of = [&](const Vec3& p) {
    return std::array<long, 3>{long(std::floor((p.x() - origin_.x()) / boot_cell)),
                               long(std::floor((p.y() - origin_.y()) / boot_cell)),
                               long(std::floor((p.z() - origin_.z()) / boot_cell))};
  };
  for (int i = 0; i < int(positions.size()); ++i) {
    const auto c = boot_cell_of(positions[i]);
    boot[cell_key(c[0], c[1], c[2])].push_back(i);
  }

  const int sample_count = std::min<int>(4096, int(positions.size()));
  const int stride = std::max<int>(1, int(positions.size()) / sample_count);
  std::vector<double> nn_dists;
  for (int i = 0; i < int(positions.size()); i += stride) {
    const Vec3& p = positions[i];
    const auto c = boot_cell_of(p);
    double best = std::numeric_limits<double>::max();
    for (int ring = 0; ring < 4 && best == std::numeric_limits<double>::max(); ++ring) {
      for (long dx = -ring; dx <= ring; ++dx)
        for (long dy = -ring; dy <= ring; ++dy)
          for (long dz = -ring; dz <= ring; ++dz) {
            if (std::max({std::labs(dx), std::labs(dy), std::labs(dz)}) != ring) continue;
            auto it = boot.find(cell_key(c[0] + dx, c[1] + dy, c[2] + dz));
            if (it == boot.end()) continue;
            for (int j : it->second) {
              if (j == i) continue;
              best = std::min(best, (positions[j] - p).squaredNorm());
            }
          }
    }
    if (best != std::numeric_limits<double>::max()) nn_dists.push_back(std::sqrt(best));
  }
  if (nn_dists.empty()) nn_dists.push_back(boot_cell);
  std::nth_element(nn_dists.begin(), nn_dists.begin() + nn_dists.size() / 2, nn_dists.end());
  cell_ = std::max(2.0 * nn_dists[nn_dists.size() / 2], 1e-9);

  for (int i = 0; i < int(positions.size()); ++i) {
    const auto c = cell_of(positions[i]);
    cells_[cell_key(c[0], c[1], c[2])].push_back(i);
  }
}

void GridIndex::scan_cell(std::uint64_t key, const Vec3& q, int k,
                          std::vector<Neighbor>& best) const {
  auto it = cells_.find(key);
  if (it == cells_.end()) return;
  for (int j : it->second) {
    const double d = ((*points_)[j] - q).squaredNorm();
    if (int(best.size()) == k && !less_than(j, best.back().index, d, best.back().dist_sq))
      continue;
    // Insertion sort into the k-best list.
    Neighbor nb{j, d};
    auto pos = best.begin();
    while (pos != best.end() && less_than(pos->index, j, pos->dist_sq, d)) ++pos;
    best.insert(pos, nb);
    if (int(best.size()) > k) best.pop_back();
  }
}

std::vector<GridIndex::Neighbor> GridIndex::knn(const Vec3& q, int k) const {
  std::vector<Neighbor> best;
  if (!points_ || points_->empty() || k <= 0) return best;
  k = std::min<int>(k, int(points_->size()));
  best.reserve(k + 1);

  if (exhaustive_) {
    for (int j = 0; j < int(points_->size()); ++j) {
      const double d = ((*points_)[j] - q).squaredNorm();
      if (int(best.size()) == k && !less_than(j, best.back().index, d, best.back().dist_sq))
        continue;
      Neighbor nb{j, d};
      auto pos = best.begin();
      while (pos != best.end() && less_than(pos->index, j, pos->dist_sq, d)) ++pos;
      best.insert(pos, nb);
      if (int(best.size()) > k) best.pop_back();
    }
    return best;
  }

  const auto c = cell_of(q);
  for (int ring = 0;; ++ring) {
    // A cell at Chebyshev ring r is at least (r-1) * cell_ away from q.
    if (int(best.size()) == k && ring > 1 &&
        best.back().dist_sq <= double(ring - 1) * cell_ * double(ring - 1) * cell_)
      break;
    for (long dx = -ring; dx <= ring; ++dx)
      for (long dy = -ring; dy <= ring; ++dy)
        for (long dz = -ring; dz <= ring; ++dz) {
          if (std::max({std::labs(dx), std::labs(dy), std::labs(dz)}) != ring) continue;
          scan_cell(cell_key(c[0] + dx, c[1] + dy, c[2] + dz), q, k, best);
        }
    if (ring > 4096) break;  // degenerate geometry guard
  }
  return best;
}

bool GridIndex::any_within(const Vec3& q, double radius) const {
  if (!points_ || points_->empty()) return false;
  const double r2 = radius * radius;
  if (exhaustive_) {
    for (const Vec3& p : *points_)
      if ((p - q).squaredNorm() <= r2) return true;
    return false;
  }
  const auto c = cell_of(q);
  const long span = long(std::ceil(radius / cell_)) + 1;
  for (long dx = -span; dx <= span; ++dx)
    for (long dy = -span; dy <= span; ++dy)
      for (long dz = -span; dz <= span; ++dz) {
        auto it = cells_.find(cell_key(c[0] + dx, c[1] + dy, c[2] + dz));
        if (it == cells_.end()) continue;
        for (int j : it->second)
          if (((*points_)[j] - q).squaredNorm() <= r2) return true;
      }
  return false;
}

double GridIndex::nearest_dist(const Vec3& q) const {
  auto nb = knn(q, 1);
  return nb.empty() ? std::numeric_limits<double>::max() : std::sqrt(nb[0].dist_sq);
}

template <typename T>
InterpResult<T> query_interpolate(const PointField<T>& field, const Vec3& q, int k) {
  if (field.empty()) throw DomainError("query_interpolate: empty point field");
  if (!q.allFinite()) throw InputError("query_interpolate: non-finite query point");

  InterpResult<T> out;
  const auto neighbors = field.index.knn(q, k);
  const int n = int(neighbors.size());
  out.indices.resize(n);
  out.distances.resize(n);
  out.weights.resize(n);

  double wsum = 0;
  std::vector<double> unnorm(n);
  for (int i = 0; i < n; ++i) {
    out.indices[i] = neighbors[i].index;
    out.distances[i] = std::sqrt(neighbors[i].dist_sq);
    const double gamma = double(field.confidence(neighbors[i].index));
    unnorm[i] = gamma / (out.distances[i] + kInterpEps);
    wsum += unnorm[i];
  }
  out.feature = VecX<T>::Zero(field.descriptors.cols());
  for (int i = 0; i < n; ++i) {
    out.weights[i] = T(unnorm[i] / wsum);
    out.feature += out.weights[i] * field.descriptors.row(out.indices[i]).transpose();
  }
  return out;
}

template <typename T>
void query_interpolate_backward(PointField<T>& field, const InterpResult<T>& fwd,
                                const VecX<T>& grad_feature) {
  const int n = int(fwd.indices.size());
  if (n == 0) return;

  // grad wrt the normalized weights.
  std::vector<T> grad_w(n);
  T dot_gw_w = T(0);
  for (int i = 0; i < n; ++i) {
    grad_w[i] = field.descriptors.row(fwd.indices[i]) * grad_feature;
    dot_gw_w += grad_w[i] * fwd.weights[i];
  }

  // Normalization backward: w_i = u_i / sum(u); recover sum(u) from weights.
  // sum(u) = u_i / w_i for any i; recompute u from confidences instead.
  T usum = T(0);
  std::vector<T> u(n);
  for (int i = 0; i < n; ++i) {
    const T gamma = field.confidence(fwd.indices[i]);
    u[i] = gamma / T(fwd.distances[i] + kInterpEps);
    usum += u[i];
  }
  for (int i = 0; i < n; ++i) {
    const int p = fwd.indices[i];
    field.grad_descriptors.row(p) += fwd.weights[i] * grad_feature.transpose();
    const T grad_u = (grad_w[i] - dot_gw_w) / usum;
    const T grad_gamma = grad_u / T(fwd.distances[i] + kInterpEps);
    const T gamma = field.confidence(p);
    field.grad_conf_logits[p] += grad_gamma * gamma * (T(1) - gamma);
  }
}

template <typename T>
T sparsity_loss(const VecX<T>& confidences) {
  if (confidences.size() == 0) return T(0);
  T acc = T(0);
  for (Eigen::Index i = 0; i < confidences.size(); ++i) {
    const T g = confidences[i];
    if (!(g > T(0) && g < T(1)))
      throw DomainError("sparsity_loss: confidence outside (0,1)");
    acc += std::log(g) + std::log(T(1) - g);
  }
  return acc / T(confidences.size());
}

template <typename T>
void sparsity_loss_backward_logits(const VecX<T>& logits, T scale, VecX<T>& grad_logits) {
  // d/dlogit [log(g) + log(1-g)] = 1 - 2g with g = sigmoid(logit).
  const T inv_p = T(1) / T(logits.size());
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    const T g = sigmoid(logits[i]);
    grad_logits[i] += scale * inv_p * (T(1) - T(2) * g);
  }
}

template <typename T>
MaintenanceReport prune_and_grow(PointField<T>& field, const std::vector<Vec3>& grow_candidates,
                                 const MaintenanceConfig& cfg) {
  MaintenanceReport report;

  std::vector<int> keep;
  keep.reserve(field.positions.size());
  for (int p = 0; p < field.size(); ++p)
    if (double(field.confidence(p)) >= cfg.prune_threshold) keep.push_back(p);

  if (keep.empty()) {
    report.aborted = true;
    report.warning = "pruning would remove every point; field left unchanged";
    return report;
  }

  report.pruned = field.size() - int(keep.size());
  report.kept_indices = keep;
  if (report.pruned > 0) {
    std::vector<Vec3> positions(keep.size());
    MatX<T> descriptors(keep.size(), field.descriptors.cols());
    VecX<T> logits(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) {
      positions[i] = field.positions[keep[i]];
      descriptors.row(i) = field.descriptors.row(keep[i]);
      logits[i] = field.conf_logits[keep[i]];
    }
    field.positions = std::move(positions);
    field.descriptors = std::move(descriptors);
    field.conf_logits = std::move(logits);
    field.rebuild_index();
  }

  const T grown_logit = T(std::log(cfg.grown_confidence / (1.0 - cfg.grown_confidence)));
  std::vector<Vec3> added_positions;
  std::vector<VecX<T>> added_descriptors;
  for (const Vec3& cand : grow_candidates) {
    double nearest = field.index.nearest_dist(cand);
    for (const Vec3& a : added_positions)
      nearest = std::min(nearest, (a - cand).norm());
    if (nearest <= cfg.grow_distance) continue;
    added_positions.push_back(cand);
    added_descriptors.push_back(query_interpolate(field, cand).feature);
  }

  if (!added_positions.empty()) {
    const int old_p = field.size();
    const int new_p = old_p + int(added_positions.size());
    field.positions.insert(field.positions.end(), added_positions.begin(),
                           added_positions.end());
    field.descriptors.conservativeResize(new_p, Eigen::NoChange);
    field.conf_logits.conservativeResize(new_p);
    for (std::size_t i = 0; i < added_positions.size(); ++i) {
      field.descriptors.row(old_p + int(i)) = added_descriptors[i].transpose();
      field.conf_logits[old_p + int(i)] = grown_logit;
    }
    report.grown = int(added_positions.size());
  }

  field.rebuild_index();
  field.alloc_grads();
  return report;
}

template struct PointField<float>;
template struct PointField<double>;
template InterpResult<float> query_interpolate(const PointField<float>&, const Vec3&, int);
template InterpResult<double> query_interpolate(const PointField<double>&, const Vec3&, int);
template void query_interpolate_backward(PointField<float>&, const InterpResult<float>&,
                                         const VecX<float>&);
template void query_interpolate_backward(PointField<double>&, const InterpResult<double>&,
                                         const VecX<double>&);
template float sparsity_loss(const VecX<float>&);
template double sparsity_loss(const VecX<double>&);
template void sparsity_loss_backward_logits(const VecX<float>&, float, VecX<float>&);
template void sparsity_loss_backward_logits(const VecX<double>&, double, VecX<double>&);
template MaintenanceReport prune_and_grow(PointField<float>&, const std::vector<Vec3>&,
                                          const MaintenanceConfig&);
template MaintenanceReport prune_and_grow(PointField<double>&, const std::vector<Vec3>&,
                                          const MaintenanceConfig&);

}  // namespace hr
