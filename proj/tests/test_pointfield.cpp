// Copyright Contributors to the HybridRender Project
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>

#include "point_field.h"

using namespace hr;

namespace {

template <typename T>
PointField<T> random_field(int count, std::uint64_t seed, double extent = 1.0) {
  PointField<T> f;
  Rng rng(seed);
  f.positions.resize(count);
  for (int i = 0; i < count; ++i)
    f.positions[i] = Vec3(rng.uniform(-extent, extent), rng.uniform(-extent, extent),
                          rng.uniform(-extent, extent));
  f.descriptors = MatX<T>(count, kDescriptorDim);
  for (int i = 0; i < count; ++i)
    for (int d = 0; d < kDescriptorDim; ++d) f.descriptors(i, d) = T(rng.normal());
  f.conf_logits = VecX<T>(count);
  for (int i = 0; i < count; ++i) f.conf_logits[i] = T(rng.uniform(-1.5, 1.5));
  f.rebuild_index();
  f.alloc_grads();
  return f;
}

// Brute-force oracle with the same (distance, position) tie order.
std::vector<int> brute_knn(const std::vector<Vec3>& pts, const Vec3& q, int k) {
  std::vector<int> idx(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) idx[i] = int(i);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    const double da = (pts[a] - q).squaredNorm();
    const double db = (pts[b] - q).squaredNorm();
    if (da != db) return da < db;
    if (pts[a].x() != pts[b].x()) return pts[a].x() < pts[b].x();
    if (pts[a].y() != pts[b].y()) return pts[a].y() < pts[b].y();
    return pts[a].z() < pts[b].z();
  });
  idx.resize(std::min<std::size_t>(k, idx.size()));
  return idx;
}

}  // namespace

TEST_CASE("interpolation: coincident point dominates") {
  PointField<double> f = random_field<double>(20, 3);
  const Vec3 q = f.positions[7];
  const auto res = query_interpolate(f, q);
  double w_coincident = 0;
  for (std::size_t i = 0; i < res.indices.size(); ++i)
    if (res.indices[i] == 7) w_coincident = double(res.weights[i]);
  CHECK(w_coincident == doctest::Approx(1.0).epsilon(1e-6));
  for (int d = 0; d < kDescriptorDim; ++d)
    CHECK(res.feature[d] == doctest::Approx(f.descriptors(7, d)).epsilon(1e-5));
}

TEST_CASE("interpolation: two equidistant equal-confidence points average") {
  PointField<double> f;
  f.positions = {Vec3(-1, 0, 0), Vec3(1, 0, 0)};
  f.descriptors = MatX<double>(2, kDescriptorDim);
  Rng rng(5);
  for (int i = 0; i < 2; ++i)
    for (int d = 0; d < kDescriptorDim; ++d) f.descriptors(i, d) = rng.normal();
  f.conf_logits = VecX<double>::Constant(2, 0.25);
  f.rebuild_index();
  f.alloc_grads();
  const auto res = query_interpolate(f, Vec3(0, 0, 0));
  REQUIRE(res.indices.size() == 2);
  CHECK(res.weights[0] == doctest::Approx(0.5));
  CHECK(res.weights[1] == doctest::Approx(0.5));
  for (int d = 0; d < kDescriptorDim; ++d)
    CHECK(res.feature[d] ==
          doctest::Approx(0.5 * (f.descriptors(0, d) + f.descriptors(1, d))));
}

TEST_CASE("interpolation: non-finite query is an input error") {
  PointField<double> f = random_field<double>(10, 1);
  CHECK_THROWS_AS(query_interpolate(f, Vec3(std::nan(""), 0, 0)), InputError);
}

TEST_CASE("interpolation: querying an empty field is a domain error") {
  PointField<double> f;
  f.rebuild_index();
  CHECK_THROWS_AS(query_interpolate(f, Vec3(0, 0, 0)), DomainError);
}

TEST_CASE("interpolation: fewer points than k uses all of them") {
  PointField<double> f = random_field<double>(5, 11);
  const auto res = query_interpolate(f, Vec3(0.1, 0.2, 0.3), 8);
  CHECK(res.indices.size() == 5);
  double sum = 0;
  for (double w : res.weights) sum += w;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("knn matches brute force on a small exhaustive-path field") {
  PointField<double> f = random_field<double>(20, 17);
  Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec3 q(rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2));
    const auto res = query_interpolate(f, q);
    const auto oracle = brute_knn(f.positions, q, 8);
    CHECK(res.indices == oracle);
  }
}

TEST_CASE("knn matches brute force on grid-indexed fields up to 1e4 points") {
  for (int count : {600, 2500, 10000}) {
    PointField<float> f = random_field<float>(count, 31 + count);
    REQUIRE_FALSE(f.index.exhaustive());
    Rng rng(41);
    for (int trial = 0; trial < 50; ++trial) {
      const Vec3 q(rng.uniform(-1.3, 1.3), rng.uniform(-1.3, 1.3), rng.uniform(-1.3, 1.3));
      const auto res = query_interpolate(f, q);
      const auto oracle = brute_knn(f.positions, q, 8);
      CHECK(res.indices == oracle);
      // Weight invariants.
      float sum = 0;
      for (float w : res.weights) {
        CHECK(w >= 0.0f);
        sum += w;
      }
      CHECK(sum == doctest::Approx(1.0f).epsilon(1e-5));
    }
  }
}

TEST_CASE("interpolation feature is invariant to point order") {
  PointField<double> f = random_field<double>(700, 53);
  // Permute the field.
  std::vector<int> perm(f.positions.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = int(i);
  Rng rng(7);
  for (int i = int(perm.size()) - 1; i > 0; --i)
    std::swap(perm[i], perm[rng.uniform_int(0, i)]);
  PointField<double> g;
  g.positions.resize(f.positions.size());
  g.descriptors = MatX<double>(f.descriptors.rows(), f.descriptors.cols());
  g.conf_logits = VecX<double>(f.conf_logits.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    g.positions[i] = f.positions[perm[i]];
    g.descriptors.row(i) = f.descriptors.row(perm[i]);
    g.conf_logits[i] = f.conf_logits[perm[i]];
  }
  g.rebuild_index();
  g.alloc_grads();

  Rng qrng(67);
  Mlp<double> head = Mlp<double>::random_init(density_head_dims(), qrng);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec3 q(qrng.uniform(-1, 1), qrng.uniform(-1, 1), qrng.uniform(-1, 1));
    const auto ra = query_interpolate(f, q);
    const auto rb = query_interpolate(g, q);
    for (int d = 0; d < kDescriptorDim; ++d) CHECK(ra.feature[d] == rb.feature[d]);
    CHECK(predict_density(head, ra.feature) == predict_density(head, rb.feature));
  }
}

TEST_CASE("interpolation backward matches finite differences") {
  PointField<double> f = random_field<double>(30, 71);
  const Vec3 q(0.05, -0.1, 0.2);
  Rng rng(5);
  VecX<double> probe(kDescriptorDim);
  for (int d = 0; d < kDescriptorDim; ++d) probe[d] = rng.normal();

  auto loss = [&](PointField<double>& field) {
    const auto r = query_interpolate(field, q);
    return double(probe.transpose() * r.feature);
  };

  f.zero_grad();
  const auto fwd = query_interpolate(f, q);
  query_interpolate_backward(f, fwd, probe);

  const double eps = 1e-6;
  for (int i = 0; i < 10; ++i) {
    const int p = fwd.indices[i % fwd.indices.size()];
    const int d = int(rng.uniform_int(0, kDescriptorDim - 1));
    const double orig = f.descriptors(p, d);
    f.descriptors(p, d) = orig + eps;
    const double up = loss(f);
    f.descriptors(p, d) = orig - eps;
    const double dn = loss(f);
    f.descriptors(p, d) = orig;
    const double fd = (up - dn) / (2 * eps);
    CHECK(f.grad_descriptors(p, d) == doctest::Approx(fd).epsilon(1e-6));

    const double lorig = f.conf_logits[p];
    f.conf_logits[p] = lorig + eps;
    const double lup = loss(f);
    f.conf_logits[p] = lorig - eps;
    const double ldn = loss(f);
    f.conf_logits[p] = lorig;
    const double lfd = (lup - ldn) / (2 * eps);
    CHECK(f.grad_conf_logits[p] == doctest::Approx(lfd).epsilon(1e-5));
  }
}

TEST_CASE("density head: zero final layer yields softplus(bias) everywhere") {
  Rng rng(2);
  Mlp<double> head = Mlp<double>::random_init(density_head_dims(), rng);
  head.weight(4).setZero();
  head.bias(4)[0] = -0.7;
  VecX<double> r1 = VecX<double>::Random(kDescriptorDim);
  VecX<double> r2 = VecX<double>::Random(kDescriptorDim);
  const double expect = softplus(-0.7);
  CHECK(predict_density(head, r1) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(predict_density(head, r2) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("density head: identical features give identical densities") {
  Rng rng(3);
  Mlp<double> head = Mlp<double>::random_init(density_head_dims(), rng);
  VecX<double> r = VecX<double>::Random(kDescriptorDim);
  CHECK(predict_density(head, r) == predict_density(head, VecX<double>(r)));
  CHECK(predict_density(head, r) >= 0.0);
}

TEST_CASE("sparsity loss values and maximum at 0.5") {
  VecX<double> half = VecX<double>::Constant(10, 0.5);
  CHECK(sparsity_loss(half) == doctest::Approx(2.0 * std::log(0.5)).epsilon(1e-12));

  VecX<double> low = VecX<double>::Constant(4, 0.01);
  CHECK(sparsity_loss(low) ==
        doctest::Approx(std::log(0.01) + std::log(0.99)).epsilon(1e-12));

  // 0.5 maximizes the per-point term over (0,1).
  Rng rng(9);
  for (int i = 0; i < 50; ++i) {
    VecX<double> g = VecX<double>::Constant(1, rng.uniform(0.001, 0.999));
    CHECK(sparsity_loss(g) <= 2.0 * std::log(0.5) + 1e-12);
  }
}

TEST_CASE("sparsity loss rejects confidences outside (0,1)") {
  VecX<double> bad = VecX<double>::Constant(3, 1.0);
  CHECK_THROWS_AS(sparsity_loss(bad), DomainError);
}

TEST_CASE("sparsity gradient matches finite differences") {
  Rng rng(77);
  VecX<double> logits(16);
  for (int i = 0; i < 16; ++i) logits[i] = rng.uniform(-2, 2);

  auto loss = [&](const VecX<double>& l) {
    VecX<double> g(l.size());
    for (int i = 0; i < l.size(); ++i) g[i] = sigmoid(l[i]);
    return sparsity_loss(g);
  };

  VecX<double> grad = VecX<double>::Zero(16);
  sparsity_loss_backward_logits(logits, 1.0, grad);

  const double eps = 1e-7;
  for (int i = 0; i < 16; ++i) {
    VecX<double> up = logits, dn = logits;
    up[i] += eps;
    dn[i] -= eps;
    const double fd = (loss(up) - loss(dn)) / (2 * eps);
    const double rel = std::abs(grad[i] - fd) / std::max({std::abs(fd), std::abs(grad[i]), 1e-12});
    CHECK(rel < 1e-6);
  }
}

TEST_CASE("prune_and_grow: nothing below threshold leaves points intact") {
  PointField<float> f = random_field<float>(100, 13);
  f.conf_logits.setConstant(2.2f);  // confidence ~0.9
  MaintenanceConfig cfg;
  cfg.prune_threshold = 0.1;
  cfg.grow_distance = 0.05;
  const auto report = prune_and_grow(f, {}, cfg);
  CHECK(report.pruned == 0);
  CHECK(report.grown == 0);
  CHECK(f.size() == 100);
}

TEST_CASE("prune_and_grow: exactly the low-confidence point is removed") {
  PointField<float> f = random_field<float>(100, 29);
  f.conf_logits.setConstant(2.2f);
  f.conf_logits[42] = -4.6f;  // confidence ~0.01
  const Vec3 doomed = f.positions[42];
  MaintenanceConfig cfg;
  const auto report = prune_and_grow(f, {}, cfg);
  CHECK(report.pruned == 1);
  CHECK(f.size() == 99);
  for (const Vec3& p : f.positions) CHECK((p - doomed).norm() > 1e-12);
}

TEST_CASE("prune_and_grow: distant high-opacity sample grows exactly one point") {
  PointField<float> f = random_field<float>(100, 37, 0.5);
  f.conf_logits.setConstant(2.2f);
  MaintenanceConfig cfg;
  cfg.grow_distance = 0.05;
  const Vec3 far_sample(10 * cfg.grow_distance + 1.0, 1.0, 1.0);
  const auto report = prune_and_grow(f, {far_sample, far_sample}, cfg);
  CHECK(report.grown == 1);
  CHECK(f.size() == 101);
  CHECK((f.positions.back() - far_sample).norm() < 1e-12);
  CHECK(f.confidence(100) == doctest::Approx(0.3f).epsilon(1e-5));
}

TEST_CASE("prune_and_grow: pruning everything aborts without mutation") {
  PointField<float> f = random_field<float>(50, 43);
  f.conf_logits.setConstant(-4.6f);
  MaintenanceConfig cfg;
  const auto report = prune_and_grow(f, {}, cfg);
  CHECK(report.aborted);
  CHECK(f.size() == 50);
}

TEST_CASE("index stays consistent with exhaustive scan after maintenance") {
  PointField<float> f = random_field<float>(900, 59);
  f.conf_logits.setConstant(2.2f);
  for (int i = 0; i < 40; ++i) f.conf_logits[i * 7] = -4.6f;
  MaintenanceConfig cfg;
  cfg.grow_distance = 0.02;
  std::vector<Vec3> candidates = {Vec3(3, 3, 3), Vec3(-3, 3, 1)};
  prune_and_grow(f, candidates, cfg);
  Rng rng(61);
  for (int trial = 0; trial < 40; ++trial) {
    const Vec3 q(rng.uniform(-3.5, 3.5), rng.uniform(-3.5, 3.5), rng.uniform(-3.5, 3.5));
    const auto res = query_interpolate(f, q);
    CHECK(res.indices == brute_knn(f.positions, q, 8));
  }
}
