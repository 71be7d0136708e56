// Copyright Contributors to the HybridRender Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "common.h"

namespace hr {

template <typename T>
using MatX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using VecX = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <typename T>
using RowX = Eigen::Matrix<T, 1, Eigen::Dynamic>;

// Mutable view over one parameter tensor and its gradient accumulator.
template <typename T>
struct ParamView {
  std::string name;
  T* values = nullptr;
  T* grads = nullptr;
  std::size_t size = 0;
};

constexpr double kLeakySlope = 0.01;

// Fully connected stack with leaky-ReLU between layers (none after the last).
// Batches are row-major: X is (batch x in), layer weights are (in x out).
template <typename T>
class Mlp {
 public:
  Mlp() = default;

  // dims = {in, h1, ..., out}. He-initialized weights, zero biases.
  static Mlp random_init(const std::vector<int>& dims, Rng& rng) {
    Mlp m;
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
      MatX<T> w(dims[i], dims[i + 1]);
      const double std_dev = std::sqrt(2.0 / double(dims[i]));
      for (Eigen::Index c = 0; c < w.cols(); ++c)
        for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = T(rng.normal() * std_dev);
      m.weights_.push_back(std::move(w));
      m.biases_.push_back(VecX<T>::Zero(dims[i + 1]));
    }
    m.alloc_grads();
    return m;
  }

  static Mlp zero_init(const std::vector<int>& dims) {
    Mlp m;
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
      m.weights_.push_back(MatX<T>::Zero(dims[i], dims[i + 1]));
      m.biases_.push_back(VecX<T>::Zero(dims[i + 1]));
    }
    m.alloc_grads();
    return m;
  }

  int num_layers() const { return int(weights_.size()); }
  int input_dim() const { return int(weights_.front().rows()); }
  int output_dim() const { return int(weights_.back().cols()); }

  MatX<T>& weight(int i) { return weights_[i]; }
  const MatX<T>& weight(int i) const { return weights_[i]; }
  VecX<T>& bias(int i) { return biases_[i]; }
  const VecX<T>& bias(int i) const { return biases_[i]; }

  // Raw outputs of every layer; acts[i] is post-activation input of layer i+1.
  struct Cache {
    MatX<T> input;
    std::vector<MatX<T>> raw;  // raw[i] = X_i * W_i + b_i
  };

  MatX<T> forward(const MatX<T>& x, Cache* cache = nullptr) const {
    MatX<T> cur = x;
    if (cache) {
      cache->input = x;
      cache->raw.clear();
    }
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      MatX<T> raw = (cur * weights_[i]).rowwise() + biases_[i].transpose();
      if (cache) cache->raw.push_back(raw);
      if (i + 1 < weights_.size())
        cur = raw.unaryExpr([](T v) { return leaky_relu(v, T(kLeakySlope)); });
      else
        cur = std::move(raw);
    }
    return cur;
  }

  // Accumulates parameter gradients; returns the gradient w.r.t. the input.
  MatX<T> backward(const Cache& cache, const MatX<T>& grad_out) {
    MatX<T> g = grad_out;  // gradient w.r.t. raw output of current layer
    MatX<T> activated;
    for (int i = num_layers() - 1; i >= 0; --i) {
      if (i == 0) {
        grad_weights_[i].noalias() += cache.input.transpose() * g;
      } else {
        activated = cache.raw[i - 1].unaryExpr([](T v) { return leaky_relu(v, T(kLeakySlope)); });
        grad_weights_[i].noalias() += activated.transpose() * g;
      }
      grad_biases_[i] += g.colwise().sum().transpose();
      MatX<T> gx = g * weights_[i].transpose();
      if (i > 0) {
        const MatX<T>& raw = cache.raw[i - 1];
        for (Eigen::Index c = 0; c < gx.cols(); ++c)
          for (Eigen::Index r = 0; r < gx.rows(); ++r)
            if (raw(r, c) <= T(0)) gx(r, c) *= T(kLeakySlope);
      }
      g = std::move(gx);
    }
    return g;
  }

  void zero_grad() {
    for (auto& g : grad_weights_) g.setZero();
    for (auto& g : grad_biases_) g.setZero();
  }

  void collect_params(const std::string& prefix, std::vector<ParamView<T>>& out) {
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      out.push_back({prefix + ".w" + std::to_string(i), weights_[i].data(),
                     grad_weights_[i].data(), std::size_t(weights_[i].size())});
      out.push_back({prefix + ".b" + std::to_string(i), biases_[i].data(),
                     grad_biases_[i].data(), std::size_t(biases_[i].size())});
    }
  }

 private:
  void alloc_grads() {
    grad_weights_.clear();
    grad_biases_.clear();
    for (const auto& w : weights_) grad_weights_.push_back(MatX<T>::Zero(w.rows(), w.cols()));
    for (const auto& b : biases_) grad_biases_.push_back(VecX<T>::Zero(b.size()));
  }

  std::vector<MatX<T>> weights_;
  std::vector<VecX<T>> biases_;
  std::vector<MatX<T>> grad_weights_;
  std::vector<VecX<T>> grad_biases_;
};

}  // namespace hr
