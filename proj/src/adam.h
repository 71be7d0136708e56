// Copyright Contributors to the HybridRender Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "mlp.h"

namespace hr {

// Adam with the standard published defaults. Moments are kept per registered
// tensor, in registration order, so checkpoints can restore them bit-exactly.
template <typename T>
class Adam {
 public:
  Adam() = default;
  explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void register_params(const std::vector<ParamView<T>>& params) {
    m_.clear();
    v_.clear();
    for (const auto& p : params) {
      m_.push_back(std::vector<T>(p.size, T(0)));
      v_.push_back(std::vector<T>(p.size, T(0)));
    }
    step_ = 0;
  }

  void step(const std::vector<ParamView<T>>& params) {
    ++step_;
    const double bc1 = 1.0 - std::pow(beta1_, double(step_));
    const double bc2 = 1.0 - std::pow(beta2_, double(step_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      const ParamView<T>& p = params[i];
      T* m = m_[i].data();
      T* v = v_[i].data();
      for (std::size_t j = 0; j < p.size; ++j) {
        const T g = p.grads[j];
        m[j] = T(beta1_) * m[j] + T(1.0 - beta1_) * g;
        v[j] = T(beta2_) * v[j] + T(1.0 - beta2_) * g * g;
        const T mhat = m[j] / T(bc1);
        const T vhat = v[j] / T(bc2);
        p.values[j] -= T(lr_) * mhat / (std::sqrt(vhat) + T(eps_));
      }
    }
  }

  double learning_rate() const { return lr_; }
  void set_learning_rate(double lr) { lr_ = lr; }
  std::int64_t step_count() const { return step_; }

  // Serialization hooks: moments flattened in registration order.
  std::vector<std::vector<T>>& moments_m() { return m_; }
  std::vector<std::vector<T>>& moments_v() { return v_; }
  void set_step_count(std::int64_t t) { step_ = t; }

 private:
  double lr_ = 5e-4;
  double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  std::int64_t step_ = 0;
  std::vector<std::vector<T>> m_, v_;
};

}  // namespace hr
