// Copyright Contributors to the HybridRender Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>

#include "image.h"
#include "mlp.h"

namespace hr {

// One 3x3 convolution, reflect-101 padding, optional stride 2.
template <typename T>
struct ConvLayer {
  int in_ch = 0, out_ch = 0, stride = 1;
  std::vector<T> w;  // [out][in][ky][kx]
  VecX<T> b;
  std::vector<T> gw;
  VecX<T> gb;

  T& wt(int co, int ci, int ky, int kx) { return w[((co * in_ch + ci) * 3 + ky) * 3 + kx]; }
  const T& wt(int co, int ci, int ky, int kx) const {
    return w[((co * in_ch + ci) * 3 + ky) * 3 + kx];
  }
  T& gwt(int co, int ci, int ky, int kx) { return gw[((co * in_ch + ci) * 3 + ky) * 3 + kx]; }
};

// The multiscale image feature extractor: six 3x3 convolutions with channel
// schedule {6,6,12,12,24,24}, stride 2 at layers 2/4/6, leaky-ReLU between
// layers. The exported maps are the raw outputs of layers 2, 4 and 6 at
// scales 1/2, 1/4 and 1/8.
constexpr int kFeatureScales = 3;
constexpr std::array<int, kFeatureScales> kScaleFactors = {2, 4, 8};
constexpr std::array<int, kFeatureScales> kScaleChannels = {6, 12, 24};
constexpr int kSampledFeatureDim = 6 + 12 + 24;  // 42

template <typename T>
class FeatureExtractor {
 public:
  using Maps = std::array<Image<T>, kFeatureScales>;

  struct Cache {
    Image<T> input;
    std::array<Image<T>, 6> raw;  // conv outputs, pre-activation
  };

  static FeatureExtractor random_init(Rng& rng);
  static FeatureExtractor zero_init();

  // Input must be H x W x 3 with H and W divisible by 8.
  Maps forward(const Image<T>& rgb, Cache* cache = nullptr) const;

  // grad_maps align with forward's exported maps. Accumulates weight grads.
  void backward(const Cache& cache, const Maps& grad_maps);

  void zero_grad();
  void collect_params(std::vector<ParamView<T>>& out);

  ConvLayer<T>& layer(int i) { return layers_[i]; }
  const ConvLayer<T>& layer(int i) const { return layers_[i]; }

 private:
  std::array<ConvLayer<T>, 6> layers_;
};

extern template class FeatureExtractor<float>;
extern template class FeatureExtractor<double>;

}  // namespace hr
