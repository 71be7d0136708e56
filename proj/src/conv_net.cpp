// Copyright Contributors to the HybridRender Project
// SPDX-License-Identifier: Apache-2.0

#include "conv_net.h"

namespace hr {

namespace {

constexpr std::array<int, 6> kOutChannels = {6, 6, 12, 12, 24, 24};
constexpr std::array<int, 6> kStrides = {1, 2, 1, 2, 1, 2};

template <typename T>
Image<T> conv_forward(const Image<T>& in, const ConvLayer<T>& layer) {
  const int oh = (in.height + layer.stride - 1) / layer.stride;
  const int ow = (in.width + layer.stride - 1) / layer.stride;
  Image<T> out(ow, oh, layer.out_ch);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      const int cy = y * layer.stride;
      const int cx = x * layer.stride;
      int sy[3], sx[3];
      for (int k = 0; k < 3; ++k) {
        sy[k] = reflect_index(cy + k - 1, in.height);
        sx[k] = reflect_index(cx + k - 1, in.width);
      }
      for (int co = 0; co < layer.out_ch; ++co) {
        T acc = layer.b[co];
        for (int ci = 0; ci < layer.in_ch; ++ci)
          for (int ky = 0; ky < 3; ++ky)
            for (int kx = 0; kx < 3; ++kx)
              acc += layer.wt(co, ci, ky, kx) * in.at(sx[kx], sy[ky], ci);
        out.at(x, y, co) = acc;
      }
    }
  }
  return out;
}

// Accumulates layer gradients and the gradient w.r.t. the layer input.
template <typename T>
void conv_backward(const Image<T>& in, ConvLayer<T>& layer, const Image<T>& grad_out,
                   Image<T>* grad_in) {
  const int oh = grad_out.height, ow = grad_out.width;
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      const int cy = y * layer.stride;
      const int cx = x * layer.stride;
      int sy[3], sx[3];
      for (int k = 0; k < 3; ++k) {
        sy[k] = reflect_index(cy + k - 1, in.height);
        sx[k] = reflect_index(cx + k - 1, in.width);
      }
      for (int co = 0; co < layer.out_ch; ++co) {
        const T g = grad_out.at(x, y, co);
        if (g == T(0)) continue;
        layer.gb[co] += g;
        for (int ci = 0; ci < layer.in_ch; ++ci)
          for (int ky = 0; ky < 3; ++ky)
            for (int kx = 0; kx < 3; ++kx) {
              layer.gwt(co, ci, ky, kx) += g * in.at(sx[kx], sy[ky], ci);
              if (grad_in) grad_in->at(sx[kx], sy[ky], ci) += g * layer.wt(co, ci, ky, kx);
            }
      }
    }
  }
}

template <typename T>
Image<T> activate(const Image<T>& raw) {
  Image<T> out = raw;
  for (T& v : out.data) v = leaky_relu(v, T(kLeakySlope));
  return out;
}

template <typename T>
void activate_backward_inplace(const Image<T>& raw, Image<T>& grad) {
  for (std::size_t i = 0; i < grad.data.size(); ++i)
    if (raw.data[i] <= T(0)) grad.data[i] *= T(kLeakySlope);
}

}  // namespace

template <typename T>
FeatureExtractor<T> FeatureExtractor<T>::random_init(Rng& rng) {
  FeatureExtractor fe;
  int in_ch = 3;
  for (int i = 0; i < 6; ++i) {
    ConvLayer<T>& l = fe.layers_[i];
    l.in_ch = in_ch;
    l.out_ch = kOutChannels[i];
    l.stride = kStrides[i];
    l.w.resize(std::size_t(l.out_ch) * l.in_ch * 9);
    const double std_dev = std::sqrt(2.0 / (9.0 * l.in_ch));
    for (T& v : l.w) v = T(rng.normal() * std_dev);
    l.b = VecX<T>::Zero(l.out_ch);
    l.gw.assign(l.w.size(), T(0));
    l.gb = VecX<T>::Zero(l.out_ch);
    in_ch = l.out_ch;
  }
  return fe;
}

template <typename T>
FeatureExtractor<T> FeatureExtractor<T>::zero_init() {
  Rng rng(0);
  FeatureExtractor fe = random_init(rng);
  for (auto& l : fe.layers_) {
    std::fill(l.w.begin(), l.w.end(), T(0));
    l.b.setZero();
  }
  return fe;
}

template <typename T>
typename FeatureExtractor<T>::Maps FeatureExtractor<T>::forward(const Image<T>& rgb,
                                                                Cache* cache) const {
  if (rgb.channels != 3) throw ShapeError("feature extractor expects a 3-channel image");
  if (rgb.width % 8 != 0 || rgb.height % 8 != 0)
    throw ShapeError("feature extractor needs dimensions divisible by 8");

  Maps maps;
  Image<T> cur = rgb;
  if (cache) cache->input = rgb;
  for (int i = 0; i < 6; ++i) {
    Image<T> raw = conv_forward(cur, layers_[i]);
    if (cache) cache->raw[i] = raw;
    if (i == 1) maps[0] = raw;
    if (i == 3) maps[1] = raw;
    if (i == 5) maps[2] = raw;
    if (i < 5) cur = activate(raw);
  }
  return maps;
}

template <typename T>
void FeatureExtractor<T>::backward(const Cache& cache, const Maps& grad_maps) {
  // gZ[i] = gradient w.r.t. the raw output of layer i.
  Image<T> g = grad_maps[2];  // layer 6 output is exported without activation
  for (int i = 5; i >= 0; --i) {
    const Image<T>& input = i == 0 ? cache.input : activate(cache.raw[i - 1]);
    Image<T> grad_in(input.width, input.height, input.channels);
    conv_backward(input, layers_[i], g, i > 0 ? &grad_in : nullptr);
    if (i == 0) break;
    activate_backward_inplace(cache.raw[i - 1], grad_in);
    if (i - 1 == 3) {
      for (std::size_t j = 0; j < grad_in.data.size(); ++j)
        grad_in.data[j] += grad_maps[1].data[j];
    }
    if (i - 1 == 1) {
      for (std::size_t j = 0; j < grad_in.data.size(); ++j)
        grad_in.data[j] += grad_maps[0].data[j];
    }
    g = std::move(grad_in);
  }
}

template <typename T>
void FeatureExtractor<T>::zero_grad() {
  for (auto& l : layers_) {
    std::fill(l.gw.begin(), l.gw.end(), T(0));
    l.gb.setZero();
  }
}

template <typename T>
void FeatureExtractor<T>::collect_params(std::vector<ParamView<T>>& out) {
  for (int i = 0; i < 6; ++i) {
    out.push_back({"extractor.w" + std::to_string(i), layers_[i].w.data(),
                   layers_[i].gw.data(), layers_[i].w.size()});
    out.push_back({"extractor.b" + std::to_string(i), layers_[i].b.data(),
                   layers_[i].gb.data(), std::size_t(layers_[i].b.size())});
  }
}

template class FeatureExtractor<float>;
template class FeatureExtractor<double>;

}  // namespace hr
