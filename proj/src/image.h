// Copyright Contributors to the HybridRender Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <vector>

#include "common.h"

namespace hr {

// Row-major, channel-interleaved image buffer.
template <typename T>
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<T> data;

  Image() = default;
  Image(int w, int h, int c, T fill = T(0)) : width(w), height(h), channels(c) {
    data.assign(std::size_t(w) * h * c, fill);
  }

  bool empty() const { return data.empty(); }
  std::size_t size() const { return data.size(); }

  T& at(int x, int y, int c = 0) { return data[(std::size_t(y) * width + x) * channels + c]; }
  const T& at(int x, int y, int c = 0) const {
    return data[(std::size_t(y) * width + x) * channels + c];
  }

  template <typename U>
  Image<U> cast() const {
    Image<U> out(width, height, channels);
    for (std::size_t i = 0; i < data.size(); ++i) out.data[i] = U(data[i]);
    return out;
  }
};

inline int clamp_index(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

// Reflect-101 index mapping (mirror about the edge sample, no duplication).
inline int reflect_index(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i = ((i % period) + period) % period;
  return i < n ? i : period - i;
}

// Bilinear sample with clamped borders. Coordinates are in pixel-center
// units: the value of pixel (x, y) lives at continuous position (x, y).
template <typename T>
inline void bilinear_sample(const Image<T>& img, T sx, T sy, T* out) {
  const int x0 = clamp_index(int(std::floor(double(sx))), img.width);
  const int y0 = clamp_index(int(std::floor(double(sy))), img.height);
  const int x1 = clamp_index(x0 + 1, img.width);
  const int y1 = clamp_index(y0 + 1, img.height);
  T fx = sx - T(std::floor(double(sx)));
  T fy = sy - T(std::floor(double(sy)));
  fx = clamp01(fx);
  fy = clamp01(fy);
  for (int c = 0; c < img.channels; ++c) {
    const T top = img.at(x0, y0, c) * (T(1) - fx) + img.at(x1, y0, c) * fx;
    const T bot = img.at(x0, y1, c) * (T(1) - fx) + img.at(x1, y1, c) * fx;
    out[c] = top * (T(1) - fy) + bot * fy;
  }
}

// Corner indices and weights of a bilinear lookup, for scatter in backward
// passes. Weights sum to 1.
struct BilinearTaps {
  int x0, y0, x1, y1;
  double w00, w10, w01, w11;
};

template <typename T>
inline BilinearTaps bilinear_taps(const Image<T>& img, double sx, double sy) {
  BilinearTaps t;
  const int fx0 = int(std::floor(sx));
  const int fy0 = int(std::floor(sy));
  t.x0 = clamp_index(fx0, img.width);
  t.y0 = clamp_index(fy0, img.height);
  t.x1 = clamp_index(fx0 + 1, img.width);
  t.y1 = clamp_index(fy0 + 1, img.height);
  double fx = std::clamp(sx - fx0, 0.0, 1.0);
  double fy = std::clamp(sy - fy0, 0.0, 1.0);
  t.w00 = (1 - fx) * (1 - fy);
  t.w10 = fx * (1 - fy);
  t.w01 = (1 - fx) * fy;
  t.w11 = fx * fy;
  return t;
}

// ITU-R BT.709 luma weights.
template <typename T>
inline T luma709(T r, T g, T b) {
  return T(0.2126) * r + T(0.7152) * g + T(0.0722) * b;
}

template <typename T>
inline Image<T> to_grayscale(const Image<T>& rgb) {
  if (rgb.channels == 1) return rgb;
  Image<T> out(rgb.width, rgb.height, 1);
  for (int y = 0; y < rgb.height; ++y)
    for (int x = 0; x < rgb.width; ++x)
      out.at(x, y) = luma709(rgb.at(x, y, 0), rgb.at(x, y, 1), rgb.at(x, y, 2));
  return out;
}

template <typename T>
inline double image_mean(const Image<T>& img) {
  double s = 0;
  for (const T& v : img.data) s += double(v);
  return img.data.empty() ? 0.0 : s / double(img.data.size());
}

}  // namespace hr
