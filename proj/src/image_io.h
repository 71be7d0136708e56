// Copyright Contributors to the HybridRender Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "image.h"

namespace hr {

// 8-bit RGB PNG -> float image in [0,1].
Image<float> load_rgb_png(const std::string& path);

// Float [0,1] RGB -> 8-bit PNG. Values are clamped and rounded.
void save_rgb_png(const std::string& path, const Image<float>& rgb);

// 16-bit grayscale PNG in millimeters -> float depth map in meters (0 invalid).
Image<float> load_depth_png(const std::string& path);

// Depth in meters -> 16-bit millimeter PNG.
void save_depth_png(const std::string& path, const Image<float>& depth);

// Raw float32 dump (little-endian, row-major, channel-interleaved).
void save_raw_float(const std::string& path, const Image<float>& img);

}  // namespace hr
