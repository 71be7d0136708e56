// Copyright Contributors to the HybridRender Project
// SPDX-License-Identifier: Apache-2.0

#include "image_io.h"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <cstdio>
#include <fstream>

namespace hr {

Image<float> load_rgb_png(const std::string& path) {
  cv::Mat m = cv::imread(path, cv::IMREAD_COLOR);
  if (m.empty()) throw LoadError("cannot read RGB image: " + path);
  Image<float> out(m.cols, m.rows, 3);
  for (int y = 0; y < m.rows; ++y) {
    const cv::Vec3b* row = m.ptr<cv::Vec3b>(y);
    for (int x = 0; x < m.cols; ++x) {
      // OpenCV loads BGR.
      out.at(x, y, 0) = row[x][2] / 255.0f;
      out.at(x, y, 1) = row[x][1] / 255.0f;
      out.at(x, y, 2) = row[x][0] / 255.0f;
    }
  }
  return out;
}

void save_rgb_png(const std::string& path, const Image<float>& rgb) {
  if (rgb.channels != 3) throw ShapeError("save_rgb_png expects 3 channels");
  cv::Mat m(rgb.height, rgb.width, CV_8UC3);
  for (int y = 0; y < rgb.height; ++y) {
    cv::Vec3b* row = m.ptr<cv::Vec3b>(y);
    for (int x = 0; x < rgb.width; ++x) {
      row[x][2] = uchar(std::lround(clamp01(rgb.at(x, y, 0)) * 255.0f));
      row[x][1] = uchar(std::lround(clamp01(rgb.at(x, y, 1)) * 255.0f));
      row[x][0] = uchar(std::lround(clamp01(rgb.at(x, y, 2)) * 255.0f));
    }
  }
  if (!cv::imwrite(path, m)) throw LoadError("cannot write image: " + path);
}

Image<float> load_depth_png(const std::string& path) {
  cv::Mat m = cv::imread(path, cv::IMREAD_UNCHANGED);
  if (m.empty()) throw LoadError("cannot read depth image: " + path);
  if (m.type() != CV_16UC1) throw FormatError("depth image is not 16-bit grayscale: " + path);
  Image<float> out(m.cols, m.rows, 1);
  for (int y = 0; y < m.rows; ++y) {
    const std::uint16_t* row = m.ptr<std::uint16_t>(y);
    for (int x = 0; x < m.cols; ++x) out.at(x, y) = row[x] / 1000.0f;
  }
  return out;
}

void save_depth_png(const std::string& path, const Image<float>& depth) {
  if (depth.channels != 1) throw ShapeError("save_depth_png expects 1 channel");
  cv::Mat m(depth.height, depth.width, CV_16UC1);
  for (int y = 0; y < depth.height; ++y) {
    std::uint16_t* row = m.ptr<std::uint16_t>(y);
    for (int x = 0; x < depth.width; ++x) {
      const double mm = std::clamp(double(depth.at(x, y)) * 1000.0, 0.0, 65535.0);
      row[x] = std::uint16_t(std::lround(mm));
    }
  }
  if (!cv::imwrite(path, m)) throw LoadError("cannot write image: " + path);
}

void save_raw_float(const std::string& path, const Image<float>& img) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw LoadError("cannot open for writing: " + path);
  f.write(reinterpret_cast<const char*>(img.data.data()),
          std::streamsize(img.data.size() * sizeof(float)));
}

}  // namespace hr
