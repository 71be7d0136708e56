// Copyright Contributors to the HybridRender Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include "common.h"

namespace hr {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

struct CameraIntrinsics {
  double fx = 0, fy = 0;
  double cx = 0, cy = 0;
  int width = 0, height = 0;

  void validate() const {
    if (!(fx > 0) || !(fy > 0)) throw FormatError("intrinsics: focal lengths must be positive");
    if (!(cx >= 0 && cx < width) || !(cy >= 0 && cy < height))
      throw FormatError("intrinsics: principal point outside image");
  }
};

// World-from-camera rigid transform: X_world = rotation * X_cam + translation.
// The camera center in world coordinates is `translation`.
struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  void validate() const {
    const Mat3 rtr = rotation.transpose() * rotation;
    if ((rtr - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-6)
      throw FormatError("pose: rotation is not orthonormal");
    if (std::abs(rotation.determinant() - 1.0) > 1e-6)
      throw FormatError("pose: rotation determinant is not +1");
  }

  Vec3 center() const { return translation; }
  Vec3 optical_axis() const { return rotation.col(2); }

  Mat4 matrix() const {
    Mat4 m = Mat4::Identity();
    m.block<3, 3>(0, 0) = rotation;
    m.block<3, 1>(0, 3) = translation;
    return m;
  }

  static Pose from_matrix(const Mat4& m) {
    Pose p;
    p.rotation = m.block<3, 3>(0, 0);
    p.translation = m.block<3, 1>(0, 3);
    return p;
  }

  // Camera at `eye` looking at `target` (camera +z toward the target).
  // World convention is x-right / y-down / z-forward; `down` is the world
  // direction camera +y should lean toward.
  static Pose look_at(const Vec3& eye, const Vec3& target, const Vec3& down = Vec3(0, 1, 0)) {
    Vec3 z = (target - eye).normalized();
    Vec3 x = down.cross(z).normalized();
    Vec3 y = z.cross(x);
    Pose p;
    p.rotation.col(0) = x;
    p.rotation.col(1) = y;
    p.rotation.col(2) = z;
    p.translation = eye;
    return p;
  }
};

// Projection of a world point. Pixel centers are at (col + 0.5, row + 0.5).
struct PixelProjection {
  double u = 0, v = 0;  // continuous image coordinates
  double z = 0;         // camera-space depth
  bool in_front = false;
  bool in_bounds = false;
};

inline PixelProjection project_point(const CameraIntrinsics& K, const Pose& pose,
                                     const Vec3& world) {
  PixelProjection out;
  const Vec3 cam = pose.rotation.transpose() * (world - pose.translation);
  out.z = cam.z();
  if (cam.z() <= 0) return out;
  out.in_front = true;
  out.u = K.fx * cam.x() / cam.z() + K.cx;
  out.v = K.fy * cam.y() / cam.z() + K.cy;
  out.in_bounds = out.u >= 0 && out.u < K.width && out.v >= 0 && out.v < K.height;
  return out;
}

// Back-projects pixel (col, row) at z-depth `depth` through the pixel center.
inline Vec3 back_project(const CameraIntrinsics& K, const Pose& pose, int col, int row,
                         double depth) {
  const double x = (col + 0.5 - K.cx) / K.fx * depth;
  const double y = (row + 0.5 - K.cy) / K.fy * depth;
  return pose.rotation * Vec3(x, y, depth) + pose.translation;
}

// Unit ray direction (world space) through the center of pixel (col, row).
inline Vec3 pixel_ray_direction(const CameraIntrinsics& K, const Pose& pose, double col,
                                double row) {
  const Vec3 d_cam((col + 0.5 - K.cx) / K.fx, (row + 0.5 - K.cy) / K.fy, 1.0);
  return (pose.rotation * d_cam).normalized();
}

}  // namespace hr
