// Copyright 2026 The voxgauss Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <voxgauss/error.hpp>
#include <voxgauss/math.hpp>

#include <limits>
#include <string>

namespace voxgauss {

/// origin + t * direction for t in [t_min, t_max]; direction has unit length.
struct Ray {
    Vec3d origin;
    Vec3d direction{0, 0, 1};
    double t_min = 0.0;
    double t_max = std::numeric_limits<double>::infinity();
};

/// Pinhole camera. Pixel (0, 0) is the top-left corner of the image.
struct Camera {
    Vec3d position{0, 0, -1};
    Vec3d look_at{0, 0, 0};
    Vec3d up{0, 1, 0};
    double vfov_deg = 40.0;
    int width = 256;
    int height = 256;

    /// Throws InvalidArgument for degenerate frames, BadDims for empty images.
    void validate() const;
    /// Ray through image-plane position (px + jx, py + jy), with jx = jy = 0.5
    /// selecting the pixel center.
    Ray generate_ray(int px, int py, double jx = 0.5, double jy = 0.5) const;

    bool operator==(const Camera&) const = default;
};

/// Looks at the box center from direction (0.3, 0.4, 1) at a distance that
/// fits the bounding sphere with a 30% margin.
Camera default_camera(const Aabb& scene, int width, int height, double vfov_deg = 40.0);

/// "px,py,pz,lx,ly,lz,ux,uy,uz,fov_deg". Keeps the camera's image size.
Camera parse_camera(const std::string& text, int width, int height);
std::string format_camera(const Camera& cam);

/// Parses "WxH".
void parse_resolution(const std::string& text, int& width, int& height);

} // namespace voxgauss
