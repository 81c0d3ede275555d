// Copyright 2026 The voxgauss Authors
// SPDX-License-Identifier: Apache-2.0

#include <voxgauss/camera.hpp>

#include <charconv>
#include <cstdio>
#include <numbers>
#include <vector>

namespace voxgauss {

namespace {

struct Basis {
    Vec3d forward, right, up;
};

Basis basis_of(const Camera& c) {
    const Vec3d f = c.look_at - c.position;
    const double lf = length(f);
    if (!(lf > 0.0) || !std::isfinite(lf)) throw Error(ErrorCode::InvalidArgument, "camera position equals look-at");
    Basis b;
    b.forward = f / lf;
    const Vec3d r = cross(b.forward, c.up);
    const double lr = length(r);
    if (!(lr > 1e-12)) throw Error(ErrorCode::InvalidArgument, "camera up vector is parallel to the view direction");
    b.right = r / lr;
    b.up = cross(b.right, b.forward);
    return b;
}

} // namespace

void Camera::validate() const {
    if (width <= 0 || height <= 0) throw Error(ErrorCode::BadDims, "image size must be positive");
    if (!(vfov_deg > 0.0 && vfov_deg < 180.0)) throw Error(ErrorCode::InvalidArgument, "fov must be in (0, 180)");
    basis_of(*this);
}

Ray Camera::generate_ray(int px, int py, double jx, double jy) const {
    const Basis b = basis_of(*this);
    const double tan_half = std::tan(vfov_deg * std::numbers::pi / 360.0);
    const double aspect = double(width) / double(height);
    const double sx = (2.0 * (px + jx) / width - 1.0) * tan_half * aspect;
    const double sy = (1.0 - 2.0 * (py + jy) / height) * tan_half;
    Ray r;
    r.origin = position;
    r.direction = normalize(b.forward + b.right * sx + b.up * sy);
    return r;
}

Camera default_camera(const Aabb& scene, int width, int height, double vfov_deg) {
    if (scene.empty()) throw Error(ErrorCode::InvalidArgument, "cannot frame an empty scene");
    Camera c;
    c.width = width;
    c.height = height;
    c.vfov_deg = vfov_deg;
    c.look_at = scene.center();
    const double radius = std::max(0.5 * length(scene.extent()), 1e-9);
    const double dist = 1.3 * radius / std::sin(vfov_deg * std::numbers::pi / 360.0);
    c.position = c.look_at + normalize(Vec3d{0.3, 0.4, 1.0}) * dist;
    c.up = {0, 1, 0};
    return c;
}

Camera parse_camera(const std::string& text, int width, int height) {
    std::vector<double> v;
    const char* p = text.data();
    const char* end = p + text.size();
    while (p < end) {
        double x = 0.0;
        auto [next, ec] = std::from_chars(p, end, x);
        if (ec != std::errc() || !std::isfinite(x)) throw Error(ErrorCode::InvalidArgument, "bad camera '" + text + "'");
        v.push_back(x);
        p = next;
        if (p < end) {
            if (*p != ',') throw Error(ErrorCode::InvalidArgument, "bad camera '" + text + "'");
            ++p;
            if (p == end) throw Error(ErrorCode::InvalidArgument, "bad camera '" + text + "'");
        }
    }
    if (v.size() != 10) throw Error(ErrorCode::InvalidArgument, "camera needs 10 comma-separated numbers");
    Camera c;
    c.position = {v[0], v[1], v[2]};
    c.look_at = {v[3], v[4], v[5]};
    c.up = {v[6], v[7], v[8]};
    c.vfov_deg = v[9];
    c.width = width;
    c.height = height;
    c.validate();
    return c;
}

std::string format_camera(const Camera& c) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", c.position.x,
                  c.position.y, c.position.z, c.look_at.x, c.look_at.y, c.look_at.z, c.up.x, c.up.y, c.up.z,
                  c.vfov_deg);
    return buf;
}

void parse_resolution(const std::string& text, int& width, int& height) {
    const auto x = text.find('x');
    int w = 0, h = 0;
    if (x == std::string::npos) throw Error(ErrorCode::InvalidArgument, "resolution must look like WxH");
    auto r1 = std::from_chars(text.data(), text.data() + x, w);
    auto r2 = std::from_chars(text.data() + x + 1, text.data() + text.size(), h);
    if (r1.ec != std::errc() || r1.ptr != text.data() + x || r2.ec != std::errc() ||
        r2.ptr != text.data() + text.size() || w <= 0 || h <= 0 || w > 16384 || h > 16384)
        throw Error(ErrorCode::InvalidArgument, "resolution must look like WxH");
    width = w;
    height = h;
}

} // namespace voxgauss
