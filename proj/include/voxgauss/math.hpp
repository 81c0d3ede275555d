// Copyright 2026 The voxgauss Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>

namespace voxgauss {

template <typename T>
struct Vec3 {
    T x{}, y{}, z{};

    constexpr Vec3() = default;
    constexpr Vec3(T x_, T y_, T z_) : x(x_), y(y_), z(z_) {}
    template <typename U>
    constexpr explicit Vec3(const Vec3<U>& o)
        : x(static_cast<T>(o.x)), y(static_cast<T>(o.y)), z(static_cast<T>(o.z)) {}

    constexpr T& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    constexpr T operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 operator*(T s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(T s) const { return {x / s, y / s, z / s}; }
    constexpr Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    constexpr Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    constexpr Vec3& operator*=(T s) { x *= s; y *= s; z *= s; return *this; }

    constexpr bool operator==(const Vec3&) const = default;
};

using Vec3d = Vec3<double>;
using Vec3f = Vec3<float>;

template <typename T>
constexpr Vec3<T> mul(const Vec3<T>& a, const Vec3<T>& b) { return {a.x * b.x, a.y * b.y, a.z * b.z}; }
template <typename T>
constexpr Vec3<T> div(const Vec3<T>& a, const Vec3<T>& b) { return {a.x / b.x, a.y / b.y, a.z / b.z}; }
template <typename T>
constexpr T dot(const Vec3<T>& a, const Vec3<T>& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
template <typename T>
constexpr Vec3<T> cross(const Vec3<T>& a, const Vec3<T>& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
template <typename T>
inline T length(const Vec3<T>& a) { return std::sqrt(dot(a, a)); }
template <typename T>
inline Vec3<T> normalize(const Vec3<T>& a) { return a / length(a); }
template <typename T>
constexpr Vec3<T> vmin(const Vec3<T>& a, const Vec3<T>& b) {
    return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
}
template <typename T>
constexpr Vec3<T> vmax(const Vec3<T>& a, const Vec3<T>& b) {
    return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
}
template <typename T>
constexpr T min_component(const Vec3<T>& a) { return std::min({a.x, a.y, a.z}); }
template <typename T>
constexpr T max_component(const Vec3<T>& a) { return std::max({a.x, a.y, a.z}); }

/// Integer index-space coordinate.
struct Coord {
    int32_t x = 0, y = 0, z = 0;

    constexpr int32_t& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    constexpr int32_t operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    constexpr Coord operator+(const Coord& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Coord operator-(const Coord& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr bool operator==(const Coord&) const = default;
    constexpr auto operator<=>(const Coord&) const = default;

    /// Rounds each component down to a multiple of `size` (a power of two).
    constexpr Coord aligned(int32_t size) const {
        const int32_t mask = ~(size - 1);
        return {x & mask, y & mask, z & mask};
    }
    Vec3d as_vec() const { return {double(x), double(y), double(z)}; }
};

struct CoordHash {
    size_t operator()(const Coord& c) const noexcept {
        uint64_t h = uint64_t(uint32_t(c.x)) * 0x9E3779B97F4A7C15ull;
        h ^= uint64_t(uint32_t(c.y)) * 0xC2B2AE3D27D4EB4Full + (h << 6) + (h >> 2);
        h ^= uint64_t(uint32_t(c.z)) * 0x165667B19E3779F9ull + (h << 6) + (h >> 2);
        return size_t(h);
    }
};

/// Half-open integer box [min, max).
struct CoordBox {
    Coord min, max;
    constexpr bool operator==(const CoordBox&) const = default;
    constexpr bool contains(const Coord& c) const {
        return c.x >= min.x && c.y >= min.y && c.z >= min.z && c.x < max.x && c.y < max.y && c.z < max.z;
    }
    constexpr bool overlaps(const CoordBox& o) const {
        return min.x < o.max.x && o.min.x < max.x && min.y < o.max.y && o.min.y < max.y &&
               min.z < o.max.z && o.min.z < max.z;
    }
};

/// World-space axis-aligned box. Default-constructed boxes are empty.
struct Aabb {
    Vec3d lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
             std::numeric_limits<double>::infinity()};
    Vec3d hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
             -std::numeric_limits<double>::infinity()};

    constexpr Aabb() = default;
    constexpr Aabb(const Vec3d& l, const Vec3d& h) : lo(l), hi(h) {}

    bool empty() const { return lo.x > hi.x || lo.y > hi.y || lo.z > hi.z; }
    void extend(const Vec3d& p) { lo = vmin(lo, p); hi = vmax(hi, p); }
    void extend(const Aabb& b) { lo = vmin(lo, b.lo); hi = vmax(hi, b.hi); }
    Vec3d center() const { return (lo + hi) * 0.5; }
    Vec3d extent() const { return hi - lo; }
    bool contains(const Vec3d& p) const {
        return p.x >= lo.x && p.y >= lo.y && p.z >= lo.z && p.x <= hi.x && p.y <= hi.y && p.z <= hi.z;
    }
    bool contains(const Aabb& b) const { return contains(b.lo) && contains(b.hi); }
    Aabb intersect(const Aabb& b) const { return {vmax(lo, b.lo), vmin(hi, b.hi)}; }
    double surface_area() const {
        if (empty()) return 0.0;
        const Vec3d e = extent();
        return 2.0 * (e.x * e.y + e.y * e.z + e.z * e.x);
    }
    bool operator==(const Aabb&) const = default;
};

/// Slab test. Returns the parametric overlap of `origin + t*dir` with `box`
/// restricted to [t_min, t_max], or false if empty.
inline bool ray_box(const Vec3d& origin, const Vec3d& inv_dir, const Aabb& box, double t_min, double t_max,
                    double& t_enter, double& t_exit) {
    double t0 = t_min, t1 = t_max;
    for (int a = 0; a < 3; ++a) {
        double tn = (box.lo[a] - origin[a]) * inv_dir[a];
        double tf = (box.hi[a] - origin[a]) * inv_dir[a];
        if (tn > tf) std::swap(tn, tf);
        // NaN from 0*inf (ray in the slab plane) must not shrink the interval.
        if (!(tn <= t0)) t0 = std::isnan(tn) ? t0 : tn;
        if (!(tf >= t1)) t1 = std::isnan(tf) ? t1 : tf;
        if (t0 > t1) return false;
    }
    t_enter = t0;
    t_exit = t1;
    return true;
}

} // namespace voxgauss

template <>
struct std::hash<voxgauss::Coord> : voxgauss::CoordHash {};
