// Copyright 2026 The voxgauss Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <voxgauss/error.hpp>
#include <voxgauss/math.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace voxgauss {

/// Axis-aligned Gaussian. `radius` is the per-axis standard deviation, so
/// the covariance is diag(radius^2) and the density is
/// exp(-sum_k ((x_k - center_k) / radius_k)^2).
struct Gaussian {
    Vec3f center;
    Vec3f radius;
    float opacity = 0.0f;

    bool operator==(const Gaussian&) const = default;
};

enum class SparseStrategy : uint32_t { Smart = 0, Strict = 1, SinglePerLeaf = 2 };

SparseStrategy parse_sparse_strategy(const std::string& name);
const char* to_string(SparseStrategy s);

struct LodConfig {
    int dense_block = 2;
    SparseStrategy sparse_strategy = SparseStrategy::Smart;
    double opacity_threshold = 1e-4;
    /// Minimum radius in world units; <= 0 means 0.25 * min(voxel size).
    double radius_min = 0.0;
    int sigma_multiplier = 2;

    /// Throws InvalidArgument on out-of-range fields.
    void validate() const;
    double effective_radius_min(const Vec3d& voxel_size) const {
        return radius_min > 0.0 ? radius_min : 0.25 * min_component(voxel_size);
    }
    bool operator==(const LodConfig&) const = default;
};

/// LOD-1 .. LOD-5: dense 2^3/4^3/8^3 with smart sparse grouping, then dense
/// 8^3 with strict blocks, then dense 8^3 with a single Gaussian per leaf.
LodConfig lod_preset(int level);

/// Box spanning center +- sigma * radius, clipped to `scene`.
/// Throws CenterOutsideScene if the center is not inside `scene`.
Aabb gaussian_aabb(const Gaussian& g, int sigma, const Aabb& scene);

struct GaussianModel {
    std::vector<Gaussian> gaussians;
    std::vector<Aabb> aabbs;
    Aabb scene_aabb;
    std::string source_label;
    LodConfig lod;

    size_t size() const { return gaussians.size(); }
    bool empty() const { return gaussians.empty(); }

    /// Recomputes every per-Gaussian box for the given sigma multiplier.
    void rebuild_aabbs(int sigma);
};

// GGM binary layout (little-endian):
//   char[4] "GGM1", u32 version (1), u64 count,
//   u32 dense_block, u32 sparse_strategy, f64 opacity_threshold, f64 radius_min, u32 sigma_multiplier,
//   f64[6] scene aabb (lo xyz, hi xyz), u32 label length, label bytes,
//   count * { f32[3] center, f32[3] radius, f32 opacity }
// Per-Gaussian boxes are derived data and are rebuilt on read.
inline constexpr uint32_t kGgmVersion = 1;

void write_ggm(const GaussianModel& model, std::ostream& sink);
GaussianModel read_ggm(std::istream& source);
void write_ggm_file(const GaussianModel& model, const std::string& path);
GaussianModel read_ggm_file(const std::string& path);

} // namespace voxgauss
