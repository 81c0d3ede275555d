// Copyright 2026 The voxgauss Authors
// SPDX-License-Identifier: Apache-2.0

///
/// @file ingest.hpp
///
/// Dataset I/O and construction: the SVOL container, dense raw import,
/// `.xyz` particle files, point bucketing, procedural volumes and AMR
/// level stacks.
///

#pragma once

#include <voxgauss/sparse_grid.hpp>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace voxgauss {

// ---------------------------------------------------------------------------
// SVOL container
//
// Little-endian. Header:
//   char[4]  "SVOL"
//   u32      version (1)
//   f32      background
//   f64[3]   voxel size
//   f64[3]   origin
//   u32      leaf count
//   u32      tile count
// Leaf record:  i32[3] origin, u8[64] value mask (bit i = voxel i, ZYX), f32[512] values
// Tile record:  u32 level (3, 4 or 5), i32[3] origin, f32 value
// Level-5 tiles are expanded into level-4 tiles on read.
// ---------------------------------------------------------------------------

inline constexpr uint32_t kSvolVersion = 1;

void write_svol(const SparseGrid& grid, std::ostream& sink);
SparseGrid read_svol(std::istream& source);
void write_svol_file(const SparseGrid& grid, const std::string& path);
SparseGrid read_svol_file(const std::string& path);

/// Activates voxel (x,y,z) iff |value| > activity_threshold. `data` is
/// x-fastest: index = x + dims.x * (y + dims.y * z).
SparseGrid import_raw_dense(const Coord& dims, std::span<const float> data, float activity_threshold,
                            const GridTransform& xform);

// ---------------------------------------------------------------------------
// Point clouds
// ---------------------------------------------------------------------------

struct PointSet {
    std::vector<Vec3d> positions;
    std::vector<double> velocity_magnitudes;

    size_t size() const { return positions.size(); }
};

/// Parses "x y z vx vy vz" lines; blank lines and '#' comments are skipped.
/// Extra columns are ignored. Throws MalformedLine naming the 1-based line.
PointSet parse_xyz(std::istream& text);
PointSet read_xyz_file(const std::string& path);
/// Writes positions and a velocity vector along +x with the stored magnitude.
void write_xyz(const PointSet& points, std::ostream& sink);

struct PointGrid {
    SparseGrid grid;             ///< active voxel value = number of points bucketed there
    PointSet points;
    double voxel_size = 1.0;
    std::map<Coord, std::vector<uint32_t>> buckets;
};

/// Chooses voxel_size = cbrt(bbox_volume / N) (1.0 for a degenerate box) and
/// buckets every point into the voxel containing it.
PointGrid build_point_grid(PointSet points);

/// `n` particles drawn from a few seeded Gaussian clusters inside the unit
/// cube. Velocity magnitude falls off with distance from the cluster center.
PointSet gen_particles(size_t n, uint64_t seed = 0);

// ---------------------------------------------------------------------------
// Procedural volumes
// ---------------------------------------------------------------------------

enum class SyntheticKind { SphereShell, GaussianBlob, Checker, WaveletLike };

SyntheticKind parse_synthetic_kind(const std::string& name);
const char* to_string(SyntheticKind kind);

struct SyntheticParams {
    double amplitude = 1.0;
    /// gaussian_blob: standard deviation as a fraction of min(dims); 1/6 by default.
    double sigma_fraction = 1.0 / 6.0;
    /// Values at or below this magnitude are left inactive.
    double cutoff = 0.05;
    /// sphere_shell: outer radius and thickness as fractions of min(dims)/2.
    double shell_radius = 0.8;
    double shell_thickness = 0.2;
    /// checker: cube edge in voxels.
    int checker_cell = 8;
    uint64_t seed = 0;
    /// World units per voxel; <= 0 maps the longest axis onto [0, 1].
    double voxel_size = 0.0;
};

/// Deterministic procedural volume. Throws BadDims unless every dim is in [8, 1024].
SparseGrid gen_synthetic(SyntheticKind kind, const Coord& dims, const SyntheticParams& params = {});

// ---------------------------------------------------------------------------
// AMR stacks
// ---------------------------------------------------------------------------

struct AmrStack {
    std::vector<SparseGrid> levels; ///< coarse first, finest last
    bool refinement_masked = false;
};

/// Throws UnorderedLevels unless voxel sizes strictly decrease coarse to fine.
void validate_levels(const AmrStack& stack);

/// Deactivates every coarse voxel whose world extent is fully covered by the
/// union of finer levels' active extents. Idempotent.
AmrStack mask_refined(AmrStack stack);

/// Nested synthetic stack: level k covers the central (1/2)^k of the unit cube
/// at base_dim * 2^k resolution, all sampling the same smooth field.
AmrStack gen_amr_stack(int levels, int base_dim, double amplitude = 1.0);

} // namespace voxgauss
