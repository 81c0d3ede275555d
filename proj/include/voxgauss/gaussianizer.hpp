// Copyright 2026 The voxgauss Authors
// SPDX-License-Identifier: Apache-2.0

///
/// @file gaussianizer.hpp
///
/// Converts sparse grids, point grids and AMR stacks into Gaussian models.
///
/// Dense leaves are cut into regular blocks of 2^3, 4^3 or 8^3 voxels. Sparse
/// leaves use one of three groupings:
///  - smart:  greedy 2^3 blocks, then face-adjacent pairs, then singletons;
///  - strict: greedy 2^3 blocks, then singletons;
///  - single: one Gaussian spanning the bounding box of all active voxels.
/// Every group becomes one Gaussian centered on the group centroid with
/// per-axis radius equal to the half extent of the group's voxel bounding
/// box and opacity equal to the mean voxel value. Groups whose opacity does
/// not exceed the threshold are dropped.
///

#pragma once

#include <voxgauss/gaussian_model.hpp>
#include <voxgauss/ingest.hpp>
#include <voxgauss/sparse_grid.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace voxgauss {

/// Leaf-local voxel offsets (ZYX bit indices) forming one Gaussian.
struct VoxelGroup {
    std::vector<uint32_t> members;
};

/// Smart grouping before opacity filtering. Throws EmptyLeaf.
std::vector<VoxelGroup> group_smart(const LeafNode& leaf);
/// Strict grouping (blocks + singletons) before opacity filtering. Throws EmptyLeaf.
std::vector<VoxelGroup> group_strict(const LeafNode& leaf);

/// Gaussian for a voxel group, or nullopt if filtered by opacity.
std::optional<Gaussian> gaussian_from_group(const LeafNode& leaf, const VoxelGroup& group,
                                            const GridTransform& xform, const LodConfig& cfg);

std::vector<Gaussian> fit_dense_leaf(const LeafNode& leaf, int block, const GridTransform& xform,
                                     const LodConfig& cfg);
std::vector<Gaussian> fit_sparse_smart(const LeafNode& leaf, const GridTransform& xform, const LodConfig& cfg);
std::vector<Gaussian> fit_sparse_strict(const LeafNode& leaf, const GridTransform& xform, const LodConfig& cfg);
std::vector<Gaussian> fit_sparse_single(const LeafNode& leaf, const GridTransform& xform, const LodConfig& cfg);

/// Gaussian for a constant tile covering `box`, or nullopt if filtered.
std::optional<Gaussian> fit_tile(const CoordBox& box, float value, const GridTransform& xform,
                                 const LodConfig& cfg);

struct FitStats {
    size_t dense_leaves = 0;
    size_t sparse_leaves = 0;
    size_t tiles = 0;
    size_t dense_gaussians = 0;
    size_t sparse_gaussians = 0;
    size_t tile_gaussians = 0;

    size_t total() const { return dense_gaussians + sparse_gaussians + tile_gaussians; }
    FitStats& operator+=(const FitStats& o);
};

/// Leaves are fitted in parallel and concatenated in leaf order, followed by
/// tiles. Throws EmptyGrid.
GaussianModel fit_grid(const SparseGrid& grid, const LodConfig& cfg, FitStats* stats = nullptr);

/// One isotropic Gaussian per particle with radius voxel_size / 2 and opacity
/// equal to the velocity magnitude normalized by the set maximum.
GaussianModel fit_points(const PointGrid& pg, const LodConfig& cfg);

/// Fits every level with its own transform and concatenates coarse to fine.
/// `per_level` receives the Gaussian count contributed by each level.
GaussianModel fit_amr(const AmrStack& stack, const LodConfig& cfg, std::vector<size_t>* per_level = nullptr);

/// Number of fit_grid / fit_points / fit_amr calls made by this process.
uint64_t fit_invocation_count();

} // namespace voxgauss
