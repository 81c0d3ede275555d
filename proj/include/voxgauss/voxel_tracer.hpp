// Copyright 2026 The voxgauss Authors
// SPDX-License-Identifier: Apache-2.0

///
/// @file voxel_tracer.hpp
///
/// Reference renderer that marches rays through the sparse tree. In exact mode
/// every active voxel or tile contributes value * segment length, with empty
/// top-level nodes, empty 128^3 slots and empty 8^3 slots skipped whole.
///

#pragma once

#include <voxgauss/camera.hpp>
#include <voxgauss/imaging.hpp>
#include <voxgauss/sparse_grid.hpp>

#include <cstdint>
#include <vector>

namespace voxgauss {

enum class StepMode { VoxelExact, FixedStep };

struct MarchConfig {
    StepMode step_mode = StepMode::VoxelExact;
    /// World-space step, only used by FixedStep.
    double fixed_step = 0.0;
    double density_scale = 1.0;

    /// Throws InvalidArgument.
    void validate() const;
};

struct MarchResult {
    double T = 0.0;
    bool hit_any = false;
    /// Leaf voxels and tiles visited with a positive segment length.
    uint64_t cells_visited = 0;
};

MarchResult dda_march(const Ray& ray, const SparseGrid& grid, const MarchConfig& cfg);

/// Optical depth summed over several grids, e.g. the masked levels of an AMR stack.
MarchResult dda_march(const Ray& ray, const std::vector<const SparseGrid*>& grids, const MarchConfig& cfg);

struct ReferenceOptions {
    Rgb background{0, 0, 0};
    bool jitter = false;
    uint64_t seed = 0;
};

/// One ray per pixel through the given grids, one subframe accumulated into `film`.
void render_reference(const std::vector<const SparseGrid*>& grids, const Camera& camera, Film& film,
                      const TransferFunction& tf, const MarchConfig& cfg, const ReferenceOptions& opts = {});
void render_reference(const SparseGrid& grid, const Camera& camera, Film& film, const TransferFunction& tf,
                      const MarchConfig& cfg, const ReferenceOptions& opts = {});

} // namespace voxgauss
