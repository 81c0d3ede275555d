// Copyright 2026 The voxgauss Authors
// SPDX-License-Identifier: Apache-2.0

///
/// @file experiment.hpp
///
/// Dataset loading and the side-by-side comparison shared by the CLI and the
/// HTTP service.
///
/// Dataset references:
///   synthetic:<kind>[:<dim>]          gaussian_blob, sphere_shell, checker, wavelet_like
///   amr:synthetic[:<levels>[:<dim>]]  nested synthetic stack, masked
///   points:synthetic[:<count>]        clustered particles
///   svol:<path>, xyz:<path>           files; a bare path is dispatched on its extension
///

#pragma once

#include <voxgauss/bvh.hpp>
#include <voxgauss/camera.hpp>
#include <voxgauss/gauss_tracer.hpp>
#include <voxgauss/gaussianizer.hpp>
#include <voxgauss/imaging.hpp>
#include <voxgauss/ingest.hpp>
#include <voxgauss/voxel_tracer.hpp>

#include <optional>
#include <string>
#include <vector>

namespace voxgauss {

enum class DatasetKind { Volume, Points, Amr };

struct Dataset {
    std::string label;
    DatasetKind kind = DatasetKind::Volume;
    /// Volume grid, point-count grid, or masked AMR levels (coarse first).
    std::vector<SparseGrid> grids;
    std::optional<PointGrid> points;

    std::vector<const SparseGrid*> reference_grids() const;
    /// Union of the reference grids' world boxes.
    Aabb bounds() const;
};

/// Throws UnknownDataset for unrecognised references or missing files.
Dataset load_dataset(const std::string& ref, uint64_t seed = 0);

Dataset make_volume_dataset(SparseGrid grid, std::string label);
Dataset make_points_dataset(PointSet points, std::string label);
/// Applies mask_refined unless the stack is already masked.
Dataset make_amr_dataset(AmrStack stack, std::string label);

GaussianModel fit_dataset(const Dataset& ds, const LodConfig& cfg, FitStats* stats = nullptr);

struct CompareConfig {
    TraceConfig trace;
    MarchConfig march;
    TransferFunction tf = tf_gray();
    Rgb background{0, 0, 0};
    int width = 256;
    int height = 256;
    /// Gaussian frames timed; the reported time is their median.
    int frames = 16;
    std::optional<Camera> camera;
};

struct CompareResult {
    size_t gaussians = 0;
    double psnr_db = 0.0;
    double ms_per_frame = 0.0;
    Camera camera;
    Image8 gauss;
    Image8 reference;
    RenderStats stats;
};

/// Renders the model and the reference with the same camera and transfer function.
CompareResult run_compare(const Dataset& ds, const GaussianModel& model, const Bvh& bvh, const CompareConfig& cfg);

/// Single-subframe renders without jitter.
Image8 render_gauss_image(const GaussianModel& model, const Bvh& bvh, const Camera& cam, const TransferFunction& tf,
                          const TraceConfig& trace, const Rgb& bg, RenderStats* stats = nullptr);
Image8 render_reference_image(const Dataset& ds, const Camera& cam, const TransferFunction& tf,
                              const MarchConfig& march, const Rgb& bg);

std::string csv_header();
/// `lod` is 1..5 or 0 for a custom configuration.
std::string csv_row(const std::string& dataset, int lod, int sigma, double kappa, const CompareResult& r);
/// "inf" for infinite values, otherwise fixed with four decimals.
std::string format_db(double db);

} // namespace voxgauss
