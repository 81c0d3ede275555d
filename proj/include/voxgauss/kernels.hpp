// Copyright 2026 The voxgauss Authors
// SPDX-License-Identifier: Apache-2.0

///
/// @file kernels.hpp
///
/// Data-parallel inner loops with a scalar reference implementation and an
/// optional AVX2 implementation chosen at runtime. Both produce bit-identical
/// results; the project is built without floating-point contraction so that
/// the per-lane operation order matches the scalar code exactly.
///
/// Set VOXGAUSS_KERNELS=scalar in the environment to force the scalar table.
///

#pragma once

#include <cstddef>
#include <cstdint>

namespace voxgauss::kernels {

/// Ray data shared by all lanes of a batched test.
struct RayLanes {
    double ox, oy, oz;
    double dx, dy, dz;
    double inv_dx, inv_dy, inv_dz;
    double t_min, t_max;
    double log_kappa;
};

/// Structure-of-arrays view over Gaussians: centers, reciprocal radii and
/// clipped bounding boxes.
struct GaussianLanes {
    const double* cx;
    const double* cy;
    const double* cz;
    const double* irx;
    const double* iry;
    const double* irz;
    const double* lox;
    const double* loy;
    const double* loz;
    const double* hix;
    const double* hiy;
    const double* hiz;
};

inline constexpr size_t kBatch = 4;

/// Tests Gaussians [first, first + count), count <= kBatch.
/// Bit i of the low nibble is set when Gaussian first+i is accepted (box
/// overlap and real quadratic roots inside the ray segment); bit i of the
/// second nibble is set when its box overlaps the ray segment. t0/t1 receive
/// the accepted intervals clipped to [t_min, t_max].
using RayGaussiansFn = uint32_t (*)(const RayLanes& ray, const GaussianLanes& g, size_t first, size_t count,
                                    double* t0, double* t1);

/// dst[i] += src[i].
using AccumulateFn = void (*)(float* dst, const float* src, size_t n);

/// dst[i] = floor(clamp(src[i] / subframes, 0, 1) * 255 + 0.5).
using TonemapFn = void (*)(uint8_t* dst, const float* src, size_t n, float subframes);

/// Sum over i of (a[i] - b[i])^2.
using SquaredDiffFn = uint64_t (*)(const uint8_t* a, const uint8_t* b, size_t n);

struct KernelTable {
    const char* name;
    RayGaussiansFn ray_gaussians;
    AccumulateFn accumulate;
    TonemapFn tonemap;
    SquaredDiffFn squared_diff;
};

const KernelTable& scalar_table();
/// Null when the binary was built without AVX2 or the CPU lacks it.
const KernelTable* avx2_table();
/// The table used by the renderers.
const KernelTable& active();

} // namespace voxgauss::kernels
