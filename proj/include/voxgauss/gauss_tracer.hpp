// Copyright 2026 The voxgauss Authors
// SPDX-License-Identifier: Apache-2.0

///
/// @file gauss_tracer.hpp
///
/// Ray tracing of Gaussian models. A ray accepts a Gaussian when it overlaps
/// the Gaussian's box and crosses the ellipsoid on which the density equals
/// kappa. Accepted intervals are sorted by entry distance and their closed
/// form line integrals are summed into the optical depth T.
///

#pragma once

#include <voxgauss/bvh.hpp>
#include <voxgauss/camera.hpp>
#include <voxgauss/gaussian_model.hpp>
#include <voxgauss/imaging.hpp>

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

namespace voxgauss {

struct HitInterval {
    uint32_t gaussian_index = 0;
    double t_entry = 0.0;
    double t_exit = 0.0;
};

struct TraceConfig {
    double kappa = 0.01;
    /// Accumulation stops once T exceeds this. The default corresponds to a
    /// visibility of 0.999; infinity disables the early exit.
    double early_exit_high = -std::log(0.001);
    uint32_t max_hits_per_ray = 4096;
    /// Also stop when T < 0.001 after the first accumulated hit.
    bool faint_first_hit_break = false;

    /// Throws InvalidArgument.
    void validate() const;
};

/// Roots of C t^2 + B t + A + ln(kappa) = 0 with C = q.q, B = 2 p.q, A = p.p,
/// where p and q are the ray origin and direction in the Gaussian's whitened
/// frame, clipped to [t_min, t_max]. Throws DegenerateDirection.
std::optional<HitInterval> intersect_ray_gaussian(const Ray& ray, const Gaussian& g, double kappa);

/// Integral of opacity * exp(-|diag(1/radius)(x(t) - center)|^2) for t in [t0, t1].
double line_integral(const Ray& ray, const Gaussian& g, double t0, double t1);

struct TraceResult {
    double T = 0.0;
    bool hit_any = false;
    /// Gaussians whose box overlaps the clipped ray.
    uint32_t candidates = 0;
    /// Accepted intervals before truncation.
    uint32_t hits = 0;
    bool overflow = false;
};

/// Per-thread scratch storage for trace_ray.
struct TraceScratch {
    std::vector<HitInterval> hits;
};

TraceResult trace_ray(const Ray& ray, const GaussianModel& model, const Bvh& bvh, const TraceConfig& cfg,
                      TraceScratch* scratch = nullptr);

/// Same acceptance rule and ordering without the BVH or the batched kernel.
TraceResult trace_ray_bruteforce(const Ray& ray, const GaussianModel& model, const TraceConfig& cfg);

struct RenderStats {
    uint64_t rays = 0;
    uint64_t candidates = 0;
    uint64_t hits = 0;
    uint64_t overflows = 0;
};

struct RenderOptions {
    Rgb background{0, 0, 0};
    /// Jitter primary rays inside the pixel using `seed` and the film's subframe index.
    bool jitter = false;
    uint64_t seed = 0;
    /// When set, receives per-pixel candidate counts in row-major order.
    std::vector<uint32_t>* candidate_counts = nullptr;
};

/// Traces one ray per pixel and accumulates one subframe into `film`.
RenderStats render(const GaussianModel& model, const Bvh& bvh, const Camera& camera, Film& film,
                   const TransferFunction& tf, const TraceConfig& cfg, const RenderOptions& opts = {});

/// Subpixel offset for pixel `index` of subframe `subframe`; (0.5, 0.5) without jitter.
void pixel_jitter(bool jitter, uint64_t seed, int subframe, size_t index, double& jx, double& jy);

} // namespace voxgauss
