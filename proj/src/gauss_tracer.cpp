// Copyright 2026 The voxgauss Authors
// SPDX-License-Identifier: Apache-2.0

#include <voxgauss/gauss_tracer.hpp>

#include <tbb/blocked_range.h>
#include <tbb/combinable.h>
#include <tbb/parallel_for.h>

#include <algorithm>
#include <bit>
#include <numbers>

namespace voxgauss {

void TraceConfig::validate() const {
    if (!(kappa > 0.0 && kappa < 1.0)) throw Error(ErrorCode::InvalidArgument, "kappa must be in (0, 1)");
    if (max_hits_per_ray < 1) throw Error(ErrorCode::InvalidArgument, "max_hits_per_ray must be >= 1");
    if (std::isnan(early_exit_high)) throw Error(ErrorCode::InvalidArgument, "early_exit_high is NaN");
}

namespace {

void check_direction(const Ray& ray) {
    if (!(std::abs(length(ray.direction) - 1.0) <= 1e-6))
        throw Error(ErrorCode::DegenerateDirection, "ray direction must have unit length");
}

inline Vec3d inverse(const Vec3d& d) { return {1.0 / d.x, 1.0 / d.y, 1.0 / d.z}; }

bool hit_less(const HitInterval& a, const HitInterval& b) {
    if (a.t_entry != b.t_entry) return a.t_entry < b.t_entry;
    return a.gaussian_index < b.gaussian_index;
}

TraceResult accumulate_hits(const Ray& ray, const GaussianModel& model, const TraceConfig& cfg,
                            std::vector<HitInterval>& hits, uint32_t candidates) {
    TraceResult out;
    out.candidates = candidates;
    out.hits = uint32_t(hits.size());
    if (hits.empty()) return out;
    out.hit_any = true;
    std::sort(hits.begin(), hits.end(), hit_less);
    if (hits.size() > cfg.max_hits_per_ray) {
        out.overflow = true;
        hits.resize(cfg.max_hits_per_ray);
    }
    long double T = 0.0L;
    bool first = true;
    for (const HitInterval& h : hits) {
        T += line_integral(ray, model.gaussians[h.gaussian_index], h.t_entry, h.t_exit);
        if (double(T) > cfg.early_exit_high) break;
        if (cfg.faint_first_hit_break && first && double(T) < 0.001) break;
        first = false;
    }
    out.T = double(T);
    return out;
}

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

} // namespace

std::optional<HitInterval> intersect_ray_gaussian(const Ray& ray, const Gaussian& g, double kappa) {
    check_direction(ray);
    // Same expression order as the batched kernel so both agree bit for bit.
    const double irx = 1.0 / double(g.radius.x), iry = 1.0 / double(g.radius.y), irz = 1.0 / double(g.radius.z);
    const double px = (ray.origin.x - double(g.center.x)) * irx, py = (ray.origin.y - double(g.center.y)) * iry,
                 pz = (ray.origin.z - double(g.center.z)) * irz;
    const double qx = ray.direction.x * irx, qy = ray.direction.y * iry, qz = ray.direction.z * irz;
    const double c = qx * qx + qy * qy + qz * qz;
    const double b = 2.0 * (px * qx + py * qy + pz * qz);
    const double a = px * px + py * py + pz * pz + std::log(kappa);
    const double disc = b * b - 4.0 * c * a;
    if (!(disc >= 0.0)) return std::nullopt;
    const double sq = std::sqrt(disc);
    const double inv2c = 0.5 / c;
    const double nb = 0.0 - b;
    const double lo = (nb - sq) * inv2c, hi = (nb + sq) * inv2c;
    if (hi < ray.t_min) return std::nullopt;
    const double t0 = std::max(lo, ray.t_min), t1 = std::min(hi, ray.t_max);
    if (!(t0 <= t1)) return std::nullopt;
    return HitInterval{0, t0, t1};
}

double line_integral(const Ray& ray, const Gaussian& g, double t0, double t1) {
    if (!(t1 > t0)) return 0.0;
    const Vec3d r(g.radius);
    const Vec3d p = div(ray.origin - Vec3d(g.center), r);
    const Vec3d q = div(ray.direction, r);
    const double L2 = dot(q, q);
    const double L = std::sqrt(L2);
    const double pq = dot(p, q);
    const Vec3d perp = p - q * (pq / L2);
    const double h2 = dot(perp, perp);
    // In arclength s = L t the exponent is (s - m)^2 + h2.
    const double m = -pq / L;
    const double a = L * t0 - m, b = L * t1 - m;
    double span;
    if (a >= 0.0) span = std::erfc(a) - std::erfc(b);
    else if (b <= 0.0) span = std::erfc(-b) - std::erfc(-a);
    else span = std::erf(b) - std::erf(a);
    const double tau = double(g.opacity) / L * std::exp(-h2) * (0.5 * std::sqrt(std::numbers::pi)) * span;
    return std::max(tau, 0.0);
}

TraceResult trace_ray(const Ray& ray, const GaussianModel& model, const Bvh& bvh, const TraceConfig& cfg,
                      TraceScratch* scratch) {
    check_direction(ray);
    const Vec3d inv = inverse(ray.direction);
    double te = 0.0, tx = 0.0;
    if (bvh.nodes.empty() || !ray_box(ray.origin, inv, model.scene_aabb, ray.t_min, ray.t_max, te, tx)) return {};

    TraceScratch local;
    std::vector<HitInterval>& hits = (scratch ? scratch : &local)->hits;
    hits.clear();

    const kernels::RayLanes lanes{ray.origin.x, ray.origin.y, ray.origin.z, ray.direction.x, ray.direction.y,
                                  ray.direction.z, inv.x, inv.y, inv.z, te, tx, std::log(cfg.kappa)};
    const kernels::GaussianLanes soa = bvh.lanes();
    const kernels::RayGaussiansFn test = kernels::active().ray_gaussians;

    uint32_t candidates = 0;
    uint32_t stack[128];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Bvh::Node& node = bvh.nodes[stack[--top]];
        double a = 0.0, b = 0.0;
        if (!ray_box(ray.origin, inv, node.bounds, te, tx, a, b)) continue;
        if (node.count) {
            double t0[kernels::kBatch], t1[kernels::kBatch];
            const uint32_t mask = test(lanes, soa, node.offset, node.count, t0, t1);
            candidates += uint32_t(std::popcount(mask >> 4));
            for (uint32_t k = 0; k < node.count; ++k)
                if (mask & (1u << k)) hits.push_back({bvh.order[node.offset + k], t0[k], t1[k]});
        } else {
            const uint32_t self = uint32_t(&node - bvh.nodes.data());
            if (top + 2 > int(std::size(stack))) throw Error(ErrorCode::InvalidArgument, "BVH too deep");
            stack[top++] = node.offset;
            stack[top++] = self + 1;
        }
    }
    Ray clipped = ray;
    clipped.t_min = te;
    clipped.t_max = tx;
    return accumulate_hits(clipped, model, cfg, hits, candidates);
}

TraceResult trace_ray_bruteforce(const Ray& ray, const GaussianModel& model, const TraceConfig& cfg) {
    check_direction(ray);
    const Vec3d inv = inverse(ray.direction);
    double te = 0.0, tx = 0.0;
    if (model.empty() || !ray_box(ray.origin, inv, model.scene_aabb, ray.t_min, ray.t_max, te, tx)) return {};
    Ray clipped = ray;
    clipped.t_min = te;
    clipped.t_max = tx;
    std::vector<HitInterval> hits;
    uint32_t candidates = 0;
    for (size_t i = 0; i < model.gaussians.size(); ++i) {
        double a = 0.0, b = 0.0;
        if (!ray_box(ray.origin, inv, model.aabbs[i], te, tx, a, b)) continue;
        ++candidates;
        if (auto h = intersect_ray_gaussian(clipped, model.gaussians[i], cfg.kappa)) {
            h->gaussian_index = uint32_t(i);
            hits.push_back(*h);
        }
    }
    return accumulate_hits(clipped, model, cfg, hits, candidates);
}

void pixel_jitter(bool jitter, uint64_t seed, int subframe, size_t index, double& jx, double& jy) {
    if (!jitter) {
        jx = jy = 0.5;
        return;
    }
    const uint64_t h = splitmix64(splitmix64(seed ^ (uint64_t(uint32_t(subframe)) << 40)) ^ uint64_t(index));
    jx = double(h >> 40) * 0x1.0p-24;
    jy = double((h >> 16) & 0xFFFFFF) * 0x1.0p-24;
}

RenderStats render(const GaussianModel& model, const Bvh& bvh, const Camera& camera, Film& film,
                   const TransferFunction& tf, const TraceConfig& cfg, const RenderOptions& opts) {
    cfg.validate();
    camera.validate();
    if (film.width != camera.width || film.height != camera.height)
        throw Error(ErrorCode::DimMismatch, "film and camera sizes differ");
    std::vector<float> buffer(film.accum.size());
    if (opts.candidate_counts) opts.candidate_counts->assign(film.pixel_count(), 0);
    tbb::combinable<RenderStats> partial;
    const int width = camera.width;
    tbb::parallel_for(tbb::blocked_range<int>(0, camera.height), [&](const tbb::blocked_range<int>& rows) {
        TraceScratch scratch;
        RenderStats& st = partial.local();
        for (int y = rows.begin(); y != rows.end(); ++y) {
            for (int x = 0; x < width; ++x) {
                const size_t idx = size_t(y) * size_t(width) + size_t(x);
                double jx, jy;
                pixel_jitter(opts.jitter, opts.seed, film.subframes, idx, jx, jy);
                const TraceResult r = trace_ray(camera.generate_ray(x, y, jx, jy), model, bvh, cfg, &scratch);
                const Rgb c = shade(r.T, r.hit_any, tf, opts.background);
                buffer[3 * idx] = c.x;
                buffer[3 * idx + 1] = c.y;
                buffer[3 * idx + 2] = c.z;
                ++st.rays;
                st.candidates += r.candidates;
                st.hits += r.hits;
                st.overflows += r.overflow ? 1 : 0;
                if (opts.candidate_counts) (*opts.candidate_counts)[idx] = r.candidates;
            }
        }
    });
    accumulate(film, buffer);
    RenderStats total;
    partial.combine_each([&](const RenderStats& s) {
        total.rays += s.rays;
        total.candidates += s.candidates;
        total.hits += s.hits;
        total.overflows += s.overflows;
    });
    return total;
}

} // namespace voxgauss
