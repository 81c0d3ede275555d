// Copyright 2026 The voxgauss Authors
// SPDX-License-Identifier: Apache-2.0

#include <voxgauss/gauss_tracer.hpp>
#include <voxgauss/voxel_tracer.hpp>

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

namespace voxgauss {

void MarchConfig::validate() const {
    if (!(density_scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "density_scale must be positive");
    if (step_mode == StepMode::FixedStep && !(fixed_step > 0.0))
        throw Error(ErrorCode::InvalidArgument, "fixed_step must be positive");
}

namespace {

/// Index-space ray; t keeps its world-space meaning because the map from
/// world to index coordinates is affine.
struct IndexRay {
    Vec3d o, d, inv;
};

/// Walks the cells of size `S` in the `n`^3 block at `lo` crossed by the ray
/// for t in [ta, tb], calling f(cell, t_enter, t_exit) for each non-empty crossing.
template <typename F>
void march_cells(const IndexRay& r, double ta, double tb, const Coord& lo, int S, int n, F&& f) {
    int c[3], step[3];
    const Vec3d p = r.o + r.d * ta;
    for (int a = 0; a < 3; ++a) {
        const double rel = (p[a] - lo[a]) / S;
        double fl = std::floor(rel);
        // Entering through the low face of a cell while moving backwards.
        if (r.d[a] < 0.0 && fl == rel) fl -= 1.0;
        c[a] = std::clamp(int(fl), 0, n - 1);
        step[a] = r.d[a] > 0.0 ? 1 : (r.d[a] < 0.0 ? -1 : 0);
    }
    double tm = ta;
    for (;;) {
        double tn = tb;
        double tax[3];
        for (int a = 0; a < 3; ++a) {
            if (step[a] == 0) {
                tax[a] = std::numeric_limits<double>::infinity();
                continue;
            }
            const double boundary = double(lo[a]) + double(S) * double(c[a] + (step[a] > 0 ? 1 : 0));
            tax[a] = (boundary - r.o[a]) * r.inv[a];
            tn = std::min(tn, tax[a]);
        }
        if (tn > tm) f(Coord{c[0], c[1], c[2]}, tm, tn);
        if (tn >= tb) return;
        for (int a = 0; a < 3; ++a) {
            if (tax[a] <= tn) {
                c[a] += step[a];
                if (c[a] < 0 || c[a] >= n) return;
            }
        }
        tm = std::max(tm, tn);
    }
}

struct ExactMarcher {
    const IndexRay& r;
    double scale;
    MarchResult out;

    void add(float value, double seg) {
        out.T += double(value) * seg * scale;
        out.hit_any = true;
        ++out.cells_visited;
    }

    void leaf(const LeafNode& node, double ta, double tb) {
        march_cells(r, ta, tb, node.origin(), 1, LeafNode::kDim, [&](const Coord& c, double t0, double t1) {
            const uint32_t n = LeafNode::offset(c.x, c.y, c.z);
            if (node.is_active(n)) add(node.value(n), t1 - t0);
        });
    }

    void level4(const Level4Node& node, double ta, double tb) {
        march_cells(r, ta, tb, node.origin(), LeafNode::kDim, Level4Node::kDim,
                    [&](const Coord& c, double t0, double t1) {
                        const uint32_t n = uint32_t(c.x << 8 | c.y << 4 | c.z);
                        if (node.child_mask().test(n)) leaf(*node.child(n), t0, t1);
                        else if (node.value_mask().test(n)) add(node.tile_value(n), t1 - t0);
                    });
    }

    void level5(const Level5Node& node, double ta, double tb) {
        march_cells(r, ta, tb, node.origin(), SparseGrid::kLevel4Dim, Level5Node::kDim,
                    [&](const Coord& c, double t0, double t1) {
                        const uint32_t n = uint32_t(c.x << 10 | c.y << 5 | c.z);
                        if (node.child_mask().test(n)) level4(*node.child(n), t0, t1);
                        else if (node.value_mask().test(n)) add(node.tile_value(n), t1 - t0);
                    });
    }
};

MarchResult march_grid(const Ray& ray, const SparseGrid& grid, const Aabb& bounds, const MarchConfig& cfg) {
    double t0 = 0.0, t1 = 0.0;
    if (bounds.empty()) return {};
    const Vec3d inv{1.0 / ray.direction.x, 1.0 / ray.direction.y, 1.0 / ray.direction.z};
    if (!ray_box(ray.origin, inv, bounds, ray.t_min, ray.t_max, t0, t1) || !(t1 > t0)) return {};
    const GridTransform& xf = grid.transform();

    if (cfg.step_mode == StepMode::FixedStep) {
        MarchResult out;
        const double h = cfg.fixed_step;
        const uint64_t steps = uint64_t(std::ceil((t1 - t0) / h));
        for (uint64_t k = 0; k < steps; ++k) {
            const double a = t0 + double(k) * h;
            const double b = std::min(a + h, t1);
            if (!(b > a)) break;
            const VoxelValue v = grid.get_voxel(xf.world_to_coord(ray.origin + ray.direction * (0.5 * (a + b))));
            if (!v.active) continue;
            out.T += double(v.value) * (b - a) * cfg.density_scale;
            out.hit_any = true;
            ++out.cells_visited;
        }
        return out;
    }

    IndexRay r;
    r.o = xf.world_to_index(ray.origin);
    r.d = div(ray.direction, xf.voxel_size);
    r.inv = {1.0 / r.d.x, 1.0 / r.d.y, 1.0 / r.d.z};
    ExactMarcher m{r, cfg.density_scale, {}};
    for (const auto& [origin, node] : grid.root()) {
        const Vec3d lo = origin.as_vec();
        const Vec3d hi = lo + Vec3d{double(SparseGrid::kLevel5Dim), double(SparseGrid::kLevel5Dim),
                                    double(SparseGrid::kLevel5Dim)};
        double a = 0.0, b = 0.0;
        if (!ray_box(r.o, r.inv, Aabb{lo, hi}, t0, t1, a, b) || !(b > a)) continue;
        m.level5(*node, a, b);
    }
    return m.out;
}

std::vector<Aabb> bounds_of(const std::vector<const SparseGrid*>& grids) {
    std::vector<Aabb> out;
    out.reserve(grids.size());
    for (const SparseGrid* g : grids) out.push_back(g->empty() ? Aabb{} : g->world_aabb());
    return out;
}

MarchResult march_grids(const Ray& ray, const std::vector<const SparseGrid*>& grids, const std::vector<Aabb>& bounds,
                        const MarchConfig& cfg) {
    MarchResult total;
    for (size_t i = 0; i < grids.size(); ++i) {
        const MarchResult r = march_grid(ray, *grids[i], bounds[i], cfg);
        total.T += r.T;
        total.hit_any = total.hit_any || r.hit_any;
        total.cells_visited += r.cells_visited;
    }
    return total;
}

} // namespace

MarchResult dda_march(const Ray& ray, const SparseGrid& grid, const MarchConfig& cfg) {
    cfg.validate();
    return march_grid(ray, grid, grid.empty() ? Aabb{} : grid.world_aabb(), cfg);
}

MarchResult dda_march(const Ray& ray, const std::vector<const SparseGrid*>& grids, const MarchConfig& cfg) {
    cfg.validate();
    return march_grids(ray, grids, bounds_of(grids), cfg);
}

void render_reference(const std::vector<const SparseGrid*>& grids, const Camera& camera, Film& film,
                      const TransferFunction& tf, const MarchConfig& cfg, const ReferenceOptions& opts) {
    cfg.validate();
    camera.validate();
    if (film.width != camera.width || film.height != camera.height)
        throw Error(ErrorCode::DimMismatch, "film and camera sizes differ");
    std::vector<float> buffer(film.accum.size());
    const std::vector<Aabb> bounds = bounds_of(grids);
    const int width = camera.width;
    tbb::parallel_for(tbb::blocked_range<int>(0, camera.height), [&](const tbb::blocked_range<int>& rows) {
        for (int y = rows.begin(); y != rows.end(); ++y) {
            for (int x = 0; x < width; ++x) {
                const size_t idx = size_t(y) * size_t(width) + size_t(x);
                double jx, jy;
                pixel_jitter(opts.jitter, opts.seed, film.subframes, idx, jx, jy);
                const MarchResult r = march_grids(camera.generate_ray(x, y, jx, jy), grids, bounds, cfg);
                const Rgb c = shade(r.T, r.hit_any, tf, opts.background);
                buffer[3 * idx] = c.x;
                buffer[3 * idx + 1] = c.y;
                buffer[3 * idx + 2] = c.z;
            }
        }
    });
    accumulate(film, buffer);
}

void render_reference(const SparseGrid& grid, const Camera& camera, Film& film, const TransferFunction& tf,
                      const MarchConfig& cfg, const ReferenceOptions& opts) {
    render_reference(std::vector<const SparseGrid*>{&grid}, camera, film, tf, cfg, opts);
}

} // namespace voxgauss
