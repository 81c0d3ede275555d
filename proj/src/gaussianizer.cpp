// Copyright 2026 The voxgauss Authors
// SPDX-License-Identifier: Apache-2.0

#include <voxgauss/gaussianizer.hpp>

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

#include <array>
#include <atomic>

namespace voxgauss {

namespace {

std::atomic<uint64_t> g_fit_invocations{0};

void require_active(const LeafNode& leaf) {
    if (leaf.active_count() == 0) throw Error(ErrorCode::EmptyLeaf, "leaf has no active voxels");
}

Vec3f clamp_radius(const Vec3d& r, double rmin) {
    return Vec3f(vmax(r, Vec3d{rmin, rmin, rmin}));
}

/// Gaussian for an index-space box (relative to the grid) with a given center.
std::optional<Gaussian> make_gaussian(const Vec3d& index_center, const Vec3d& index_half_extent, double mean,
                                      const GridTransform& xform, const LodConfig& cfg) {
    if (!(mean > cfg.opacity_threshold)) return std::nullopt;
    Gaussian g;
    g.center = Vec3f(xform.index_to_world(index_center));
    g.radius = clamp_radius(mul(index_half_extent, xform.voxel_size), cfg.effective_radius_min(xform.voxel_size));
    g.opacity = float(mean);
    return g;
}

/// Greedy 2^3 block pass shared by smart and strict grouping.
void block_pass(const LeafNode& leaf, std::array<bool, 512>& used, std::vector<VoxelGroup>& groups) {
    leaf.value_mask().for_each_set([&](uint32_t n) {
        if (used[n]) return;
        const Coord c = LeafNode::local_coord(n);
        if (c.x > 6 || c.y > 6 || c.z > 6) return;
        std::array<uint32_t, 8> block;
        int k = 0;
        for (int dx = 0; dx < 2; ++dx)
            for (int dy = 0; dy < 2; ++dy)
                for (int dz = 0; dz < 2; ++dz) {
                    const uint32_t m = LeafNode::offset(c.x + dx, c.y + dy, c.z + dz);
                    if (!leaf.is_active(m) || used[m]) return;
                    block[k++] = m;
                }
        VoxelGroup g;
        g.members.assign(block.begin(), block.end());
        for (uint32_t m : block) used[m] = true;
        groups.push_back(std::move(g));
    });
}

void singleton_pass(const LeafNode& leaf, std::array<bool, 512>& used, std::vector<VoxelGroup>& groups) {
    leaf.value_mask().for_each_set([&](uint32_t n) {
        if (used[n]) return;
        used[n] = true;
        groups.push_back(VoxelGroup{{n}});
    });
}

std::vector<Gaussian> fit_groups(const LeafNode& leaf, const std::vector<VoxelGroup>& groups,
                                 const GridTransform& xform, const LodConfig& cfg) {
    std::vector<Gaussian> out;
    out.reserve(groups.size());
    for (const VoxelGroup& g : groups)
        if (auto gs = gaussian_from_group(leaf, g, xform, cfg)) out.push_back(*gs);
    return out;
}

std::vector<Gaussian> fit_leaf(const LeafNode& leaf, const GridTransform& xform, const LodConfig& cfg) {
    if (leaf.is_dense()) return fit_dense_leaf(leaf, cfg.dense_block, xform, cfg);
    switch (cfg.sparse_strategy) {
    case SparseStrategy::Smart: return fit_sparse_smart(leaf, xform, cfg);
    case SparseStrategy::Strict: return fit_sparse_strict(leaf, xform, cfg);
    case SparseStrategy::SinglePerLeaf: return fit_sparse_single(leaf, xform, cfg);
    }
    return {};
}

void fit_grid_into(const SparseGrid& grid, const LodConfig& cfg, std::vector<Gaussian>& out, FitStats& stats) {
    const auto leaves = grid.leaves();
    std::vector<std::vector<Gaussian>> per_leaf(leaves.size());
    const GridTransform& xform = grid.transform();
    tbb::parallel_for(tbb::blocked_range<size_t>(0, leaves.size(), 16), [&](const tbb::blocked_range<size_t>& r) {
        for (size_t i = r.begin(); i != r.end(); ++i) per_leaf[i] = fit_leaf(*leaves[i], xform, cfg);
    });
    for (size_t i = 0; i < leaves.size(); ++i) {
        if (leaves[i]->is_dense()) {
            ++stats.dense_leaves;
            stats.dense_gaussians += per_leaf[i].size();
        } else {
            ++stats.sparse_leaves;
            stats.sparse_gaussians += per_leaf[i].size();
        }
        out.insert(out.end(), per_leaf[i].begin(), per_leaf[i].end());
    }
    for (const TileInfo& t : grid.tiles()) {
        ++stats.tiles;
        if (auto g = fit_tile(t.index_box, t.value, xform, cfg)) {
            out.push_back(*g);
            ++stats.tile_gaussians;
        }
    }
}

void finish_model(GaussianModel& m, Aabb scene, const LodConfig& cfg) {
    for (const Gaussian& g : m.gaussians) scene.extend(Vec3d(g.center));
    m.scene_aabb = scene;
    m.lod = cfg;
    m.rebuild_aabbs(cfg.sigma_multiplier);
}

} // namespace

FitStats& FitStats::operator+=(const FitStats& o) {
    dense_leaves += o.dense_leaves;
    sparse_leaves += o.sparse_leaves;
    tiles += o.tiles;
    dense_gaussians += o.dense_gaussians;
    sparse_gaussians += o.sparse_gaussians;
    tile_gaussians += o.tile_gaussians;
    return *this;
}

std::vector<VoxelGroup> group_smart(const LeafNode& leaf) {
    require_active(leaf);
    std::array<bool, 512> used{};
    std::vector<VoxelGroup> groups;
    block_pass(leaf, used, groups);

    // Face-adjacent pairs: +X, -X, +Y, -Y, +Z, -Z.
    static constexpr int kNeighbors[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    leaf.value_mask().for_each_set([&](uint32_t n) {
        if (used[n]) return;
        const Coord c = LeafNode::local_coord(n);
        for (const auto& d : kNeighbors) {
            const int x = c.x + d[0], y = c.y + d[1], z = c.z + d[2];
            if (x < 0 || y < 0 || z < 0 || x > 7 || y > 7 || z > 7) continue;
            const uint32_t m = LeafNode::offset(x, y, z);
            if (!leaf.is_active(m) || used[m]) continue;
            used[n] = used[m] = true;
            groups.push_back(VoxelGroup{{n, m}});
            return;
        }
    });
    singleton_pass(leaf, used, groups);
    return groups;
}

std::vector<VoxelGroup> group_strict(const LeafNode& leaf) {
    require_active(leaf);
    std::array<bool, 512> used{};
    std::vector<VoxelGroup> groups;
    block_pass(leaf, used, groups);
    singleton_pass(leaf, used, groups);
    return groups;
}

std::optional<Gaussian> gaussian_from_group(const LeafNode& leaf, const VoxelGroup& group,
                                            const GridTransform& xform, const LodConfig& cfg) {
    if (group.members.empty()) return std::nullopt;
    Vec3d sum_center{0, 0, 0};
    Coord lo{8, 8, 8}, hi{-1, -1, -1};
    double sum = 0.0;
    for (uint32_t n : group.members) {
        const Coord c = LeafNode::local_coord(n);
        sum_center += c.as_vec() + Vec3d{0.5, 0.5, 0.5};
        for (int a = 0; a < 3; ++a) {
            lo[a] = std::min(lo[a], c[a]);
            hi[a] = std::max(hi[a], c[a]);
        }
        sum += leaf.value(n);
    }
    const double count = double(group.members.size());
    const Vec3d half = (hi - lo + Coord{1, 1, 1}).as_vec() * 0.5;
    return make_gaussian(leaf.origin().as_vec() + sum_center / count, half, sum / count, xform, cfg);
}

std::vector<Gaussian> fit_dense_leaf(const LeafNode& leaf, int block, const GridTransform& xform,
                                     const LodConfig& cfg) {
    if (!leaf.is_dense()) throw Error(ErrorCode::NotDense, "fit_dense_leaf requires a dense leaf");
    if (block != 2 && block != 4 && block != 8) throw Error(ErrorCode::InvalidArgument, "block must be 2, 4 or 8");
    std::vector<Gaussian> out;
    const int per_axis = 8 / block;
    out.reserve(size_t(per_axis * per_axis * per_axis));
    const double half = 0.5 * block;
    for (int bx = 0; bx < per_axis; ++bx)
        for (int by = 0; by < per_axis; ++by)
            for (int bz = 0; bz < per_axis; ++bz) {
                double sum = 0.0;
                for (int x = bx * block; x < (bx + 1) * block; ++x)
                    for (int y = by * block; y < (by + 1) * block; ++y)
                        for (int z = bz * block; z < (bz + 1) * block; ++z) sum += leaf.value(LeafNode::offset(x, y, z));
                const Vec3d center = leaf.origin().as_vec() + Vec3d{bx * block + half, by * block + half, bz * block + half};
                if (auto g = make_gaussian(center, {half, half, half}, sum / double(block * block * block), xform, cfg))
                    out.push_back(*g);
            }
    return out;
}

std::vector<Gaussian> fit_sparse_smart(const LeafNode& leaf, const GridTransform& xform, const LodConfig& cfg) {
    return fit_groups(leaf, group_smart(leaf), xform, cfg);
}

std::vector<Gaussian> fit_sparse_strict(const LeafNode& leaf, const GridTransform& xform, const LodConfig& cfg) {
    return fit_groups(leaf, group_strict(leaf), xform, cfg);
}

std::vector<Gaussian> fit_sparse_single(const LeafNode& leaf, const GridTransform& xform, const LodConfig& cfg) {
    require_active(leaf);
    Coord lo{8, 8, 8}, hi{0, 0, 0};
    double sum = 0.0;
    leaf.for_each_active([&](const Coord& c, float v) {
        for (int a = 0; a < 3; ++a) {
            lo[a] = std::min(lo[a], c[a]);
            hi[a] = std::max(hi[a], c[a] + 1);
        }
        sum += v;
    });
    const Vec3d center = leaf.origin().as_vec() + (lo.as_vec() + hi.as_vec()) * 0.5;
    const Vec3d half = (hi - lo).as_vec() * 0.5;
    std::vector<Gaussian> out;
    if (auto g = make_gaussian(center, half, sum / double(leaf.active_count()), xform, cfg)) out.push_back(*g);
    return out;
}

std::optional<Gaussian> fit_tile(const CoordBox& box, float value, const GridTransform& xform, const LodConfig& cfg) {
    const Vec3d lo = box.min.as_vec(), hi = box.max.as_vec();
    return make_gaussian((lo + hi) * 0.5, (hi - lo) * 0.5, value, xform, cfg);
}

GaussianModel fit_grid(const SparseGrid& grid, const LodConfig& cfg, FitStats* stats) {
    cfg.validate();
    if (grid.empty()) throw Error(ErrorCode::EmptyGrid, "cannot fit an empty grid");
    ++g_fit_invocations;
    GaussianModel m;
    m.source_label = grid.name();
    FitStats local;
    fit_grid_into(grid, cfg, m.gaussians, local);
    finish_model(m, grid.world_aabb(), cfg);
    if (stats) *stats = local;
    return m;
}

GaussianModel fit_points(const PointGrid& pg, const LodConfig& cfg) {
    cfg.validate();
    if (pg.points.size() == 0) throw Error(ErrorCode::EmptyPointSet, "no points");
    ++g_fit_invocations;
    double max_mag = 0.0;
    for (double v : pg.points.velocity_magnitudes) max_mag = std::max(max_mag, v);
    GaussianModel m;
    m.source_label = "points";
    const double r = std::max(0.5 * pg.voxel_size, cfg.effective_radius_min(pg.grid.transform().voxel_size));
    for (size_t i = 0; i < pg.points.size(); ++i) {
        const double opacity = max_mag > 0.0 ? pg.points.velocity_magnitudes[i] / max_mag : 0.0;
        if (!(opacity > cfg.opacity_threshold)) continue;
        Gaussian g;
        g.center = Vec3f(pg.points.positions[i]);
        g.radius = Vec3f(Vec3d{r, r, r});
        g.opacity = float(opacity);
        m.gaussians.push_back(g);
    }
    finish_model(m, pg.grid.world_aabb(), cfg);
    return m;
}

GaussianModel fit_amr(const AmrStack& stack, const LodConfig& cfg, std::vector<size_t>* per_level) {
    cfg.validate();
    validate_levels(stack);
    ++g_fit_invocations;
    GaussianModel m;
    m.source_label = "amr";
    Aabb scene;
    if (per_level) per_level->clear();
    for (const SparseGrid& level : stack.levels) {
        const size_t before = m.gaussians.size();
        if (!level.empty()) {
            FitStats s;
            fit_grid_into(level, cfg, m.gaussians, s);
            scene.extend(level.world_aabb());
        }
        if (per_level) per_level->push_back(m.gaussians.size() - before);
    }
    if (scene.empty()) throw Error(ErrorCode::EmptyGrid, "AMR stack has no active data");
    finish_model(m, scene, cfg);
    return m;
}

uint64_t fit_invocation_count() { return g_fit_invocations.load(); }

} // namespace voxgauss
