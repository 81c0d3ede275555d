// Copyright 2026 The voxgauss Authors
// SPDX-License-Identifier: Apache-2.0

#include <voxgauss/ingest.hpp>

#include "binary_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace voxgauss {

using detail::get_le;
using detail::put_le;

namespace {

constexpr char kSvolMagic[4] = {'S', 'V', 'O', 'L'};

void put_coord(std::ostream& os, const Coord& c) {
    put_le<int32_t>(os, c.x);
    put_le<int32_t>(os, c.y);
    put_le<int32_t>(os, c.z);
}

Coord get_coord(std::istream& is) {
    Coord c;
    c.x = get_le<int32_t>(is);
    c.y = get_le<int32_t>(is);
    c.z = get_le<int32_t>(is);
    return c;
}

bool aligned_to(const Coord& c, int32_t size) { return c.aligned(size) == c; }

} // namespace

void write_svol(const SparseGrid& grid, std::ostream& sink) {
    const auto leaves = grid.leaves();
    const auto tiles = grid.tiles();
    sink.write(kSvolMagic, 4);
    put_le<uint32_t>(sink, kSvolVersion);
    put_le<float>(sink, grid.background());
    for (int a = 0; a < 3; ++a) put_le<double>(sink, grid.transform().voxel_size[a]);
    for (int a = 0; a < 3; ++a) put_le<double>(sink, grid.transform().origin[a]);
    put_le<uint32_t>(sink, uint32_t(leaves.size()));
    put_le<uint32_t>(sink, uint32_t(tiles.size()));
    for (const LeafNode* leaf : leaves) {
        put_coord(sink, leaf->origin());
        for (uint64_t w : leaf->value_mask().words()) put_le<uint64_t>(sink, w);
        for (float v : leaf->values()) put_le<float>(sink, v);
    }
    for (const TileInfo& t : tiles) {
        put_le<uint32_t>(sink, uint32_t(t.level));
        put_coord(sink, t.index_box.min);
        put_le<float>(sink, t.value);
    }
    if (!sink) throw Error(ErrorCode::IoFailure, "failed to write SVOL stream");
}

SparseGrid read_svol(std::istream& source) {
    char magic[4];
    detail::get_bytes(source, magic, 4);
    if (!std::equal(magic, magic + 4, kSvolMagic)) throw Error(ErrorCode::BadMagic, "not an SVOL stream");
    const uint32_t version = get_le<uint32_t>(source);
    if (version != kSvolVersion)
        throw Error(ErrorCode::VersionMismatch, "unsupported SVOL version " + std::to_string(version));
    const float background = get_le<float>(source);
    GridTransform xform;
    for (int a = 0; a < 3; ++a) xform.voxel_size[a] = get_le<double>(source);
    for (int a = 0; a < 3; ++a) xform.origin[a] = get_le<double>(source);
    SparseGrid grid(background, xform);
    const uint32_t leaf_count = get_le<uint32_t>(source);
    const uint32_t tile_count = get_le<uint32_t>(source);
    for (uint32_t i = 0; i < leaf_count; ++i) {
        const Coord origin = get_coord(source);
        if (!aligned_to(origin, 8)) throw Error(ErrorCode::InvalidArgument, "leaf origin not aligned to 8");
        LeafNode leaf(origin, background);
        for (uint64_t& w : leaf.value_mask().words()) w = get_le<uint64_t>(source);
        for (float& v : leaf.values()) v = get_le<float>(source);
        grid.insert_leaf(leaf);
    }
    for (uint32_t i = 0; i < tile_count; ++i) {
        const uint32_t level = get_le<uint32_t>(source);
        const Coord origin = get_coord(source);
        const float value = get_le<float>(source);
        const int32_t size = level == 3 ? 8 : level == 4 ? 128 : level == 5 ? 4096 : 0;
        if (size == 0) throw Error(ErrorCode::InvalidArgument, "bad tile level " + std::to_string(level));
        if (!aligned_to(origin, size)) throw Error(ErrorCode::InvalidArgument, "tile origin not aligned");
        grid.set_tile(int(level), origin, value);
    }
    return grid;
}

void write_svol_file(const SparseGrid& grid, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorCode::IoFailure, "cannot open " + path);
    write_svol(grid, os);
}

SparseGrid read_svol_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorCode::IoFailure, "cannot open " + path);
    SparseGrid g = read_svol(is);
    g.set_name(path);
    return g;
}

SparseGrid import_raw_dense(const Coord& dims, std::span<const float> data, float activity_threshold,
                            const GridTransform& xform) {
    if (dims.x <= 0 || dims.y <= 0 || dims.z <= 0) throw Error(ErrorCode::BadDims, "dims must be positive");
    const size_t expected = size_t(dims.x) * size_t(dims.y) * size_t(dims.z);
    if (data.size() != expected)
        throw Error(ErrorCode::LengthMismatch,
                    "expected " + std::to_string(expected) + " values, got " + std::to_string(data.size()));
    SparseGrid grid(0.0f, xform);
    size_t i = 0;
    for (int32_t z = 0; z < dims.z; ++z)
        for (int32_t y = 0; y < dims.y; ++y)
            for (int32_t x = 0; x < dims.x; ++x, ++i)
                if (std::fabs(data[i]) > activity_threshold) grid.set_voxel({x, y, z}, data[i]);
    return grid;
}

// ---------------------------------------------------------------------------

PointSet parse_xyz(std::istream& text) {
    PointSet out;
    std::string line;
    size_t line_no = 0;
    while (std::getline(text, line)) {
        ++line_no;
        const char* p = line.data();
        const char* end = p + line.size();
        auto skip_ws = [&] {
            while (p < end && (*p == ' ' || *p == '\t' || *p == '\r' || *p == ',')) ++p;
        };
        skip_ws();
        if (p == end || *p == '#') continue;
        double f[6];
        for (int k = 0; k < 6; ++k) {
            skip_ws();
            if (*p == '+') ++p;
            auto [next, ec] = std::from_chars(p, end, f[k]);
            if (ec != std::errc() || next == p)
                throw Error(ErrorCode::MalformedLine, "line " + std::to_string(line_no) + ": expected 6 numbers");
            p = next;
        }
        out.positions.push_back({f[0], f[1], f[2]});
        out.velocity_magnitudes.push_back(std::sqrt(f[3] * f[3] + f[4] * f[4] + f[5] * f[5]));
    }
    return out;
}

PointSet read_xyz_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorCode::IoFailure, "cannot open " + path);
    return parse_xyz(is);
}

void write_xyz(const PointSet& points, std::ostream& sink) {
    sink << std::setprecision(17);
    for (size_t i = 0; i < points.size(); ++i) {
        const Vec3d& p = points.positions[i];
        sink << p.x << ' ' << p.y << ' ' << p.z << ' ' << points.velocity_magnitudes[i] << " 0 0\n";
    }
}

PointGrid build_point_grid(PointSet points) {
    if (points.positions.empty()) throw Error(ErrorCode::EmptyPointSet, "no points");
    if (points.velocity_magnitudes.size() != points.positions.size())
        throw Error(ErrorCode::LengthMismatch, "positions and velocities differ in length");
    Aabb box;
    for (const Vec3d& p : points.positions) box.extend(p);
    const Vec3d e = box.extent();
    const double volume = e.x * e.y * e.z;
    double vs = std::cbrt(volume / double(points.size()));
    // Degenerate (single point, coplanar) boxes have no meaningful volume.
    if (!(vs > std::numeric_limits<double>::epsilon() * std::max(1.0, max_component(e))) || !std::isfinite(vs))
        vs = 1.0;

    GridTransform xform{{vs, vs, vs}, box.lo};
    PointGrid pg{SparseGrid(0.0f, xform, "points"), {}, vs, {}};
    for (uint32_t i = 0; i < points.size(); ++i) pg.buckets[xform.world_to_coord(points.positions[i])].push_back(i);
    for (const auto& [c, idx] : pg.buckets) pg.grid.set_voxel(c, float(idx.size()));
    pg.points = std::move(points);
    return pg;
}

PointSet gen_particles(size_t n, uint64_t seed) {
    if (n == 0) throw Error(ErrorCode::EmptyPointSet, "particle count must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.2, 0.8);
    std::uniform_real_distribution<double> spread(0.04, 0.12);
    struct Cluster {
        Vec3d c;
        double s;
    };
    std::vector<Cluster> clusters(4);
    for (Cluster& k : clusters) k = {{uni(rng), uni(rng), uni(rng)}, spread(rng)};
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_int_distribution<size_t> pick(0, clusters.size() - 1);
    PointSet out;
    out.positions.reserve(n);
    out.velocity_magnitudes.reserve(n);
    while (out.size() < n) {
        const Cluster& k = clusters[pick(rng)];
        const Vec3d off{normal(rng) * k.s, normal(rng) * k.s, normal(rng) * k.s};
        const Vec3d p = k.c + off;
        if (p.x < 0 || p.y < 0 || p.z < 0 || p.x > 1 || p.y > 1 || p.z > 1) continue;
        out.positions.push_back(p);
        out.velocity_magnitudes.push_back(std::exp(-0.5 * dot(off, off) / (k.s * k.s)));
    }
    return out;
}

// ---------------------------------------------------------------------------

SyntheticKind parse_synthetic_kind(const std::string& name) {
    if (name == "sphere_shell" || name == "shell") return SyntheticKind::SphereShell;
    if (name == "gaussian_blob" || name == "blob") return SyntheticKind::GaussianBlob;
    if (name == "checker") return SyntheticKind::Checker;
    if (name == "wavelet_like" || name == "wavelet") return SyntheticKind::WaveletLike;
    throw Error(ErrorCode::UnknownDataset, "unknown synthetic kind '" + name + "'");
}

const char* to_string(SyntheticKind kind) {
    switch (kind) {
    case SyntheticKind::SphereShell: return "sphere_shell";
    case SyntheticKind::GaussianBlob: return "gaussian_blob";
    case SyntheticKind::Checker: return "checker";
    case SyntheticKind::WaveletLike: return "wavelet_like";
    }
    return "?";
}

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

double unit_hash(uint64_t seed, int32_t x, int32_t y, int32_t z) {
    uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ uint64_t(uint32_t(x)));
    h = splitmix64(h ^ uint64_t(uint32_t(y)));
    h = splitmix64(h ^ uint64_t(uint32_t(z)));
    return double(h >> 11) * 0x1.0p-53;
}

} // namespace

SparseGrid gen_synthetic(SyntheticKind kind, const Coord& dims, const SyntheticParams& params) {
    for (int a = 0; a < 3; ++a)
        if (dims[a] < 8 || dims[a] > 1024) throw Error(ErrorCode::BadDims, "dims must lie in [8, 1024]");
    const double vs = params.voxel_size > 0.0 ? params.voxel_size : 1.0 / double(max_component(Vec3d(dims.as_vec())));
    SparseGrid grid(0.0f, GridTransform{{vs, vs, vs}, {0, 0, 0}}, to_string(kind));
    const double min_dim = double(std::min({dims.x, dims.y, dims.z}));

    // Per-kind value at voxel center p (index space); returns <= cutoff for inactive.
    const Vec3d half = dims.as_vec() * 0.5;
    const Vec3d blob_center{std::floor(half.x) + 0.5, std::floor(half.y) + 0.5, std::floor(half.z) + 0.5};
    const double sigma = params.sigma_fraction * min_dim;
    const double r_out = params.shell_radius * min_dim * 0.5;
    const double r_in = r_out - params.shell_thickness * min_dim * 0.5;
    const int cell = std::max(1, params.checker_cell);
    const uint64_t fseed = splitmix64(params.seed ^ 0xA5A5A5A5ull);
    const double fx = 1.0 + 3.0 * unit_hash(fseed, 1, 0, 0), fy = 1.0 + 3.0 * unit_hash(fseed, 0, 1, 0),
                 fz = 1.0 + 3.0 * unit_hash(fseed, 0, 0, 1);
    constexpr double two_pi = 2.0 * std::numbers::pi;

    for (int32_t x = 0; x < dims.x; ++x)
        for (int32_t y = 0; y < dims.y; ++y)
            for (int32_t z = 0; z < dims.z; ++z) {
                const Vec3d p{x + 0.5, y + 0.5, z + 0.5};
                double v = 0.0;
                bool active = false;
                switch (kind) {
                case SyntheticKind::GaussianBlob: {
                    const Vec3d d = p - blob_center;
                    v = params.amplitude * std::exp(-dot(d, d) / (2.0 * sigma * sigma));
                    active = std::fabs(v) > params.cutoff;
                    break;
                }
                case SyntheticKind::SphereShell: {
                    const double r = length(p - half);
                    v = params.amplitude;
                    active = r >= r_in && r <= r_out;
                    break;
                }
                case SyntheticKind::Checker:
                    v = params.amplitude;
                    active = ((x / cell + y / cell + z / cell) & 1) == 0;
                    break;
                case SyntheticKind::WaveletLike: {
                    const Vec3d u = div(p, dims.as_vec());
                    const double wave = std::sin(two_pi * fx * u.x) * std::sin(two_pi * fy * u.y) *
                                        std::cos(two_pi * fz * u.z);
                    const double noise = 2.0 * unit_hash(params.seed, x, y, z) - 1.0;
                    v = params.amplitude * (0.5 + 0.35 * wave + 0.15 * noise);
                    active = std::fabs(v) > params.cutoff + 0.5 * params.amplitude;
                    break;
                }
                }
                if (active) grid.set_voxel({x, y, z}, float(v));
            }
    return grid;
}

// ---------------------------------------------------------------------------

void validate_levels(const AmrStack& stack) {
    for (size_t k = 1; k < stack.levels.size(); ++k) {
        const Vec3d& coarse = stack.levels[k - 1].transform().voxel_size;
        const Vec3d& fine = stack.levels[k].transform().voxel_size;
        if (!(fine.x < coarse.x && fine.y < coarse.y && fine.z < coarse.z))
            throw Error(ErrorCode::UnorderedLevels, "level " + std::to_string(k) + " is not finer than level " +
                                                        std::to_string(k - 1));
    }
}

namespace {

constexpr double kCellEps = 1e-9;

/// True if every point of `box` lies in an active voxel of some level in
/// [first, levels.size()).
bool covered_by_finer(const Aabb& box, std::span<const SparseGrid> levels, std::span<const Aabb> bounds) {
    if (levels.empty()) return false;
    const SparseGrid& lvl = levels.front();
    const Aabb& lb = bounds.front();
    const bool touches = box.lo.x < lb.hi.x && lb.lo.x < box.hi.x && box.lo.y < lb.hi.y && lb.lo.y < box.hi.y &&
                         box.lo.z < lb.hi.z && lb.lo.z < box.hi.z;
    if (!touches) return covered_by_finer(box, levels.subspan(1), bounds.subspan(1));

    const GridTransform& xf = lvl.transform();
    const Vec3d flo = xf.world_to_index(box.lo), fhi = xf.world_to_index(box.hi);
    Coord c0, c1;
    for (int a = 0; a < 3; ++a) {
        c0[a] = int32_t(std::floor(flo[a] + kCellEps));
        c1[a] = int32_t(std::ceil(fhi[a] - kCellEps)); // exclusive
    }
    for (int32_t x = c0.x; x < c1.x; ++x)
        for (int32_t y = c0.y; y < c1.y; ++y)
            for (int32_t z = c0.z; z < c1.z; ++z) {
                if (lvl.get_voxel({x, y, z}).active) continue;
                const Coord c{x, y, z};
                const Aabb piece = box.intersect(xf.to_world({c, c + Coord{1, 1, 1}}));
                if (!covered_by_finer(piece, levels.subspan(1), bounds.subspan(1))) return false;
            }
    return true;
}

} // namespace

AmrStack mask_refined(AmrStack stack) {
    validate_levels(stack);
    const size_t n = stack.levels.size();
    std::vector<Aabb> bounds(n);
    for (size_t k = 0; k < n; ++k)
        if (!stack.levels[k].empty()) bounds[k] = stack.levels[k].world_aabb();

    for (size_t k = 0; k + 1 < n; ++k) {
        SparseGrid& coarse = stack.levels[k];
        if (coarse.empty()) continue;
        const std::span<const SparseGrid> finer(stack.levels.data() + k + 1, n - k - 1);
        const std::span<const Aabb> finer_bounds(bounds.data() + k + 1, n - k - 1);
        Aabb finer_union;
        for (const Aabb& b : finer_bounds) finer_union.extend(b);
        if (finer_union.empty()) continue;

        const GridTransform& xf = coarse.transform();
        std::vector<Coord> doomed;
        auto consider = [&](const Coord& c) {
            const Aabb vbox = xf.to_world({c, c + Coord{1, 1, 1}});
            if (!finer_union.contains(vbox)) return;
            if (covered_by_finer(vbox, finer, finer_bounds)) doomed.push_back(c);
        };
        for (const LeafNode* leaf : coarse.leaves())
            leaf->for_each_active([&](const Coord& local, float) { consider(leaf->origin() + local); });
        for (const TileInfo& t : coarse.tiles()) {
            const Aabb tb = xf.to_world(t.index_box);
            if (tb.intersect(finer_union).empty()) continue;
            for (int32_t x = t.index_box.min.x; x < t.index_box.max.x; ++x)
                for (int32_t y = t.index_box.min.y; y < t.index_box.max.y; ++y)
                    for (int32_t z = t.index_box.min.z; z < t.index_box.max.z; ++z) consider({x, y, z});
        }
        for (const Coord& c : doomed) coarse.deactivate_voxel(c);
    }
    stack.refinement_masked = true;
    return stack;
}

AmrStack gen_amr_stack(int levels, int base_dim, double amplitude) {
    if (levels < 1) throw Error(ErrorCode::InvalidArgument, "need at least one level");
    if (base_dim < 8 || base_dim > 1024) throw Error(ErrorCode::BadDims, "base_dim must lie in [8, 1024]");
    AmrStack stack;
    const Vec3d center{0.5, 0.5, 0.5};
    const double s = 0.18;
    for (int k = 0; k < levels; ++k) {
        const double span = std::ldexp(1.0, -k);
        const double vs = span / base_dim;
        const Vec3d origin = center - Vec3d{span, span, span} * 0.5;
        SparseGrid g(0.0f, GridTransform{{vs, vs, vs}, origin}, "amr_level_" + std::to_string(k));
        for (int32_t x = 0; x < base_dim; ++x)
            for (int32_t y = 0; y < base_dim; ++y)
                for (int32_t z = 0; z < base_dim; ++z) {
                    const Vec3d w = g.transform().index_to_world({x + 0.5, y + 0.5, z + 0.5});
                    const Vec3d d = w - center;
                    const double v = amplitude * std::exp(-dot(d, d) / (2.0 * s * s)) *
                                     (1.0 + 0.3 * std::sin(20.0 * w.x) * std::sin(20.0 * w.y));
                    if (v > 0.02 * amplitude) g.set_voxel({x, y, z}, float(v));
                }
        stack.levels.push_back(std::move(g));
    }
    return stack;
}

} // namespace voxgauss
