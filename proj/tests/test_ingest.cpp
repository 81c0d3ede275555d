// Copyright 2026 The voxgauss Authors
// SPDX-License-Identifier: Apache-2.0

#include <voxgauss/ingest.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace voxgauss;

namespace {

void expect_same_grid(const SparseGrid& a, const SparseGrid& b) {
    EXPECT_EQ(a.background(), b.background());
    EXPECT_EQ(a.transform(), b.transform());
    const auto la = a.leaves(), lb = b.leaves();
    ASSERT_EQ(la.size(), lb.size());
    for (size_t i = 0; i < la.size(); ++i) {
        EXPECT_EQ(la[i]->origin(), lb[i]->origin());
        EXPECT_EQ(la[i]->value_mask(), lb[i]->value_mask());
        for (uint32_t n = 0; n < LeafNode::kSize; ++n)
            if (la[i]->is_active(n)) EXPECT_EQ(la[i]->value(n), lb[i]->value(n));
    }
    const auto ta = a.tiles(), tb = b.tiles();
    ASSERT_EQ(ta.size(), tb.size());
    for (size_t i = 0; i < ta.size(); ++i) {
        EXPECT_EQ(ta[i].index_box, tb[i].index_box);
        EXPECT_EQ(ta[i].value, tb[i].value);
        EXPECT_EQ(ta[i].level, tb[i].level);
    }
}

SparseGrid round_trip(const SparseGrid& g) {
    std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
    write_svol(g, ss);
    return read_svol(ss);
}

} // namespace

TEST(Svol, EmptyGridRoundTrip) {
    SparseGrid g(0.25f, GridTransform{{0.5, 0.5, 0.5}, {1, 2, 3}});
    const SparseGrid r = round_trip(g);
    EXPECT_TRUE(r.empty());
    EXPECT_EQ(r.background(), 0.25f);
    EXPECT_EQ(r.transform(), g.transform());
}

TEST(Svol, TileAndSparseLeafRoundTrip) {
    SparseGrid g;
    g.set_tile(4, {128, 0, 0}, 0.7f);
    g.set_voxel({1, 2, 3}, 0.5f);
    g.set_voxel({4, 2, 3}, 0.25f);
    expect_same_grid(g, round_trip(g));
}

TEST(Svol, RandomGridsRoundTrip) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        std::uniform_int_distribution<int> c(-2000, 2000);
        std::uniform_real_distribution<float> v(-5.0f, 5.0f);
        SparseGrid g(v(rng), GridTransform{{0.1 + trial, 0.2, 0.3}, {double(trial), -1.0, 0.5}});
        for (int i = 0; i < 200; ++i) g.set_voxel({c(rng), c(rng), c(rng)}, v(rng));
        for (int i = 0; i < 3; ++i) g.set_tile(3, {c(rng), c(rng), c(rng)}, v(rng));
        expect_same_grid(g, round_trip(g));
    }
}

TEST(Svol, CorruptMagic) {
    SparseGrid g;
    g.set_voxel({0, 0, 0}, 1.0f);
    std::stringstream ss;
    write_svol(g, ss);
    std::string bytes = ss.str();
    bytes[0] = 'X';
    std::istringstream in(bytes);
    try {
        read_svol(in);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::BadMagic);
    }
}

TEST(Svol, TruncatedAndVersion) {
    SparseGrid g;
    g.set_voxel({0, 0, 0}, 1.0f);
    std::stringstream ss;
    write_svol(g, ss);
    const std::string bytes = ss.str();
    std::istringstream cut(bytes.substr(0, bytes.size() - 10));
    try {
        read_svol(cut);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::TruncatedStream);
    }
    std::string bad = bytes;
    bad[4] = 9;
    std::istringstream ver(bad);
    try {
        read_svol(ver);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::VersionMismatch);
    }
}

TEST(RawImport, AllZeroIsEmpty) {
    std::vector<float> data(8 * 8 * 8, 0.0f);
    EXPECT_TRUE(import_raw_dense({8, 8, 8}, data, 0.0f, {}).empty());
}

TEST(RawImport, SingleValue) {
    std::vector<float> data(8 * 8 * 8, 0.0f);
    data[3 + 8 * (4 + 8 * 5)] = 0.5f;
    const SparseGrid g = import_raw_dense({8, 8, 8}, data, 0.0f, {});
    EXPECT_EQ(g.active_voxel_count(), 1u);
    EXPECT_EQ(g.get_voxel({3, 4, 5}), (VoxelValue{0.5f, true}));
}

TEST(RawImport, MatchesLinearScan) {
    std::mt19937_64 rng(2);
    std::normal_distribution<float> n(0.0f, 1.0f);
    const Coord dims{13, 9, 21};
    std::vector<float> data(size_t(dims.x) * dims.y * dims.z);
    for (float& v : data) v = n(rng);
    const float thr = 0.8f;
    const SparseGrid g = import_raw_dense(dims, data, thr, {});
    uint64_t expected = 0;
    for (int z = 0; z < dims.z; ++z)
        for (int y = 0; y < dims.y; ++y)
            for (int x = 0; x < dims.x; ++x) {
                const float v = data[x + dims.x * (y + dims.y * z)];
                const bool on = std::fabs(v) > thr;
                expected += on;
                const VoxelValue got = g.get_voxel({x, y, z});
                ASSERT_EQ(got.active, on);
                if (on) ASSERT_EQ(got.value, v);
            }
    EXPECT_EQ(g.active_voxel_count(), expected);
}

TEST(RawImport, LengthMismatch) {
    std::vector<float> data(10);
    try {
        import_raw_dense({8, 8, 8}, data, 0.0f, {});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::LengthMismatch);
    }
}

TEST(Xyz, ThreeFourFive) {
    std::istringstream in("0 0 0 3 4 0\n1 2 3 0 0 0\n");
    const PointSet p = parse_xyz(in);
    ASSERT_EQ(p.size(), 2u);
    EXPECT_EQ(p.positions[0], (Vec3d{0, 0, 0}));
    EXPECT_EQ(p.velocity_magnitudes[0], 5.0);
    EXPECT_EQ(p.positions[1], (Vec3d{1, 2, 3}));
    EXPECT_EQ(p.velocity_magnitudes[1], 0.0);
}

TEST(Xyz, CommentsAndBlankLinesSkipped) {
    std::istringstream in("# header\n\n  \n0 0 0 1 0 0 extra\n");
    EXPECT_EQ(parse_xyz(in).size(), 1u);
}

TEST(Xyz, MalformedLineReportsLineNumber) {
    std::istringstream in("0 0 0 1 0 0\n1 2 3 4 5\n");
    try {
        parse_xyz(in);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MalformedLine);
        EXPECT_NE(std::string(e.what()).find('2'), std::string::npos);
    }
    std::istringstream bad("0 0 zero 1 0 0\n");
    EXPECT_THROW(parse_xyz(bad), Error);
}

TEST(Xyz, RandomMagnitudesMatchRecompute) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-100.0, 100.0);
    std::ostringstream text;
    text.precision(17);
    std::vector<std::array<double, 3>> vel;
    for (int i = 0; i < 1000; ++i) {
        const std::array<double, 3> v{u(rng), u(rng), u(rng)};
        vel.push_back(v);
        text << u(rng) << ' ' << u(rng) << ' ' << u(rng) << ' ' << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
    }
    std::istringstream in(text.str());
    const PointSet p = parse_xyz(in);
    ASSERT_EQ(p.size(), 1000u);
    for (size_t i = 0; i < vel.size(); ++i) {
        const double m = std::sqrt(vel[i][0] * vel[i][0] + vel[i][1] * vel[i][1] + vel[i][2] * vel[i][2]);
        EXPECT_NEAR(p.velocity_magnitudes[i], m, 4.0 * m * std::numeric_limits<double>::epsilon());
    }
}

TEST(Xyz, WriteThenParseIsIdentity) {
    PointSet p;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        p.positions.push_back({u(rng), u(rng), u(rng)});
        p.velocity_magnitudes.push_back(u(rng) * 10.0);
    }
    std::stringstream ss;
    write_xyz(p, ss);
    const PointSet q = parse_xyz(ss);
    EXPECT_EQ(q.positions, p.positions);
    EXPECT_EQ(q.velocity_magnitudes, p.velocity_magnitudes);
}

TEST(PointGrid, UnitCubeCorners) {
    PointSet p;
    for (int i = 0; i < 8; ++i) {
        p.positions.push_back({double(i & 1), double((i >> 1) & 1), double((i >> 2) & 1)});
        p.velocity_magnitudes.push_back(1.0);
    }
    const PointGrid pg = build_point_grid(p);
    EXPECT_DOUBLE_EQ(pg.voxel_size, 0.5);
}

TEST(PointGrid, SinglePointFallsBackToUnitVoxel) {
    PointSet p;
    p.positions.push_back({3, 4, 5});
    p.velocity_magnitudes.push_back(1.0);
    const PointGrid pg = build_point_grid(p);
    EXPECT_EQ(pg.voxel_size, 1.0);
    EXPECT_EQ(pg.grid.active_voxel_count(), 1u);
}

TEST(PointGrid, EmptyRejected) {
    try {
        build_point_grid({});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyPointSet);
    }
}

TEST(PointGrid, UniformOccupancyAndBucketing) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PointSet p;
    for (int i = 0; i < 10000; ++i) {
        p.positions.push_back({u(rng), u(rng), u(rng)});
        p.velocity_magnitudes.push_back(1.0);
    }
    const PointGrid pg = build_point_grid(p);
    // Histogram oracle: bucket independently from the returned transform.
    std::map<Coord, int> hist;
    const GridTransform& xf = pg.grid.transform();
    for (const Vec3d& x : p.positions) {
        const Vec3d f = xf.world_to_index(x);
        hist[{int32_t(std::floor(f.x)), int32_t(std::floor(f.y)), int32_t(std::floor(f.z))}]++;
    }
    // Mean occupancy over the voxels spanning the bounding box.
    Vec3d lo{1e9, 1e9, 1e9}, hi{-1e9, -1e9, -1e9};
    for (const Vec3d& x : p.positions) {
        lo = vmin(lo, x);
        hi = vmax(hi, x);
    }
    const Vec3d e = hi - lo;
    const double box_voxels = (e.x * e.y * e.z) / std::pow(pg.voxel_size, 3);
    const double mean = 10000.0 / box_voxels;
    EXPECT_GE(mean, 0.5);
    EXPECT_LE(mean, 2.0);

    std::vector<int> seen(p.size(), 0);
    for (const auto& [c, idx] : pg.buckets) {
        EXPECT_EQ(int(idx.size()), hist[c]);
        EXPECT_EQ(pg.grid.get_voxel(c).value, float(idx.size()));
        const Aabb box = xf.to_world({c, c + Coord{1, 1, 1}});
        for (uint32_t i : idx) {
            seen[i]++;
            EXPECT_TRUE(box.contains(p.positions[i]));
        }
    }
    for (int s : seen) ASSERT_EQ(s, 1);
    EXPECT_EQ(pg.buckets.size(), hist.size());
}

TEST(Synthetic, BlobCenterHoldsMax) {
    const SparseGrid g = gen_synthetic(SyntheticKind::GaussianBlob, {32, 32, 32});
    const float center = g.get_voxel({16, 16, 16}).value;
    for (const LeafNode* leaf : g.leaves())
        leaf->for_each_active([&](const Coord&, float v) { ASSERT_LE(v, center); });
}

TEST(Synthetic, ShellVolumeMatchesAnalytic) {
    const int dim = 64;
    const SparseGrid g = gen_synthetic(SyntheticKind::SphereShell, {dim, dim, dim});
    const SyntheticParams p;
    const double r_out = p.shell_radius * dim * 0.5, r_in = r_out - p.shell_thickness * dim * 0.5;
    const double analytic = 4.0 / 3.0 * std::numbers::pi * (std::pow(r_out, 3) - std::pow(r_in, 3));
    const double count = double(g.active_voxel_count());
    EXPECT_LT(std::fabs(count - analytic) / analytic, 0.10);
}

TEST(Synthetic, DeterministicPerSeed) {
    SyntheticParams p;
    p.seed = 99;
    for (SyntheticKind k :
         {SyntheticKind::GaussianBlob, SyntheticKind::SphereShell, SyntheticKind::Checker, SyntheticKind::WaveletLike}) {
        const SparseGrid a = gen_synthetic(k, {24, 16, 40}, p);
        const SparseGrid b = gen_synthetic(k, {24, 16, 40}, p);
        std::stringstream sa, sb;
        write_svol(a, sa);
        write_svol(b, sb);
        EXPECT_EQ(sa.str(), sb.str()) << to_string(k);
        EXPECT_FALSE(a.empty()) << to_string(k);
    }
}

TEST(Synthetic, BadDims) {
    try {
        gen_synthetic(SyntheticKind::Checker, {4, 8, 8});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::BadDims);
    }
    EXPECT_THROW(gen_synthetic(SyntheticKind::Checker, {8, 8, 2048}), Error);
}

TEST(Particles, DeterministicAndInsideUnitCube) {
    const PointSet a = gen_particles(500, 3), b = gen_particles(500, 3);
    EXPECT_EQ(a.positions, b.positions);
    EXPECT_EQ(a.velocity_magnitudes, b.velocity_magnitudes);
    for (const Vec3d& x : a.positions) EXPECT_TRUE((Aabb{{0, 0, 0}, {1, 1, 1}}.contains(x)));
    EXPECT_NE(gen_particles(500, 4).positions, a.positions);
}

namespace {

SparseGrid filled(const GridTransform& xf, const Coord& lo, const Coord& hi, float v = 1.0f) {
    SparseGrid g(0.0f, xf);
    for (int x = lo.x; x < hi.x; ++x)
        for (int y = lo.y; y < hi.y; ++y)
            for (int z = lo.z; z < hi.z; ++z) g.set_voxel({x, y, z}, v);
    return g;
}

} // namespace

TEST(Amr, EmptyFineLevelLeavesCoarseUnchanged) {
    AmrStack s;
    s.levels.push_back(filled({{1, 1, 1}, {}}, {0, 0, 0}, {4, 4, 4}));
    s.levels.emplace_back(0.0f, GridTransform{{0.5, 0.5, 0.5}, {}});
    const AmrStack m = mask_refined(std::move(s));
    EXPECT_TRUE(m.refinement_masked);
    EXPECT_EQ(m.levels[0].active_voxel_count(), 64u);
}

TEST(Amr, ExactCoverDeactivatesOneVoxel) {
    AmrStack s;
    s.levels.push_back(filled({{1, 1, 1}, {}}, {0, 0, 0}, {3, 3, 3}));
    // Fine voxels of size 0.5 covering coarse voxel (1,1,1) = [1,2)^3.
    s.levels.push_back(filled({{0.5, 0.5, 0.5}, {}}, {2, 2, 2}, {4, 4, 4}));
    const AmrStack m = mask_refined(std::move(s));
    EXPECT_EQ(m.levels[0].active_voxel_count(), 26u);
    EXPECT_FALSE(m.levels[0].get_voxel({1, 1, 1}).active);
    EXPECT_TRUE(m.levels[0].get_voxel({0, 1, 1}).active);
    EXPECT_EQ(m.levels[1].active_voxel_count(), 8u);
}

TEST(Amr, PartialCoverKeepsVoxel) {
    AmrStack s;
    s.levels.push_back(filled({{1, 1, 1}, {}}, {0, 0, 0}, {2, 2, 2}));
    s.levels.push_back(filled({{0.5, 0.5, 0.5}, {}}, {0, 0, 0}, {2, 2, 1}));
    const AmrStack m = mask_refined(std::move(s));
    EXPECT_EQ(m.levels[0].active_voxel_count(), 8u);
}

TEST(Amr, UnorderedLevelsRejected) {
    AmrStack s;
    s.levels.push_back(filled({{0.5, 0.5, 0.5}, {}}, {0, 0, 0}, {2, 2, 2}));
    s.levels.push_back(filled({{1, 1, 1}, {}}, {0, 0, 0}, {2, 2, 2}));
    try {
        mask_refined(std::move(s));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnorderedLevels);
    }
}

TEST(Amr, MaskIsIdempotent) {
    AmrStack once = mask_refined(gen_amr_stack(3, 16));
    const uint64_t c0 = once.levels[0].active_voxel_count(), c1 = once.levels[1].active_voxel_count();
    once.refinement_masked = false;
    const AmrStack twice = mask_refined(std::move(once));
    EXPECT_EQ(twice.levels[0].active_voxel_count(), c0);
    EXPECT_EQ(twice.levels[1].active_voxel_count(), c1);
}

TEST(Amr, TwoLevelStackCoverage) {
    // Two-level case where every deactivated coarse voxel must be exactly the
    // set whose 8 children are all active at the fine level.
    const AmrStack raw = gen_amr_stack(2, 16);
    const AmrStack m = mask_refined(gen_amr_stack(2, 16));
    const SparseGrid& coarse = raw.levels[0];
    const SparseGrid& fine = raw.levels[1];
    for (const LeafNode* leaf : coarse.leaves()) {
        leaf->for_each_active([&](const Coord& local, float) {
            const Coord c = leaf->origin() + local;
            const Vec3d lo = coarse.transform().index_to_world(c.as_vec());
            const Vec3d f = fine.transform().world_to_index(lo);
            const Coord base{int32_t(std::lround(f.x)), int32_t(std::lround(f.y)), int32_t(std::lround(f.z))};
            bool all = true;
            for (int k = 0; k < 8; ++k)
                all = all && fine.get_voxel(base + Coord{k & 1, (k >> 1) & 1, (k >> 2) & 1}).active;
            ASSERT_EQ(m.levels[0].get_voxel(c).active, !all) << c.x << "," << c.y << "," << c.z;
        });
    }
}
