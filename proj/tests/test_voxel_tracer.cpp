// Copyright 2026 The voxgauss Authors
// SPDX-License-Identifier: Apache-2.0

#include <voxgauss/ingest.hpp>
#include <voxgauss/voxel_tracer.hpp>

#include <oracles.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace voxgauss;
using namespace voxgauss::testing;

namespace {

Ray make_ray(const Vec3d& o, const Vec3d& d) {
    Ray r;
    r.origin = o;
    r.direction = normalize(d);
    return r;
}

} // namespace

TEST(DdaMarch, AxisAlignedUnitVoxel) {
    SparseGrid g;
    g.set_voxel({0, 0, 0}, 1.0f);
    const MarchResult r = dda_march(make_ray({0.5, 0.5, -3}, {0, 0, 1}), g, MarchConfig{});
    EXPECT_NEAR(r.T, 1.0, 1e-12);
    EXPECT_TRUE(r.hit_any);
    EXPECT_EQ(r.cells_visited, 1u);
}

TEST(DdaMarch, DiagonalUnitVoxel) {
    SparseGrid g;
    g.set_voxel({0, 0, 0}, 1.0f);
    const MarchResult r = dda_march(make_ray({-1, -1, -1}, {1, 1, 1}), g, MarchConfig{});
    EXPECT_NEAR(r.T, std::sqrt(3.0), 1e-12);
}

TEST(DdaMarch, MissAndDensityScale) {
    SparseGrid g;
    g.set_voxel({0, 0, 0}, 2.0f);
    EXPECT_FALSE(dda_march(make_ray({5, 5, -3}, {0, 0, 1}), g, MarchConfig{}).hit_any);
    MarchConfig cfg;
    cfg.density_scale = 0.25;
    EXPECT_NEAR(dda_march(make_ray({0.5, 0.5, -3}, {0, 0, 1}), g, cfg).T, 0.5, 1e-12);
}

TEST(DdaMarch, EmptyGrid) {
    const MarchResult r = dda_march(make_ray({0, 0, 0}, {0, 0, 1}), SparseGrid{}, MarchConfig{});
    EXPECT_EQ(r.T, 0.0);
    EXPECT_FALSE(r.hit_any);
}

TEST(DdaMarch, MatchesBruteForceOnRandomGrids) {
    std::mt19937_64 rng(60);
    for (int trial = 0; trial < 8; ++trial) {
        const GridTransform xf{{0.5 + 0.1 * trial, 0.75, 1.25}, {-3.0 + trial, 1.0, -2.0}};
        SparseGrid g(0.0f, xf);
        std::uniform_int_distribution<int> c(-40, 200);
        std::uniform_real_distribution<float> v(0.05f, 2.0f);
        for (int i = 0; i < 1500; ++i) g.set_voxel({c(rng), c(rng) / 4, c(rng)}, v(rng));
        if (trial % 2) g.set_tile(3, {64, 8, 16}, 0.3f);
        if (trial == 3) g.set_tile(4, {-128, 0, 0}, 0.05f);
        const Aabb box = g.world_aabb();
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int k = 0; k < 60; ++k) {
            const Vec3d target = box.lo + mul(box.extent(), Vec3d{u(rng), u(rng), u(rng)});
            Ray r;
            r.direction = random_direction(rng);
            if (k % 10 == 0) r.direction = Vec3d{0, 0, 0}, r.direction[k % 3] = 1.0;
            r.origin = target - r.direction * (2.0 * length(box.extent()));
            const double ref = voxel_bruteforce(r, g);
            const MarchResult got = dda_march(r, g, MarchConfig{});
            ASSERT_NEAR(got.T, ref, 1e-9 * (1.0 + ref)) << "trial " << trial << " ray " << k;
            ASSERT_EQ(got.hit_any, ref > 0.0);
        }
    }
}

TEST(DdaMarch, RayStartingInsideGrid) {
    SparseGrid g;
    for (int z = 0; z < 10; ++z) g.set_voxel({0, 0, z}, 1.0f);
    Ray r = make_ray({0.5, 0.5, 3.25}, {0, 0, 1});
    EXPECT_NEAR(dda_march(r, g, MarchConfig{}).T, 6.75, 1e-12);
    r.t_max = 2.0;
    EXPECT_NEAR(dda_march(r, g, MarchConfig{}).T, 2.0, 1e-12);
}

TEST(DdaMarch, ConstantBoxChord) {
    SparseGrid g(0.0f, GridTransform{{0.1, 0.1, 0.1}, {0, 0, 0}});
    for (int x = 3; x < 21; ++x)
        for (int y = 2; y < 9; ++y)
            for (int z = 5; z < 30; ++z) g.set_voxel({x, y, z}, 0.8f);
    const Aabb box = g.world_aabb();
    std::mt19937_64 rng(61);
    for (int k = 0; k < 100; ++k) {
        Ray r;
        r.direction = random_direction(rng);
        r.origin = box.center() - r.direction * 10.0 + Vec3d{0.01 * k - 0.5, 0.003 * k, 0.0};
        double a, b;
        const double chord = segment_box(r, box.lo, box.hi, 0.0, 1e30, a, b) ? b - a : 0.0;
        EXPECT_NEAR(dda_march(r, g, MarchConfig{}).T, double(0.8f) * chord, 1e-9);
    }
}

TEST(DdaMarch, FixedStepConverges) {
    const SparseGrid g = gen_synthetic(SyntheticKind::GaussianBlob, {32, 32, 32});
    const Ray r = make_ray({-0.5, 0.45, 0.52}, {1, 0.05, 0.02});
    const double exact = dda_march(r, g, MarchConfig{}).T;
    MarchConfig fs;
    fs.step_mode = StepMode::FixedStep;
    fs.fixed_step = 1e-4;
    EXPECT_NEAR(dda_march(r, g, fs).T, exact, 1e-3 * exact);
    fs.fixed_step = 0.0;
    EXPECT_THROW(dda_march(r, g, fs), Error);
}

TEST(DdaMarch, MultiGridSums) {
    SparseGrid a, b(0.0f, GridTransform{{0.5, 0.5, 0.5}, {4, 0, 0}});
    a.set_voxel({0, 0, 0}, 1.0f);
    b.set_voxel({0, 0, 0}, 3.0f);
    const Ray r = make_ray({-1, 0.25, 0.25}, {1, 0, 0});
    const MarchResult m = dda_march(r, std::vector<const SparseGrid*>{&a, &b}, MarchConfig{});
    EXPECT_NEAR(m.T, 1.0 + 1.5, 1e-12);
}

TEST(RenderReference, EmptyGridIsBackground) {
    SparseGrid g;
    Camera cam;
    cam.width = cam.height = 8;
    Film film(8, 8);
    ReferenceOptions opts;
    opts.background = {0.5f, 0.25f, 0.0f};
    render_reference(g, cam, film, tf_gray(), MarchConfig{}, opts);
    for (size_t i = 0; i < film.pixel_count(); ++i) {
        ASSERT_EQ(film.accum[3 * i], 0.5f);
        ASSERT_EQ(film.accum[3 * i + 1], 0.25f);
    }
}

TEST(RenderReference, DeterministicAndSpotChecked) {
    const SparseGrid g = gen_synthetic(SyntheticKind::SphereShell, {32, 32, 32});
    const Camera cam = default_camera(g.world_aabb(), 48, 40);
    Film a(48, 40), b(48, 40);
    const TransferFunction tf = tf_bluewhite();
    render_reference(g, cam, a, tf, MarchConfig{});
    render_reference(g, cam, b, tf, MarchConfig{});
    EXPECT_EQ(a.accum, b.accum);
    std::mt19937_64 rng(62);
    std::uniform_int_distribution<int> px(0, 47), py(0, 39);
    for (int k = 0; k < 16; ++k) {
        const int x = px(rng), y = py(rng);
        const MarchResult m = dda_march(cam.generate_ray(x, y), g, MarchConfig{});
        const Rgb c = shade(m.T, m.hit_any, tf, {0, 0, 0});
        const size_t i = size_t(y) * 48 + size_t(x);
        EXPECT_EQ(a.accum[3 * i], c.x);
        EXPECT_EQ(a.accum[3 * i + 1], c.y);
        EXPECT_EQ(a.accum[3 * i + 2], c.z);
    }
}
