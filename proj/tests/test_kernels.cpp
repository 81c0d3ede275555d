// Copyright 2026 The voxgauss Authors
// SPDX-License-Identifier: Apache-2.0

#include <voxgauss/kernels.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

using namespace voxgauss::kernels;

namespace {

struct Soa {
    std::vector<double> v[12];
    explicit Soa(size_t n) {
        for (auto& a : v) a.resize(n);
    }
    GaussianLanes lanes() const {
        return {v[0].data(), v[1].data(), v[2].data(), v[3].data(), v[4].data(), v[5].data(),
                v[6].data(), v[7].data(), v[8].data(), v[9].data(), v[10].data(), v[11].data()};
    }
};

const KernelTable* simd_or_skip() { return avx2_table(); }

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

} // namespace

TEST(Kernels, ActiveTableIsKnown) {
    const std::string name = active().name;
    EXPECT_TRUE(name == "scalar" || name == "avx2") << name;
}

TEST(Kernels, RayGaussiansScalarMatchesAvx2) {
    const KernelTable* simd = simd_or_skip();
    if (!simd) GTEST_SKIP() << "AVX2 unavailable";
    const KernelTable& ref = scalar_table();
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-4.0, 4.0), r(0.05, 2.0);
    std::normal_distribution<double> n(0.0, 1.0);
    const size_t N = 4096;
    Soa s(N);
    for (size_t i = 0; i < N; ++i) {
        const double c[3] = {u(rng), u(rng), u(rng)};
        double rad[3] = {r(rng), r(rng), r(rng)};
        for (int k = 0; k < 3; ++k) {
            s.v[k][i] = c[k];
            s.v[3 + k][i] = 1.0 / rad[k];
            s.v[6 + k][i] = c[k] - 2.0 * rad[k];
            s.v[9 + k][i] = c[k] + 2.0 * rad[k];
        }
    }
    const GaussianLanes g = s.lanes();
    for (int trial = 0; trial < 2000; ++trial) {
        double d[3] = {n(rng), n(rng), n(rng)};
        // Exercise axis-parallel rays too.
        if (trial % 7 == 0) d[trial % 3] = 0.0;
        const double l = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
        for (double& x : d) x /= l;
        RayLanes ray{u(rng) * 2, u(rng) * 2, u(rng) * 2, d[0], d[1], d[2], 1.0 / d[0], 1.0 / d[1], 1.0 / d[2],
                     trial % 5 == 0 ? 1.0 : 0.0, trial % 3 == 0 ? 6.0 : INFINITY, std::log(0.01)};
        for (size_t first = 0; first < N; first += kBatch) {
            const size_t count = std::min(kBatch, size_t(1 + (first / kBatch) % kBatch));
            double a0[kBatch], a1[kBatch], b0[kBatch], b1[kBatch];
            const uint32_t ma = ref.ray_gaussians(ray, g, first, count, a0, a1);
            const uint32_t mb = simd->ray_gaussians(ray, g, first, count, b0, b1);
            ASSERT_EQ(ma, mb) << "trial " << trial << " first " << first;
            for (size_t k = 0; k < count; ++k) {
                if (!(ma >> k & 1)) continue;
                ASSERT_TRUE(same_bits(a0[k], b0[k]));
                ASSERT_TRUE(same_bits(a1[k], b1[k]));
            }
        }
    }
}

TEST(Kernels, AccumulateMatches) {
    const KernelTable* simd = simd_or_skip();
    if (!simd) GTEST_SKIP() << "AVX2 unavailable";
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    for (size_t n : {0u, 1u, 7u, 8u, 9u, 1001u}) {
        std::vector<float> src(n), a(n), b(n);
        for (size_t i = 0; i < n; ++i) {
            src[i] = u(rng);
            a[i] = b[i] = u(rng);
        }
        scalar_table().accumulate(a.data(), src.data(), n);
        simd->accumulate(b.data(), src.data(), n);
        EXPECT_EQ(a, b);
    }
}

TEST(Kernels, TonemapMatches) {
    const KernelTable* simd = simd_or_skip();
    if (!simd) GTEST_SKIP() << "AVX2 unavailable";
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<float> u(-0.5f, 5.5f);
    for (float subframes : {1.0f, 2.0f, 3.0f, 16.0f}) {
        const size_t n = 3001;
        std::vector<float> src(n);
        for (float& x : src) x = u(rng);
        // Values sitting exactly on rounding boundaries.
        for (int k = 0; k < 256; ++k) src[k] = (float(k) + 0.5f) / 255.0f * subframes;
        src[300] = NAN;
        std::vector<uint8_t> a(n), b(n);
        scalar_table().tonemap(a.data(), src.data(), n, subframes);
        simd->tonemap(b.data(), src.data(), n, subframes);
        EXPECT_EQ(a, b) << subframes;
    }
}

TEST(Kernels, TonemapRoundsHalfUp) {
    float src[3] = {0.5f, 0.0f, 1.0f};
    uint8_t dst[3];
    scalar_table().tonemap(dst, src, 3, 1.0f);
    EXPECT_EQ(dst[0], 128);
    EXPECT_EQ(dst[1], 0);
    EXPECT_EQ(dst[2], 255);
}

TEST(Kernels, SquaredDiffMatchesAndIsExact) {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> u(0, 255);
    for (size_t n : {0u, 1u, 31u, 32u, 33u, 200000u}) {
        std::vector<uint8_t> a(n), b(n);
        uint64_t expected = 0;
        for (size_t i = 0; i < n; ++i) {
            a[i] = uint8_t(u(rng));
            b[i] = uint8_t(u(rng));
            const int64_t d = int64_t(a[i]) - int64_t(b[i]);
            expected += uint64_t(d * d);
        }
        EXPECT_EQ(scalar_table().squared_diff(a.data(), b.data(), n), expected);
        if (const KernelTable* simd = simd_or_skip()) EXPECT_EQ(simd->squared_diff(a.data(), b.data(), n), expected);
    }
    // Worst case: every byte differs by 255.
    const size_t n = 1 << 20;
    std::vector<uint8_t> zeros(n, 0), full(n, 255);
    const uint64_t expected = uint64_t(n) * 255 * 255;
    EXPECT_EQ(scalar_table().squared_diff(zeros.data(), full.data(), n), expected);
    if (const KernelTable* simd = simd_or_skip()) EXPECT_EQ(simd->squared_diff(zeros.data(), full.data(), n), expected);
}
