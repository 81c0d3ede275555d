// Copyright 2026 The voxgauss Authors
// SPDX-License-Identifier: Apache-2.0

#include "kernels_impl.hpp"

#include <immintrin.h>

namespace voxgauss::kernels {

namespace {

inline __m256i lane_mask(size_t count) {
    alignas(32) static constexpr int64_t kLanes[8] = {-1, -1, -1, -1, 0, 0, 0, 0};
    return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(kLanes + 4 - count));
}

uint32_t ray_gaussians_avx2(const RayLanes& r, const GaussianLanes& g, size_t first, size_t count, double* t0,
                            double* t1) {
    const __m256i lm = lane_mask(count);
    auto load = [&](const double* p) { return _mm256_maskload_pd(p + first, lm); };

    const __m256d ox = _mm256_set1_pd(r.ox), oy = _mm256_set1_pd(r.oy), oz = _mm256_set1_pd(r.oz);
    const __m256d tmin = _mm256_set1_pd(r.t_min), tmax = _mm256_set1_pd(r.t_max);

    __m256d a0 = tmin, a1 = tmax;
    auto slab = [&](const double* lo, const double* hi, __m256d o, double inv) {
        const __m256d iv = _mm256_set1_pd(inv);
        const __m256d tn = _mm256_mul_pd(_mm256_sub_pd(load(lo), o), iv);
        const __m256d tf = _mm256_mul_pd(_mm256_sub_pd(load(hi), o), iv);
        a0 = _mm256_max_pd(_mm256_min_pd(tn, tf), a0);
        a1 = _mm256_min_pd(_mm256_max_pd(tn, tf), a1);
    };
    slab(g.lox, g.hix, ox, r.inv_dx);
    slab(g.loy, g.hiy, oy, r.inv_dy);
    slab(g.loz, g.hiz, oz, r.inv_dz);
    const uint32_t valid = (1u << count) - 1u;
    const uint32_t box = uint32_t(_mm256_movemask_pd(_mm256_cmp_pd(a0, a1, _CMP_LE_OQ))) & valid;
    if (!box) return 0;

    const __m256d irx = load(g.irx), iry = load(g.iry), irz = load(g.irz);
    const __m256d px = _mm256_mul_pd(_mm256_sub_pd(ox, load(g.cx)), irx);
    const __m256d py = _mm256_mul_pd(_mm256_sub_pd(oy, load(g.cy)), iry);
    const __m256d pz = _mm256_mul_pd(_mm256_sub_pd(oz, load(g.cz)), irz);
    const __m256d qx = _mm256_mul_pd(_mm256_set1_pd(r.dx), irx);
    const __m256d qy = _mm256_mul_pd(_mm256_set1_pd(r.dy), iry);
    const __m256d qz = _mm256_mul_pd(_mm256_set1_pd(r.dz), irz);

    const __m256d c =
        _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(qx, qx), _mm256_mul_pd(qy, qy)), _mm256_mul_pd(qz, qz));
    const __m256d pq =
        _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(px, qx), _mm256_mul_pd(py, qy)), _mm256_mul_pd(pz, qz));
    const __m256d b = _mm256_mul_pd(_mm256_set1_pd(2.0), pq);
    const __m256d pp =
        _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(px, px), _mm256_mul_pd(py, py)), _mm256_mul_pd(pz, pz));
    const __m256d a = _mm256_add_pd(pp, _mm256_set1_pd(r.log_kappa));
    const __m256d disc =
        _mm256_sub_pd(_mm256_mul_pd(b, b), _mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(4.0), c), a));
    const uint32_t real = uint32_t(_mm256_movemask_pd(_mm256_cmp_pd(disc, _mm256_setzero_pd(), _CMP_GE_OQ)));
    if (!(box & real)) return box << 4;

    const __m256d sq = _mm256_sqrt_pd(disc);
    const __m256d inv2c = _mm256_div_pd(_mm256_set1_pd(0.5), c);
    const __m256d nb = _mm256_sub_pd(_mm256_setzero_pd(), b);
    const __m256d lo = _mm256_mul_pd(_mm256_sub_pd(nb, sq), inv2c);
    const __m256d hi = _mm256_mul_pd(_mm256_add_pd(nb, sq), inv2c);
    const __m256d c0 = _mm256_max_pd(lo, tmin), c1 = _mm256_min_pd(hi, tmax);
    const uint32_t clip = uint32_t(_mm256_movemask_pd(_mm256_cmp_pd(c0, c1, _CMP_LE_OQ)));

    alignas(32) double l0[4], l1[4];
    _mm256_store_pd(l0, c0);
    _mm256_store_pd(l1, c1);
    const uint32_t hit = box & real & clip;
    for (size_t k = 0; k < count; ++k) {
        if (hit & (1u << k)) {
            t0[k] = l0[k];
            t1[k] = l1[k];
        }
    }
    return hit | (box << 4);
}

void accumulate_avx2(float* dst, const float* src, size_t n) {
    size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(dst + i, _mm256_add_ps(_mm256_loadu_ps(dst + i), _mm256_loadu_ps(src + i)));
    for (; i < n; ++i) dst[i] += src[i];
}

void tonemap_avx2(uint8_t* dst, const float* src, size_t n, float subframes) {
    const __m256 div = _mm256_set1_ps(subframes), zero = _mm256_setzero_ps(), one = _mm256_set1_ps(1.0f);
    const __m256 s255 = _mm256_set1_ps(255.0f), half = _mm256_set1_ps(0.5f);
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 m = _mm256_div_ps(_mm256_loadu_ps(src + i), div);
        m = _mm256_min_ps(_mm256_max_ps(m, zero), one);
        const __m256 f = _mm256_floor_ps(_mm256_add_ps(_mm256_mul_ps(m, s255), half));
        alignas(32) int32_t v[8];
        _mm256_store_si256(reinterpret_cast<__m256i*>(v), _mm256_cvttps_epi32(f));
        for (int k = 0; k < 8; ++k) dst[i + size_t(k)] = uint8_t(v[k]);
    }
    if (i < n) scalar_table().tonemap(dst + i, src + i, n - i, subframes);
}

uint64_t squared_diff_avx2(const uint8_t* a, const uint8_t* b, size_t n) {
    uint64_t total = 0;
    size_t i = 0;
    // 32 bytes per step; each 32-bit lane gains at most 2 * 255^2 per step,
    // so flushing every 4096 steps keeps the lanes far from overflow.
    while (i + 32 <= n) {
        __m256i acc = _mm256_setzero_si256();
        for (size_t steps = 0; steps < 4096 && i + 32 <= n; ++steps, i += 32) {
            const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
            const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
            const __m256i alo = _mm256_cvtepu8_epi16(_mm256_castsi256_si128(va));
            const __m256i ahi = _mm256_cvtepu8_epi16(_mm256_extracti128_si256(va, 1));
            const __m256i blo = _mm256_cvtepu8_epi16(_mm256_castsi256_si128(vb));
            const __m256i bhi = _mm256_cvtepu8_epi16(_mm256_extracti128_si256(vb, 1));
            const __m256i dlo = _mm256_sub_epi16(alo, blo), dhi = _mm256_sub_epi16(ahi, bhi);
            acc = _mm256_add_epi32(acc, _mm256_madd_epi16(dlo, dlo));
            acc = _mm256_add_epi32(acc, _mm256_madd_epi16(dhi, dhi));
        }
        alignas(32) uint32_t lanes[8];
        _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
        for (uint32_t v : lanes) total += v;
    }
    return total + scalar_table().squared_diff(a + i, b + i, n - i);
}

constexpr KernelTable kAvx2{"avx2", ray_gaussians_avx2, accumulate_avx2, tonemap_avx2, squared_diff_avx2};

} // namespace

const KernelTable& detail::avx2_table_unchecked() { return kAvx2; }

} // namespace voxgauss::kernels
