// Copyright 2026 The voxgauss Authors
// SPDX-License-Identifier: Apache-2.0

#include "kernels_impl.hpp"

#include <cmath>

namespace voxgauss::kernels {

namespace {

// Same NaN behaviour as the x86 min/max instructions: the second operand wins.
inline double mn(double a, double b) { return a < b ? a : b; }
inline double mx(double a, double b) { return a > b ? a : b; }
inline float mnf(float a, float b) { return a < b ? a : b; }
inline float mxf(float a, float b) { return a > b ? a : b; }

uint32_t ray_gaussians_scalar(const RayLanes& r, const GaussianLanes& g, size_t first, size_t count, double* t0,
                              double* t1) {
    uint32_t mask = 0;
    for (size_t k = 0; k < count; ++k) {
        const size_t i = first + k;
        double a0 = r.t_min, a1 = r.t_max;
        double tn = (g.lox[i] - r.ox) * r.inv_dx, tf = (g.hix[i] - r.ox) * r.inv_dx;
        a0 = mx(mn(tn, tf), a0);
        a1 = mn(mx(tn, tf), a1);
        tn = (g.loy[i] - r.oy) * r.inv_dy;
        tf = (g.hiy[i] - r.oy) * r.inv_dy;
        a0 = mx(mn(tn, tf), a0);
        a1 = mn(mx(tn, tf), a1);
        tn = (g.loz[i] - r.oz) * r.inv_dz;
        tf = (g.hiz[i] - r.oz) * r.inv_dz;
        a0 = mx(mn(tn, tf), a0);
        a1 = mn(mx(tn, tf), a1);
        if (!(a0 <= a1)) continue;
        mask |= 16u << k;

        const double px = (r.ox - g.cx[i]) * g.irx[i], py = (r.oy - g.cy[i]) * g.iry[i],
                     pz = (r.oz - g.cz[i]) * g.irz[i];
        const double qx = r.dx * g.irx[i], qy = r.dy * g.iry[i], qz = r.dz * g.irz[i];
        const double c = qx * qx + qy * qy + qz * qz;
        const double b = 2.0 * (px * qx + py * qy + pz * qz);
        const double a = px * px + py * py + pz * pz + r.log_kappa;
        const double disc = b * b - 4.0 * c * a;
        if (!(disc >= 0.0)) continue;
        const double sq = std::sqrt(disc);
        const double inv2c = 0.5 / c;
        const double nb = 0.0 - b;
        const double lo = (nb - sq) * inv2c, hi = (nb + sq) * inv2c;
        const double c0 = mx(lo, r.t_min), c1 = mn(hi, r.t_max);
        if (!(c0 <= c1)) continue;
        t0[k] = c0;
        t1[k] = c1;
        mask |= 1u << k;
    }
    return mask;
}

void accumulate_scalar(float* dst, const float* src, size_t n) {
    for (size_t i = 0; i < n; ++i) dst[i] += src[i];
}

void tonemap_scalar(uint8_t* dst, const float* src, size_t n, float subframes) {
    for (size_t i = 0; i < n; ++i) {
        const float m = mnf(mxf(src[i] / subframes, 0.0f), 1.0f);
        dst[i] = uint8_t(int32_t(std::floor(m * 255.0f + 0.5f)));
    }
}

uint64_t squared_diff_scalar(const uint8_t* a, const uint8_t* b, size_t n) {
    uint64_t s = 0;
    for (size_t i = 0; i < n; ++i) {
        const int32_t d = int32_t(a[i]) - int32_t(b[i]);
        s += uint64_t(d * d);
    }
    return s;
}

constexpr KernelTable kScalar{"scalar", ray_gaussians_scalar, accumulate_scalar, tonemap_scalar, squared_diff_scalar};

} // namespace

const KernelTable& scalar_table() { return kScalar; }

} // namespace voxgauss::kernels
