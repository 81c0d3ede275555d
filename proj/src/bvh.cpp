// Copyright 2026 The voxgauss Authors
// SPDX-License-Identifier: Apache-2.0

#include <voxgauss/bvh.hpp>

#include <algorithm>
#include <array>
#include <numeric>

namespace voxgauss {

namespace {

struct Builder {
    const std::vector<Aabb>& boxes;
    std::vector<Vec3d> centroids;
    std::vector<uint32_t>& order;
    std::vector<Bvh::Node>& nodes;

    uint32_t build(uint32_t first, uint32_t last) {
        const uint32_t index = uint32_t(nodes.size());
        nodes.emplace_back();
        Aabb bounds, cbounds;
        for (uint32_t i = first; i < last; ++i) {
            bounds.extend(boxes[order[i]]);
            cbounds.extend(centroids[order[i]]);
        }
        nodes[index].bounds = bounds;
        const uint32_t n = last - first;
        if (n <= Bvh::kMaxLeafSize) return make_leaf(index, first, n);

        int axis = 0;
        const Vec3d ext = cbounds.extent();
        if (ext.y > ext[axis]) axis = 1;
        if (ext.z > ext[axis]) axis = 2;
        uint32_t mid = first;
        if (!(ext[axis] > 0.0)) {
            // All centroids coincide: split in half by index.
            mid = first + n / 2;
        } else {
            mid = sah_split(first, last, axis, cbounds);
        }
        build(first, mid);
        nodes[index].offset = build(mid, last);
        return index;
    }

    uint32_t make_leaf(uint32_t index, uint32_t first, uint32_t n) {
        nodes[index].offset = first;
        nodes[index].count = n;
        return index;
    }

    uint32_t sah_split(uint32_t first, uint32_t last, int axis, const Aabb& cbounds) {
        struct Bin {
            Aabb box;
            uint32_t count = 0;
        };
        std::array<Bin, Bvh::kBins> bins{};
        const double lo = cbounds.lo[axis];
        const double scale = Bvh::kBins / (cbounds.hi[axis] - lo);
        auto bin_of = [&](uint32_t prim) {
            const int b = int((centroids[prim][axis] - lo) * scale);
            return std::clamp(b, 0, Bvh::kBins - 1);
        };
        for (uint32_t i = first; i < last; ++i) {
            Bin& b = bins[size_t(bin_of(order[i]))];
            b.box.extend(boxes[order[i]]);
            ++b.count;
        }
        std::array<double, Bvh::kBins - 1> cost{};
        Aabb acc;
        uint32_t cnt = 0;
        for (int i = 0; i < Bvh::kBins - 1; ++i) {
            acc.extend(bins[size_t(i)].box);
            cnt += bins[size_t(i)].count;
            cost[size_t(i)] = cnt ? cnt * acc.surface_area() : 0.0;
        }
        acc = Aabb{};
        cnt = 0;
        for (int i = Bvh::kBins - 1; i > 0; --i) {
            acc.extend(bins[size_t(i)].box);
            cnt += bins[size_t(i)].count;
            cost[size_t(i - 1)] += cnt ? cnt * acc.surface_area() : 0.0;
        }
        int best = 0;
        for (int i = 1; i < Bvh::kBins - 1; ++i)
            if (cost[size_t(i)] < cost[size_t(best)]) best = i;
        auto it = std::partition(order.begin() + first, order.begin() + last,
                                 [&](uint32_t prim) { return bin_of(prim) <= best; });
        uint32_t mid = uint32_t(it - order.begin());
        if (mid == first || mid == last) {
            // Degenerate binning; fall back to a median split.
            mid = first + (last - first) / 2;
            std::nth_element(order.begin() + first, order.begin() + mid, order.begin() + last,
                             [&](uint32_t a, uint32_t b) {
                                 if (centroids[a][axis] != centroids[b][axis])
                                     return centroids[a][axis] < centroids[b][axis];
                                 return a < b;
                             });
        }
        return mid;
    }
};

size_t depth_of(const std::vector<Bvh::Node>& nodes, uint32_t i) {
    if (nodes[i].count) return 1;
    return 1 + std::max(depth_of(nodes, i + 1), depth_of(nodes, nodes[i].offset));
}

} // namespace

size_t Bvh::depth() const { return nodes.empty() ? 0 : depth_of(nodes, 0); }

Bvh build_bvh(const GaussianModel& model) {
    if (model.gaussians.empty()) throw Error(ErrorCode::EmptyModel, "cannot build a BVH over zero Gaussians");
    if (model.aabbs.size() != model.gaussians.size())
        throw Error(ErrorCode::InvalidArgument, "model boxes are out of date");
    Bvh bvh;
    const size_t n = model.gaussians.size();
    bvh.order.resize(n);
    std::iota(bvh.order.begin(), bvh.order.end(), 0u);
    Builder b{model.aabbs, {}, bvh.order, bvh.nodes};
    b.centroids.reserve(n);
    for (const Aabb& box : model.aabbs) b.centroids.push_back(box.center());
    bvh.nodes.reserve(2 * n / Bvh::kMaxLeafSize + 1);
    b.build(0, uint32_t(n));

    for (auto* v : {&bvh.cx, &bvh.cy, &bvh.cz, &bvh.irx, &bvh.iry, &bvh.irz, &bvh.lox, &bvh.loy, &bvh.loz, &bvh.hix,
                    &bvh.hiy, &bvh.hiz})
        v->resize(n);
    for (size_t k = 0; k < n; ++k) {
        const Gaussian& g = model.gaussians[bvh.order[k]];
        const Aabb& box = model.aabbs[bvh.order[k]];
        bvh.cx[k] = g.center.x;
        bvh.cy[k] = g.center.y;
        bvh.cz[k] = g.center.z;
        bvh.irx[k] = 1.0 / double(g.radius.x);
        bvh.iry[k] = 1.0 / double(g.radius.y);
        bvh.irz[k] = 1.0 / double(g.radius.z);
        bvh.lox[k] = box.lo.x;
        bvh.loy[k] = box.lo.y;
        bvh.loz[k] = box.lo.z;
        bvh.hix[k] = box.hi.x;
        bvh.hiy[k] = box.hi.y;
        bvh.hiz[k] = box.hi.z;
    }
    return bvh;
}

} // namespace voxgauss
