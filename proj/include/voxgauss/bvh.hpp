// Copyright 2026 The voxgauss Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <voxgauss/gaussian_model.hpp>
#include <voxgauss/kernels.hpp>

#include <cstdint>
#include <vector>

namespace voxgauss {

/// Binary BVH over the per-Gaussian boxes, built with a binned surface area
/// heuristic. Leaves hold at most kMaxLeafSize primitives, stored contiguously
/// in `order`.
struct Bvh {
    static constexpr uint32_t kMaxLeafSize = 4;
    static constexpr int kBins = 16;

    struct Node {
        Aabb bounds;
        /// Leaf: first primitive in `order`. Interior: index of the right child;
        /// the left child is the next node.
        uint32_t offset = 0;
        /// Zero for interior nodes.
        uint32_t count = 0;
    };

    std::vector<Node> nodes;
    /// order[k] is the model index of the k-th primitive in leaf order.
    std::vector<uint32_t> order;

    // Leaf-ordered copies used by the batched intersection kernel.
    std::vector<double> cx, cy, cz, irx, iry, irz, lox, loy, loz, hix, hiy, hiz;

    kernels::GaussianLanes lanes() const {
        return {cx.data(), cy.data(), cz.data(), irx.data(), iry.data(), irz.data(),
                lox.data(), loy.data(), loz.data(), hix.data(), hiy.data(), hiz.data()};
    }
    size_t depth() const;
};

/// Throws EmptyModel.
Bvh build_bvh(const GaussianModel& model);

} // namespace voxgauss
