// Copyright 2026 The voxgauss Authors
// SPDX-License-Identifier: Apache-2.0

#include <voxgauss/sparse_grid.hpp>

#include <gtest/gtest.h>

#include <random>
#include <set>
#include <unordered_map>

using namespace voxgauss;

namespace {

template <typename NodeT>
uint64_t subtree_active(const NodeT& node);

uint64_t subtree_active(const LeafNode& leaf) { return leaf.active_count(); }

template <typename NodeT>
uint64_t subtree_active(const NodeT& node) {
    uint64_t n = node.tiles().size();
    for (const auto& [slot, child] : node.children()) n += subtree_active(*child);
    return n;
}

template <typename NodeT>
void check_masks(const NodeT& node) {
    for (uint32_t n = 0; n < NodeT::kSize; ++n) {
        const bool child = node.child_mask().test(n);
        const bool tile = node.value_mask().test(n);
        ASSERT_FALSE(child && tile) << "slot " << n << " is both child and tile";
        ASSERT_EQ(child, node.child(n) != nullptr);
        ASSERT_EQ(tile, node.tiles().count(n) == 1);
    }
    for (const auto& [slot, child] : node.children()) {
        EXPECT_GT(subtree_active(*child), 0u);
        if constexpr (!std::is_same_v<typename NodeT::Child, LeafNode>) check_masks(*child);
    }
}

void check_grid_masks(const SparseGrid& g) {
    for (const auto& [origin, node] : g.root()) check_masks(*node);
}

} // namespace

TEST(SparseGrid, SingleInsertionAllocatesOnePath) {
    SparseGrid g;
    g.set_voxel({0, 0, 0}, 1.0f);
    ASSERT_EQ(g.root().size(), 1u);
    const Level5Node& top = *g.root().begin()->second;
    ASSERT_EQ(top.children().size(), 1u);
    ASSERT_EQ(top.children().begin()->second->children().size(), 1u);
    ASSERT_EQ(g.leaves().size(), 1u);
    EXPECT_EQ(g.leaves()[0]->active_count(), 1u);
}

TEST(SparseGrid, SetTwiceKeepsLastValue) {
    SparseGrid g;
    g.set_voxel({3, 4, 5}, 1.0f);
    g.set_voxel({3, 4, 5}, 2.0f);
    EXPECT_EQ(g.active_voxel_count(), 1u);
    EXPECT_EQ(g.get_voxel({3, 4, 5}).value, 2.0f);
}

TEST(SparseGrid, FillingALeafMakesItDense) {
    SparseGrid g;
    for (int x = 0; x < 8; ++x)
        for (int y = 0; y < 8; ++y)
            for (int z = 0; z < 8; ++z) g.set_voxel({x, y, z}, 1.0f);
    ASSERT_EQ(g.leaves().size(), 1u);
    EXPECT_TRUE(g.leaves()[0]->is_dense());
    EXPECT_EQ(g.leaves()[0]->value_mask().count(), 512u);
}

TEST(SparseGrid, GetVoxelSemantics) {
    SparseGrid g(-1.0f);
    EXPECT_EQ(g.get_voxel({10, 10, 10}), (VoxelValue{-1.0f, false}));
    g.set_tile(4, {128, 0, 0}, 0.7f);
    EXPECT_EQ(g.get_voxel({200, 100, 5}), (VoxelValue{0.7f, true}));
    EXPECT_EQ(g.get_voxel({127, 0, 0}).active, false);
}

TEST(SparseGrid, RandomRoundTripMatchesShadowMap) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> coord(-5000, 5000);
    std::uniform_real_distribution<float> val(-3.0f, 3.0f);
    SparseGrid g;
    std::unordered_map<Coord, float> shadow;
    for (int i = 0; i < 1000; ++i) {
        const Coord c{coord(rng), coord(rng), coord(rng)};
        const float v = val(rng);
        g.set_voxel(c, v);
        shadow[c] = v;
    }
    for (const auto& [c, v] : shadow) {
        const VoxelValue got = g.get_voxel(c);
        ASSERT_TRUE(got.active);
        ASSERT_EQ(got.value, v);
    }
    EXPECT_EQ(g.active_voxel_count(), shadow.size());
    check_grid_masks(g);
}

TEST(SparseGrid, LeavesAreLexicographic) {
    SparseGrid g;
    EXPECT_TRUE(g.leaves().empty());
    g.set_voxel({8, 0, 0}, 1.0f);
    g.set_voxel({0, 0, 0}, 1.0f);
    auto leaves = g.leaves();
    ASSERT_EQ(leaves.size(), 2u);
    EXPECT_EQ(leaves[0]->origin(), (Coord{0, 0, 0}));
    EXPECT_EQ(leaves[1]->origin(), (Coord{8, 0, 0}));
}

TEST(SparseGrid, LeafCountMatchesShadowSet) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> coord(-9000, 9000);
    SparseGrid g;
    std::set<Coord> origins;
    for (int i = 0; i < 500; ++i) {
        const Coord c{coord(rng), coord(rng), coord(rng)};
        g.set_voxel(c, 1.0f);
        origins.insert(c.aligned(8));
    }
    const auto leaves = g.leaves();
    ASSERT_EQ(leaves.size(), origins.size());
    auto it = origins.begin();
    for (const LeafNode* leaf : leaves) EXPECT_EQ(leaf->origin(), *it++);
}

TEST(LeafNode, ActiveIterationIsZyxOrder) {
    LeafNode dense({0, 0, 0}, 0.0f);
    for (uint32_t n = 0; n < 512; ++n) dense.set(n, float(n));
    const auto all = dense.active_voxels();
    ASSERT_EQ(all.size(), 512u);
    EXPECT_EQ(all[0].first, (Coord{0, 0, 0}));
    EXPECT_EQ(all[1].first, (Coord{0, 0, 1}));

    LeafNode one({0, 0, 0}, 0.0f);
    one.set(LeafNode::offset(1, 0, 0), 3.0f);
    const auto single = one.active_voxels();
    ASSERT_EQ(single.size(), 1u);
    EXPECT_EQ(single[0].first, (Coord{1, 0, 0}));
    EXPECT_EQ(single[0].second, 3.0f);
}

TEST(LeafNode, RandomMaskIteratesInBitOrder) {
    std::mt19937_64 rng(3);
    LeafNode leaf({0, 0, 0}, 0.0f);
    std::vector<uint32_t> expected;
    for (uint32_t n = 0; n < 512; ++n) {
        if (rng() % 3 == 0) {
            leaf.set(n, 1.0f);
            expected.push_back(n);
        }
    }
    std::vector<uint32_t> got;
    leaf.for_each_active([&](const Coord& c, float) { got.push_back(LeafNode::offset(c.x, c.y, c.z)); });
    EXPECT_EQ(got, expected);
    EXPECT_EQ(leaf.active_count(), expected.size());
}

TEST(SparseGrid, TileIteration) {
    SparseGrid g;
    EXPECT_TRUE(g.tiles().empty());
    g.set_tile(4, {0, 0, 0}, 0.5f);
    const auto tiles = g.tiles();
    ASSERT_EQ(tiles.size(), 1u);
    EXPECT_EQ(tiles[0].index_box, (CoordBox{{0, 0, 0}, {128, 128, 128}}));
    EXPECT_EQ(tiles[0].value, 0.5f);
    EXPECT_EQ(tiles[0].level, 4);
}

TEST(SparseGrid, TilesNeverOverlapLeavesAndPartitionActiveSet) {
    std::mt19937_64 rng(5);
    SparseGrid g;
    std::uniform_int_distribution<int> c(0, 511);
    for (int i = 0; i < 40; ++i) g.set_tile(3, {c(rng), c(rng), c(rng)}, 0.25f);
    g.set_tile(4, {256, 0, 0}, 0.75f);
    for (int i = 0; i < 400; ++i) g.set_voxel({c(rng), c(rng), c(rng)}, 1.0f);
    const auto tiles = g.tiles();
    for (const TileInfo& t : tiles)
        for (const LeafNode* leaf : g.leaves()) ASSERT_FALSE(t.index_box.overlaps(leaf->index_box()));

    // Every active index is covered by exactly one leaf voxel or one tile.
    std::uniform_int_distribution<int> q(0, 511);
    for (int i = 0; i < 5000; ++i) {
        const Coord p{q(rng), q(rng), q(rng)};
        int owners = 0;
        for (const TileInfo& t : tiles) owners += t.index_box.contains(p) ? 1 : 0;
        const LeafNode* leaf = g.probe_leaf(p);
        if (leaf && leaf->is_active(LeafNode::offset_global(p))) ++owners;
        ASSERT_EQ(owners, g.get_voxel(p).active ? 1 : 0);
    }
    check_grid_masks(g);
}

TEST(SparseGrid, SettingVoxelInsideTileSplitsIt) {
    SparseGrid g;
    g.set_tile(4, {0, 0, 0}, 0.5f);
    g.set_voxel({1, 2, 3}, 9.0f);
    EXPECT_EQ(g.get_voxel({1, 2, 3}).value, 9.0f);
    EXPECT_EQ(g.get_voxel({1, 2, 4}).value, 0.5f);
    EXPECT_EQ(g.get_voxel({100, 100, 100}).value, 0.5f);
    EXPECT_EQ(g.active_voxel_count(), 128ull * 128 * 128);
    check_grid_masks(g);
}

TEST(SparseGrid, DeactivatePrunesEmptyNodes) {
    SparseGrid g;
    g.set_voxel({5, 5, 5}, 1.0f);
    g.deactivate_voxel({5, 5, 5});
    EXPECT_TRUE(g.empty());
}

TEST(SparseGrid, WorldAabb) {
    SparseGrid g;
    EXPECT_THROW(g.world_aabb(), Error);
    g.set_voxel({0, 0, 0}, 1.0f);
    EXPECT_EQ(g.world_aabb(), (Aabb{{0, 0, 0}, {1, 1, 1}}));
    g.set_voxel({7, 7, 7}, 1.0f);
    EXPECT_EQ(g.world_aabb(), (Aabb{{0, 0, 0}, {8, 8, 8}}));
}

TEST(SparseGrid, WorldAabbMatchesCornerScan) {
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> c(-300, 300);
    const GridTransform xf{{0.5, 0.25, 2.0}, {1.0, -2.0, 3.0}};
    SparseGrid g(0.0f, xf);
    Vec3d lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
    for (int i = 0; i < 300; ++i) {
        const Coord p{c(rng), c(rng), c(rng)};
        g.set_voxel(p, 1.0f);
        lo = vmin(lo, xf.index_to_world(p.as_vec()));
        hi = vmax(hi, xf.index_to_world((p + Coord{1, 1, 1}).as_vec()));
    }
    EXPECT_EQ(g.world_aabb(), (Aabb{lo, hi}));
}

TEST(GridTransform, RoundTripIsExactForPowerOfTwoSizes) {
    const GridTransform xf{{0.125, 0.5, 4.0}, {0, 0, 0}};
    for (int i = -100; i <= 100; i += 7) {
        const Vec3d idx{double(i), double(i + 1), double(-i)};
        EXPECT_EQ(xf.world_to_index(xf.index_to_world(idx)), idx);
    }
    EXPECT_THROW((GridTransform{{0, 1, 1}, {}}.validate()), Error);
}

TEST(SparseGrid, IdenticalConstructionGivesIdenticalTraversal) {
    auto build = [] {
        std::mt19937_64 rng(42);
        std::uniform_int_distribution<int> c(-1000, 1000);
        SparseGrid g;
        for (int i = 0; i < 200; ++i) g.set_voxel({c(rng), c(rng), c(rng)}, float(i));
        return g;
    };
    const SparseGrid a = build(), b = build();
    const auto la = a.leaves(), lb = b.leaves();
    ASSERT_EQ(la.size(), lb.size());
    for (size_t i = 0; i < la.size(); ++i) {
        EXPECT_EQ(la[i]->origin(), lb[i]->origin());
        EXPECT_EQ(la[i]->value_mask(), lb[i]->value_mask());
        EXPECT_EQ(la[i]->values(), lb[i]->values());
    }
}
