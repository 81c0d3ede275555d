// Copyright 2026 The voxgauss Authors
// SPDX-License-Identifier: Apache-2.0

///
/// @file sparse_grid.hpp
///
/// Fixed-depth 5-4-3 sparse voxel tree. Leaves hold 8^3 voxels, level-4
/// nodes hold 16^3 leaf slots (128^3 voxels) and level-5 nodes hold 32^3
/// level-4 slots (4096^3 voxels). Every internal slot is either a child
/// subtree (child mask) or a constant tile (value mask), never both.
///
/// A "level-L tile" covers the extent of a level-L node: level-3 tiles are
/// 8^3 voxels and live in level-4 nodes, level-4 tiles are 128^3 voxels and
/// live in level-5 nodes.
///

#pragma once

#include <voxgauss/error.hpp>
#include <voxgauss/math.hpp>

#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace voxgauss {

/// Fixed-size bitmask stored as 64-bit words; bit i lives in word i/64.
template <uint32_t N>
class Mask {
public:
    static_assert(N % 64 == 0);
    static constexpr uint32_t kWords = N / 64;

    bool test(uint32_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(uint32_t i) { words_[i >> 6] |= uint64_t(1) << (i & 63); }
    void clear(uint32_t i) { words_[i >> 6] &= ~(uint64_t(1) << (i & 63)); }
    void fill() { words_.fill(~uint64_t(0)); }
    void reset() { words_.fill(0); }

    uint32_t count() const {
        uint32_t n = 0;
        for (uint64_t w : words_) n += uint32_t(std::popcount(w));
        return n;
    }
    bool none() const {
        for (uint64_t w : words_)
            if (w) return false;
        return true;
    }
    bool all() const {
        for (uint64_t w : words_)
            if (~w) return false;
        return true;
    }

    /// Calls f(bit) for every set bit in ascending order.
    template <typename F>
    void for_each_set(F&& f) const {
        for (uint32_t w = 0; w < kWords; ++w) {
            uint64_t bits = words_[w];
            while (bits) {
                const uint32_t b = uint32_t(std::countr_zero(bits));
                f(w * 64 + b);
                bits &= bits - 1;
            }
        }
    }

    const std::array<uint64_t, kWords>& words() const { return words_; }
    std::array<uint64_t, kWords>& words() { return words_; }

    bool operator==(const Mask&) const = default;

private:
    std::array<uint64_t, kWords> words_{};
};

/// Index-to-world mapping: world = origin + index * voxel_size.
struct GridTransform {
    Vec3d voxel_size{1.0, 1.0, 1.0};
    Vec3d origin{0.0, 0.0, 0.0};

    /// Throws InvalidArgument unless all voxel sizes are positive and finite.
    void validate() const;

    Vec3d index_to_world(const Vec3d& ijk) const { return origin + mul(ijk, voxel_size); }
    Vec3d world_to_index(const Vec3d& w) const { return div(w - origin, voxel_size); }
    /// Voxel owning a world point (floor division).
    Coord world_to_coord(const Vec3d& w) const;
    /// World extent of a half-open index box.
    Aabb to_world(const CoordBox& box) const {
        return {index_to_world(box.min.as_vec()), index_to_world(box.max.as_vec())};
    }

    bool operator==(const GridTransform&) const = default;
};

struct VoxelValue {
    float value;
    bool active;
    bool operator==(const VoxelValue&) const = default;
};

class LeafNode {
public:
    static constexpr int kLog2Dim = 3;
    static constexpr int kTotalLog2 = 3;
    static constexpr int kDim = 8;
    static constexpr uint32_t kSize = 512;

    LeafNode(const Coord& origin, float background) : origin_(origin) { values_.fill(background); }

    /// Local offset in ZYX order: z varies fastest.
    static constexpr uint32_t offset(int x, int y, int z) { return uint32_t((x << 6) | (y << 3) | z); }
    static constexpr uint32_t offset_global(const Coord& ijk) {
        return offset(ijk.x & 7, ijk.y & 7, ijk.z & 7);
    }
    static constexpr Coord local_coord(uint32_t n) { return {int32_t(n >> 6), int32_t((n >> 3) & 7), int32_t(n & 7)}; }

    const Coord& origin() const { return origin_; }
    const Mask<kSize>& value_mask() const { return mask_; }
    Mask<kSize>& value_mask() { return mask_; }
    const std::array<float, kSize>& values() const { return values_; }
    std::array<float, kSize>& values() { return values_; }

    uint32_t active_count() const { return mask_.count(); }
    bool is_dense() const { return mask_.all(); }
    bool is_active(uint32_t n) const { return mask_.test(n); }
    float value(uint32_t n) const { return values_[n]; }

    void set(uint32_t n, float v) {
        values_[n] = v;
        mask_.set(n);
    }
    void deactivate(uint32_t n, float background) {
        values_[n] = background;
        mask_.clear(n);
    }

    /// Calls f(local_coord, value) for active voxels in ZYX bit order.
    template <typename F>
    void for_each_active(F&& f) const {
        mask_.for_each_set([&](uint32_t n) { f(local_coord(n), values_[n]); });
    }

    /// Sequence form of for_each_active.
    std::vector<std::pair<Coord, float>> active_voxels() const;

    CoordBox index_box() const { return {origin_, origin_ + Coord{kDim, kDim, kDim}}; }

private:
    Coord origin_;
    Mask<kSize> mask_;
    std::array<float, kSize> values_;
};

template <typename ChildT, int Log2Dim>
class InternalNode {
public:
    using Child = ChildT;
    static constexpr int kLog2Dim = Log2Dim;
    static constexpr int kChildLog2 = ChildT::kTotalLog2;
    static constexpr int kTotalLog2 = Log2Dim + ChildT::kTotalLog2;
    static constexpr int kDim = 1 << Log2Dim;
    static constexpr uint32_t kSize = 1u << (3 * Log2Dim);

    explicit InternalNode(const Coord& origin) : origin_(origin) {}

    /// Slot index of the child containing global index `ijk` (ZYX order).
    static constexpr uint32_t slot_of(const Coord& ijk) {
        constexpr int32_t m = (1 << kTotalLog2) - 1;
        return (uint32_t((ijk.x & m) >> kChildLog2) << (2 * Log2Dim)) |
               (uint32_t((ijk.y & m) >> kChildLog2) << Log2Dim) | uint32_t((ijk.z & m) >> kChildLog2);
    }
    Coord slot_origin(uint32_t n) const {
        const int32_t x = int32_t(n >> (2 * Log2Dim)), y = int32_t((n >> Log2Dim) & (kDim - 1)),
                      z = int32_t(n & (kDim - 1));
        return origin_ + Coord{x << kChildLog2, y << kChildLog2, z << kChildLog2};
    }

    const Coord& origin() const { return origin_; }
    const Mask<kSize>& child_mask() const { return child_mask_; }
    const Mask<kSize>& value_mask() const { return value_mask_; }

    ChildT* child(uint32_t n) {
        auto it = children_.find(n);
        return it == children_.end() ? nullptr : it->second.get();
    }
    const ChildT* child(uint32_t n) const {
        auto it = children_.find(n);
        return it == children_.end() ? nullptr : it->second.get();
    }
    float tile_value(uint32_t n) const { return tiles_.at(n); }

    const std::map<uint32_t, std::unique_ptr<ChildT>>& children() const { return children_; }
    const std::map<uint32_t, float>& tiles() const { return tiles_; }

    ChildT& add_child(uint32_t n, std::unique_ptr<ChildT> c) {
        clear_tile(n);
        child_mask_.set(n);
        auto& slot = children_[n];
        slot = std::move(c);
        return *slot;
    }
    void remove_child(uint32_t n) {
        children_.erase(n);
        child_mask_.clear(n);
    }
    void set_tile(uint32_t n, float v) {
        remove_child(n);
        value_mask_.set(n);
        tiles_[n] = v;
    }
    void clear_tile(uint32_t n) {
        tiles_.erase(n);
        value_mask_.clear(n);
    }

    bool empty() const { return children_.empty() && tiles_.empty(); }

private:
    Coord origin_;
    Mask<kSize> child_mask_;
    Mask<kSize> value_mask_;
    std::map<uint32_t, float> tiles_;
    std::map<uint32_t, std::unique_ptr<ChildT>> children_;
};

using Level4Node = InternalNode<LeafNode, 4>;
using Level5Node = InternalNode<Level4Node, 5>;

struct TileInfo {
    CoordBox index_box;
    float value;
    int level; // 3: 8^3 box, 4: 128^3 box
};

class SparseGrid {
public:
    using Root = std::map<Coord, std::unique_ptr<Level5Node>>;

    static constexpr int kLeafDim = 8;
    static constexpr int kLevel4Dim = 128;
    static constexpr int kLevel5Dim = 4096;

    explicit SparseGrid(float background = 0.0f, GridTransform xform = {}, std::string name = {});

    SparseGrid(SparseGrid&&) noexcept = default;
    SparseGrid& operator=(SparseGrid&&) noexcept = default;
    SparseGrid(const SparseGrid&) = delete;
    SparseGrid& operator=(const SparseGrid&) = delete;
    SparseGrid clone() const;

    float background() const { return background_; }
    const GridTransform& transform() const { return xform_; }
    void set_transform(const GridTransform& t);
    const std::string& name() const { return name_; }
    void set_name(std::string n) { name_ = std::move(n); }

    /// Activates the voxel, allocating intermediate nodes on demand. Setting a
    /// voxel inside a tile first splits the tile into explicit children.
    void set_voxel(const Coord& ijk, float value);
    /// Deactivates a voxel and prunes nodes left without active content.
    void deactivate_voxel(const Coord& ijk);
    /// Installs a constant tile covering the level-`level` node extent that
    /// contains `origin`. Level 5 is expanded into 32^3 level-4 tiles.
    void set_tile(int level, const Coord& origin, float value);
    /// Installs a whole leaf (replacing any existing leaf or tile at its slot).
    /// Leaves without active voxels are ignored.
    void insert_leaf(const LeafNode& leaf);

    VoxelValue get_voxel(const Coord& ijk) const;
    const LeafNode* probe_leaf(const Coord& ijk) const;

    /// All leaves, sorted lexicographically by origin.
    std::vector<const LeafNode*> leaves() const;
    /// All tiles, sorted lexicographically by box origin.
    std::vector<TileInfo> tiles() const;

    bool empty() const { return root_.empty(); }
    uint64_t active_voxel_count() const;
    /// Tight world box over active voxels and tiles. Throws EmptyGrid.
    Aabb world_aabb() const;
    /// Tight index box over active voxels and tiles. Throws EmptyGrid.
    CoordBox index_bbox() const;

    const Root& root() const { return root_; }

private:
    Level5Node& top_node(const Coord& ijk);
    LeafNode& leaf_for_write(const Coord& ijk);

    Root root_;
    GridTransform xform_;
    float background_;
    std::string name_;
};

} // namespace voxgauss
