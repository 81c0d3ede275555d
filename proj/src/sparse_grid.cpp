// Copyright 2026 The voxgauss Authors
// SPDX-License-Identifier: Apache-2.0

#include <voxgauss/sparse_grid.hpp>

#include <algorithm>
#include <cmath>

namespace voxgauss {

void GridTransform::validate() const {
    for (int a = 0; a < 3; ++a) {
        if (!(voxel_size[a] > 0.0) || !std::isfinite(voxel_size[a]))
            throw Error(ErrorCode::InvalidArgument, "voxel size must be positive and finite");
        if (!std::isfinite(origin[a])) throw Error(ErrorCode::InvalidArgument, "grid origin must be finite");
    }
}

Coord GridTransform::world_to_coord(const Vec3d& w) const {
    const Vec3d f = world_to_index(w);
    return {int32_t(std::floor(f.x)), int32_t(std::floor(f.y)), int32_t(std::floor(f.z))};
}

std::vector<std::pair<Coord, float>> LeafNode::active_voxels() const {
    std::vector<std::pair<Coord, float>> out;
    out.reserve(active_count());
    for_each_active([&](const Coord& c, float v) { out.emplace_back(c, v); });
    return out;
}

SparseGrid::SparseGrid(float background, GridTransform xform, std::string name)
    : xform_(xform), background_(background), name_(std::move(name)) {
    xform_.validate();
}

void SparseGrid::set_transform(const GridTransform& t) {
    t.validate();
    xform_ = t;
}

SparseGrid SparseGrid::clone() const {
    SparseGrid out(background_, xform_, name_);
    for (const auto& [key, top] : root_) {
        auto copy = std::make_unique<Level5Node>(top->origin());
        for (const auto& [n, v] : top->tiles()) copy->set_tile(n, v);
        for (const auto& [n, l4] : top->children()) {
            auto l4copy = std::make_unique<Level4Node>(l4->origin());
            for (const auto& [m, v] : l4->tiles()) l4copy->set_tile(m, v);
            for (const auto& [m, leaf] : l4->children()) l4copy->add_child(m, std::make_unique<LeafNode>(*leaf));
            copy->add_child(n, std::move(l4copy));
        }
        out.root_.emplace(key, std::move(copy));
    }
    return out;
}

Level5Node& SparseGrid::top_node(const Coord& ijk) {
    const Coord key = ijk.aligned(kLevel5Dim);
    auto it = root_.find(key);
    if (it == root_.end()) it = root_.emplace(key, std::make_unique<Level5Node>(key)).first;
    return *it->second;
}

namespace {

Level4Node& level4_for_write(Level5Node& top, const Coord& ijk) {
    const uint32_t n5 = Level5Node::slot_of(ijk);
    if (Level4Node* l4 = top.child(n5)) return *l4;
    auto l4 = std::make_unique<Level4Node>(top.slot_origin(n5));
    if (top.value_mask().test(n5)) {
        const float v = top.tile_value(n5);
        for (uint32_t m = 0; m < Level4Node::kSize; ++m) l4->set_tile(m, v);
    }
    return top.add_child(n5, std::move(l4));
}

LeafNode& leaf_in_level4(Level4Node& l4, const Coord& ijk, float background) {
    const uint32_t n4 = Level4Node::slot_of(ijk);
    if (LeafNode* leaf = l4.child(n4)) return *leaf;
    auto leaf = std::make_unique<LeafNode>(l4.slot_origin(n4), background);
    if (l4.value_mask().test(n4)) {
        const float v = l4.tile_value(n4);
        leaf->values().fill(v);
        leaf->value_mask().fill();
    }
    return l4.add_child(n4, std::move(leaf));
}

} // namespace

LeafNode& SparseGrid::leaf_for_write(const Coord& ijk) {
    return leaf_in_level4(level4_for_write(top_node(ijk), ijk), ijk, background_);
}

void SparseGrid::set_voxel(const Coord& ijk, float value) {
    leaf_for_write(ijk).set(LeafNode::offset_global(ijk), value);
}

void SparseGrid::deactivate_voxel(const Coord& ijk) {
    if (!get_voxel(ijk).active) return;
    const Coord key = ijk.aligned(kLevel5Dim);
    Level5Node& top = *root_.at(key);
    Level4Node& l4 = level4_for_write(top, ijk);
    LeafNode& leaf = leaf_in_level4(l4, ijk, background_);
    leaf.deactivate(LeafNode::offset_global(ijk), background_);
    if (leaf.active_count() == 0) l4.remove_child(Level4Node::slot_of(ijk));
    if (l4.empty()) top.remove_child(Level5Node::slot_of(ijk));
    if (top.empty()) root_.erase(key);
}

void SparseGrid::set_tile(int level, const Coord& origin, float value) {
    Level5Node& top = top_node(origin);
    switch (level) {
    case 3: level4_for_write(top, origin).set_tile(Level4Node::slot_of(origin), value); break;
    case 4: top.set_tile(Level5Node::slot_of(origin), value); break;
    case 5:
        for (uint32_t n = 0; n < Level5Node::kSize; ++n) top.set_tile(n, value);
        break;
    default: throw Error(ErrorCode::InvalidArgument, "tile level must be 3, 4 or 5");
    }
}

void SparseGrid::insert_leaf(const LeafNode& leaf) {
    if (leaf.active_count() == 0) return;
    Level4Node& l4 = level4_for_write(top_node(leaf.origin()), leaf.origin());
    l4.add_child(Level4Node::slot_of(leaf.origin()), std::make_unique<LeafNode>(leaf));
}

VoxelValue SparseGrid::get_voxel(const Coord& ijk) const {
    auto it = root_.find(ijk.aligned(kLevel5Dim));
    if (it == root_.end()) return {background_, false};
    const Level5Node& top = *it->second;
    const uint32_t n5 = Level5Node::slot_of(ijk);
    if (top.value_mask().test(n5)) return {top.tile_value(n5), true};
    const Level4Node* l4 = top.child(n5);
    if (!l4) return {background_, false};
    const uint32_t n4 = Level4Node::slot_of(ijk);
    if (l4->value_mask().test(n4)) return {l4->tile_value(n4), true};
    const LeafNode* leaf = l4->child(n4);
    if (!leaf) return {background_, false};
    const uint32_t n = LeafNode::offset_global(ijk);
    return {leaf->value(n), leaf->is_active(n)};
}

const LeafNode* SparseGrid::probe_leaf(const Coord& ijk) const {
    auto it = root_.find(ijk.aligned(kLevel5Dim));
    if (it == root_.end()) return nullptr;
    const Level4Node* l4 = it->second->child(Level5Node::slot_of(ijk));
    return l4 ? l4->child(Level4Node::slot_of(ijk)) : nullptr;
}

std::vector<const LeafNode*> SparseGrid::leaves() const {
    std::vector<const LeafNode*> out;
    for (const auto& [key, top] : root_)
        for (const auto& [n, l4] : top->children())
            for (const auto& [m, leaf] : l4->children()) out.push_back(leaf.get());
    std::sort(out.begin(), out.end(), [](const LeafNode* a, const LeafNode* b) { return a->origin() < b->origin(); });
    return out;
}

std::vector<TileInfo> SparseGrid::tiles() const {
    std::vector<TileInfo> out;
    for (const auto& [key, top] : root_) {
        for (const auto& [n, v] : top->tiles()) {
            const Coord o = top->slot_origin(n);
            out.push_back({{o, o + Coord{kLevel4Dim, kLevel4Dim, kLevel4Dim}}, v, 4});
        }
        for (const auto& [n, l4] : top->children())
            for (const auto& [m, v] : l4->tiles()) {
                const Coord o = l4->slot_origin(m);
                out.push_back({{o, o + Coord{kLeafDim, kLeafDim, kLeafDim}}, v, 3});
            }
    }
    std::sort(out.begin(), out.end(),
              [](const TileInfo& a, const TileInfo& b) { return a.index_box.min < b.index_box.min; });
    return out;
}

uint64_t SparseGrid::active_voxel_count() const {
    uint64_t n = 0;
    for (const auto& [key, top] : root_) {
        n += uint64_t(top->tiles().size()) * kLevel4Dim * kLevel4Dim * kLevel4Dim;
        for (const auto& [s, l4] : top->children()) {
            n += uint64_t(l4->tiles().size()) * 512u;
            for (const auto& [m, leaf] : l4->children()) n += leaf->active_count();
        }
    }
    return n;
}

CoordBox SparseGrid::index_bbox() const {
    if (root_.empty()) throw Error(ErrorCode::EmptyGrid, "grid has no active data");
    Coord lo{INT32_MAX, INT32_MAX, INT32_MAX}, hi{INT32_MIN, INT32_MIN, INT32_MIN};
    auto grow = [&](const Coord& a, const Coord& b) {
        for (int k = 0; k < 3; ++k) {
            lo[k] = std::min(lo[k], a[k]);
            hi[k] = std::max(hi[k], b[k]);
        }
    };
    for (const TileInfo& t : tiles()) grow(t.index_box.min, t.index_box.max);
    for (const LeafNode* leaf : leaves()) {
        Coord llo{8, 8, 8}, lhi{-1, -1, -1};
        leaf->value_mask().for_each_set([&](uint32_t n) {
            const Coord c = LeafNode::local_coord(n);
            for (int k = 0; k < 3; ++k) {
                llo[k] = std::min(llo[k], c[k]);
                lhi[k] = std::max(lhi[k], c[k]);
            }
        });
        grow(leaf->origin() + llo, leaf->origin() + lhi + Coord{1, 1, 1});
    }
    return {lo, hi};
}

Aabb SparseGrid::world_aabb() const { return xform_.to_world(index_bbox()); }

} // namespace voxgauss
