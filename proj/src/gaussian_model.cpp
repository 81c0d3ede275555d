// Copyright 2026 The voxgauss Authors
// SPDX-License-Identifier: Apache-2.0

#include <voxgauss/gaussian_model.hpp>

#include "binary_io.hpp"

#include <fstream>

namespace voxgauss {

using detail::get_le;
using detail::put_le;

SparseStrategy parse_sparse_strategy(const std::string& name) {
    if (name == "smart") return SparseStrategy::Smart;
    if (name == "strict") return SparseStrategy::Strict;
    if (name == "single" || name == "single_per_leaf") return SparseStrategy::SinglePerLeaf;
    throw Error(ErrorCode::InvalidArgument, "unknown sparse strategy '" + name + "'");
}

const char* to_string(SparseStrategy s) {
    switch (s) {
    case SparseStrategy::Smart: return "smart";
    case SparseStrategy::Strict: return "strict";
    case SparseStrategy::SinglePerLeaf: return "single";
    }
    return "?";
}

void LodConfig::validate() const {
    if (dense_block != 2 && dense_block != 4 && dense_block != 8)
        throw Error(ErrorCode::InvalidArgument, "dense_block must be 2, 4 or 8");
    if (sigma_multiplier < 1 || sigma_multiplier > 3)
        throw Error(ErrorCode::InvalidArgument, "sigma_multiplier must be 1, 2 or 3");
    if (!(opacity_threshold >= 1e-6 && opacity_threshold <= 1e-3))
        throw Error(ErrorCode::InvalidArgument, "opacity_threshold must lie in [1e-6, 1e-3]");
    if (!(radius_min >= 0.0)) throw Error(ErrorCode::InvalidArgument, "radius_min must be >= 0");
    if (uint32_t(sparse_strategy) > 2) throw Error(ErrorCode::InvalidArgument, "bad sparse strategy");
}

LodConfig lod_preset(int level) {
    LodConfig cfg;
    switch (level) {
    case 1: cfg.dense_block = 2; cfg.sparse_strategy = SparseStrategy::Smart; break;
    case 2: cfg.dense_block = 4; cfg.sparse_strategy = SparseStrategy::Smart; break;
    case 3: cfg.dense_block = 8; cfg.sparse_strategy = SparseStrategy::Smart; break;
    case 4: cfg.dense_block = 8; cfg.sparse_strategy = SparseStrategy::Strict; break;
    case 5: cfg.dense_block = 8; cfg.sparse_strategy = SparseStrategy::SinglePerLeaf; break;
    default: throw Error(ErrorCode::InvalidArgument, "LOD must be in 1..5");
    }
    return cfg;
}

Aabb gaussian_aabb(const Gaussian& g, int sigma, const Aabb& scene) {
    const Vec3d c(g.center);
    if (!scene.contains(c)) throw Error(ErrorCode::CenterOutsideScene, "Gaussian center lies outside the scene box");
    const Vec3d ext = Vec3d(g.radius) * double(sigma);
    return Aabb{c - ext, c + ext}.intersect(scene);
}

void GaussianModel::rebuild_aabbs(int sigma) {
    lod.sigma_multiplier = sigma;
    lod.validate();
    aabbs.resize(gaussians.size());
    for (size_t i = 0; i < gaussians.size(); ++i) aabbs[i] = gaussian_aabb(gaussians[i], sigma, scene_aabb);
}

namespace {
constexpr char kGgmMagic[4] = {'G', 'G', 'M', '1'};
}

void write_ggm(const GaussianModel& model, std::ostream& sink) {
    sink.write(kGgmMagic, 4);
    put_le<uint32_t>(sink, kGgmVersion);
    put_le<uint64_t>(sink, model.gaussians.size());
    put_le<uint32_t>(sink, uint32_t(model.lod.dense_block));
    put_le<uint32_t>(sink, uint32_t(model.lod.sparse_strategy));
    put_le<double>(sink, model.lod.opacity_threshold);
    put_le<double>(sink, model.lod.radius_min);
    put_le<uint32_t>(sink, uint32_t(model.lod.sigma_multiplier));
    for (int a = 0; a < 3; ++a) put_le<double>(sink, model.scene_aabb.lo[a]);
    for (int a = 0; a < 3; ++a) put_le<double>(sink, model.scene_aabb.hi[a]);
    put_le<uint32_t>(sink, uint32_t(model.source_label.size()));
    sink.write(model.source_label.data(), std::streamsize(model.source_label.size()));
    for (const Gaussian& g : model.gaussians) {
        for (int a = 0; a < 3; ++a) put_le<float>(sink, g.center[a]);
        for (int a = 0; a < 3; ++a) put_le<float>(sink, g.radius[a]);
        put_le<float>(sink, g.opacity);
    }
    if (!sink) throw Error(ErrorCode::IoFailure, "failed to write GGM stream");
}

GaussianModel read_ggm(std::istream& source) {
    char magic[4];
    detail::get_bytes(source, magic, 4);
    if (!std::equal(magic, magic + 4, kGgmMagic)) throw Error(ErrorCode::BadMagic, "not a GGM stream");
    const uint32_t version = get_le<uint32_t>(source);
    if (version != kGgmVersion) throw Error(ErrorCode::VersionMismatch, "unsupported GGM version");
    GaussianModel m;
    const uint64_t count = get_le<uint64_t>(source);
    m.lod.dense_block = int(get_le<uint32_t>(source));
    m.lod.sparse_strategy = SparseStrategy(get_le<uint32_t>(source));
    m.lod.opacity_threshold = get_le<double>(source);
    m.lod.radius_min = get_le<double>(source);
    m.lod.sigma_multiplier = int(get_le<uint32_t>(source));
    m.lod.validate();
    for (int a = 0; a < 3; ++a) m.scene_aabb.lo[a] = get_le<double>(source);
    for (int a = 0; a < 3; ++a) m.scene_aabb.hi[a] = get_le<double>(source);
    const uint32_t label_len = get_le<uint32_t>(source);
    m.source_label.resize(label_len);
    detail::get_bytes(source, m.source_label.data(), label_len);
    m.gaussians.reserve(size_t(count));
    for (uint64_t i = 0; i < count; ++i) {
        Gaussian g;
        for (int a = 0; a < 3; ++a) g.center[a] = get_le<float>(source);
        for (int a = 0; a < 3; ++a) g.radius[a] = get_le<float>(source);
        g.opacity = get_le<float>(source);
        m.gaussians.push_back(g);
    }
    m.rebuild_aabbs(m.lod.sigma_multiplier);
    return m;
}

void write_ggm_file(const GaussianModel& model, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorCode::IoFailure, "cannot open " + path);
    write_ggm(model, os);
}

GaussianModel read_ggm_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorCode::IoFailure, "cannot open " + path);
    return read_ggm(is);
}

} // namespace voxgauss
