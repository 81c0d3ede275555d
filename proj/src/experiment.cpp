// Copyright 2026 The voxgauss Authors
// SPDX-License-Identifier: Apache-2.0

#include <voxgauss/experiment.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>

namespace voxgauss {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    size_t start = 0;
    for (;;) {
        const size_t p = s.find(sep, start);
        out.push_back(s.substr(start, p - start));
        if (p == std::string::npos) return out;
        start = p + 1;
    }
}

int parse_int_field(const std::string& s, const std::string& ref) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw Error(ErrorCode::UnknownDataset, "bad number in dataset reference '" + ref + "'");
    return v;
}

void require_file(const std::string& path) {
    if (!std::filesystem::is_regular_file(path)) throw Error(ErrorCode::UnknownDataset, "no such file: " + path);
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

} // namespace

std::vector<const SparseGrid*> Dataset::reference_grids() const {
    std::vector<const SparseGrid*> out;
    for (const SparseGrid& g : grids) out.push_back(&g);
    return out;
}

Aabb Dataset::bounds() const {
    Aabb box;
    for (const SparseGrid& g : grids)
        if (!g.empty()) box.extend(g.world_aabb());
    if (points)
        for (const Vec3d& p : points->points.positions) box.extend(p);
    return box;
}

Dataset make_volume_dataset(SparseGrid grid, std::string label) {
    Dataset ds;
    ds.label = std::move(label);
    ds.kind = DatasetKind::Volume;
    ds.grids.push_back(std::move(grid));
    return ds;
}

Dataset make_points_dataset(PointSet points, std::string label) {
    Dataset ds;
    ds.label = std::move(label);
    ds.kind = DatasetKind::Points;
    ds.points = build_point_grid(std::move(points));
    ds.grids.push_back(ds.points->grid.clone());
    return ds;
}

Dataset make_amr_dataset(AmrStack stack, std::string label) {
    if (!stack.refinement_masked) stack = mask_refined(std::move(stack));
    Dataset ds;
    ds.label = std::move(label);
    ds.kind = DatasetKind::Amr;
    ds.grids = std::move(stack.levels);
    return ds;
}

Dataset load_dataset(const std::string& ref, uint64_t seed) {
    const std::vector<std::string> f = split(ref, ':');
    if (f[0] == "synthetic" && (f.size() == 2 || f.size() == 3)) {
        const int dim = f.size() == 3 ? parse_int_field(f[2], ref) : 128;
        SyntheticParams params;
        params.seed = seed;
        return make_volume_dataset(gen_synthetic(parse_synthetic_kind(f[1]), {dim, dim, dim}, params), ref);
    }
    if (f[0] == "amr" && f.size() >= 2 && f.size() <= 4 && f[1] == "synthetic") {
        const int levels = f.size() >= 3 ? parse_int_field(f[2], ref) : 3;
        const int dim = f.size() == 4 ? parse_int_field(f[3], ref) : 32;
        if (levels < 1 || levels > 6) throw Error(ErrorCode::UnknownDataset, "AMR level count must be in 1..6");
        return make_amr_dataset(gen_amr_stack(levels, dim), ref);
    }
    if (f[0] == "points" && f.size() >= 2 && f.size() <= 3 && f[1] == "synthetic") {
        const int n = f.size() == 3 ? parse_int_field(f[2], ref) : 10000;
        if (n < 1) throw Error(ErrorCode::UnknownDataset, "particle count must be positive");
        return make_points_dataset(gen_particles(size_t(n), seed), ref);
    }
    std::string path;
    bool points = false;
    if (f[0] == "svol" || f[0] == "xyz") {
        path = ref.substr(f[0].size() + 1);
        points = f[0] == "xyz";
    } else if (ends_with(ref, ".svol") || ends_with(ref, ".xyz")) {
        path = ref;
        points = ends_with(ref, ".xyz");
    } else {
        throw Error(ErrorCode::UnknownDataset, "unknown dataset '" + ref + "'");
    }
    require_file(path);
    if (points) return make_points_dataset(read_xyz_file(path), ref);
    return make_volume_dataset(read_svol_file(path), ref);
}

GaussianModel fit_dataset(const Dataset& ds, const LodConfig& cfg, FitStats* stats) {
    switch (ds.kind) {
    case DatasetKind::Points: return fit_points(*ds.points, cfg);
    case DatasetKind::Amr: {
        AmrStack stack;
        stack.refinement_masked = true;
        for (const SparseGrid& g : ds.grids) stack.levels.push_back(g.clone());
        GaussianModel m = fit_amr(stack, cfg);
        m.source_label = ds.label;
        return m;
    }
    case DatasetKind::Volume: break;
    }
    GaussianModel m = fit_grid(ds.grids.front(), cfg, stats);
    m.source_label = ds.label;
    return m;
}

Image8 render_gauss_image(const GaussianModel& model, const Bvh& bvh, const Camera& cam, const TransferFunction& tf,
                          const TraceConfig& trace, const Rgb& bg, RenderStats* stats) {
    Film film(cam.width, cam.height);
    RenderOptions opts;
    opts.background = bg;
    const RenderStats s = render(model, bvh, cam, film, tf, trace, opts);
    if (stats) *stats = s;
    return tonemap_8bit(film);
}

Image8 render_reference_image(const Dataset& ds, const Camera& cam, const TransferFunction& tf,
                              const MarchConfig& march, const Rgb& bg) {
    Film film(cam.width, cam.height);
    ReferenceOptions opts;
    opts.background = bg;
    render_reference(ds.reference_grids(), cam, film, tf, march, opts);
    return tonemap_8bit(film);
}

CompareResult run_compare(const Dataset& ds, const GaussianModel& model, const Bvh& bvh, const CompareConfig& cfg) {
    CompareResult out;
    out.gaussians = model.size();
    out.camera = cfg.camera ? *cfg.camera : default_camera(ds.bounds(), cfg.width, cfg.height);
    out.camera.width = cfg.width;
    out.camera.height = cfg.height;

    std::vector<double> ms;
    const int frames = std::max(cfg.frames, 1);
    for (int i = 0; i < frames; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        RenderStats s;
        Image8 img = render_gauss_image(model, bvh, out.camera, cfg.tf, cfg.trace, cfg.background, &s);
        ms.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
        if (i == 0) {
            out.gauss = std::move(img);
            out.stats = s;
        }
    }
    std::nth_element(ms.begin(), ms.begin() + ptrdiff_t(ms.size() / 2), ms.end());
    out.ms_per_frame = ms[ms.size() / 2];
    out.reference = render_reference_image(ds, out.camera, cfg.tf, cfg.march, cfg.background);
    out.psnr_db = psnr(out.gauss, out.reference);
    return out;
}

std::string csv_header() { return "dataset,lod,sigma,kappa,gaussians,psnr_db,ms_per_frame"; }

std::string format_db(double db) {
    if (std::isinf(db)) return db > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", db);
    return buf;
}

std::string csv_row(const std::string& dataset, int lod, int sigma, double kappa, const CompareResult& r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, ",%s,%d,%g,%zu,%s,%.3f", lod > 0 ? std::to_string(lod).c_str() : "custom", sigma,
                  kappa, r.gaussians, format_db(r.psnr_db).c_str(), r.ms_per_frame);
    return dataset + buf;
}

} // namespace voxgauss
