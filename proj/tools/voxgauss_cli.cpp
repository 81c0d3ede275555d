// Copyright 2026 The voxgauss Authors
// SPDX-License-Identifier: Apache-2.0

// voxgauss command line: fit, render, compare, gen, serve.

#include <voxgauss/experiment.hpp>
#include <voxgauss/render_service.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

using namespace voxgauss;

namespace {

struct InputOptions {
    std::string in;
    std::string points;
    std::vector<std::string> amr;
    bool mask = false;
    std::string dataset;
    uint64_t seed = 0;

    void add(CLI::App* app) {
        app->add_option("--in", in, "SVOL volume");
        app->add_option("--points", points, "particle file (x y z vx vy vz per line)");
        app->add_option("--amr", amr, "AMR levels, coarse to fine")->expected(1, -1);
        app->add_flag("--mask", mask, "deactivate coarse voxels covered by finer AMR levels");
        app->add_option("--dataset", dataset, "dataset reference, e.g. synthetic:gaussian_blob:128");
        app->add_option("--seed", seed, "seed for procedural data");
    }

    bool given() const { return !in.empty() || !points.empty() || !amr.empty() || !dataset.empty(); }

    Dataset load() const {
        const int n = int(!in.empty()) + int(!points.empty()) + int(!amr.empty()) + int(!dataset.empty());
        if (n != 1) throw Error(ErrorCode::InvalidArgument, "give exactly one of --in, --points, --amr, --dataset");
        if (!in.empty()) return make_volume_dataset(read_svol_file(in), in);
        if (!points.empty()) return make_points_dataset(read_xyz_file(points), points);
        if (!amr.empty()) {
            AmrStack stack;
            for (const std::string& p : amr) stack.levels.push_back(read_svol_file(p));
            validate_levels(stack);
            if (!mask) stack.refinement_masked = true; // keep levels as given
            return make_amr_dataset(std::move(stack), "amr");
        }
        return load_dataset(dataset, seed);
    }
};

struct LodOptions {
    int lod = 3;
    int dense_block = 0;
    std::string sparse;
    int sigma = 2;
    double opacity_threshold = 1e-4;
    double radius_min = 0.0;

    void add(CLI::App* app) {
        app->add_option("--lod", lod, "LOD preset")->check(CLI::Range(1, 5));
        app->add_option("--dense-block", dense_block, "dense block edge (overrides the preset)")
            ->check(CLI::IsMember({2, 4, 8}));
        app->add_option("--sparse", sparse, "sparse strategy (overrides the preset)")
            ->check(CLI::IsMember({"smart", "strict", "single"}));
        app->add_option("--sigma", sigma, "box half-size in radii")->check(CLI::Range(1, 3));
        app->add_option("--opacity-threshold", opacity_threshold, "drop groups at or below this mean value");
        app->add_option("--radius-min", radius_min, "minimum radius (world units, 0 = quarter voxel)");
    }

    bool custom() const { return dense_block != 0 || !sparse.empty(); }

    LodConfig config() const {
        LodConfig c = lod_preset(lod);
        if (dense_block) c.dense_block = dense_block;
        if (!sparse.empty()) c.sparse_strategy = parse_sparse_strategy(sparse);
        c.sigma_multiplier = sigma;
        c.opacity_threshold = opacity_threshold;
        c.radius_min = radius_min;
        c.validate();
        return c;
    }
};

struct ViewOptions {
    std::string tf = "gray";
    std::string bg = "0,0,0";
    std::string res = "256x256";
    std::string cam;
    double kappa = 0.01;

    void add(CLI::App* app) {
        app->add_option("--tf", tf, "transfer function")->check(CLI::IsMember({"gray", "jet", "bluewhite"}));
        app->add_option("--bg", bg, "background r,g,b in [0,1]");
        app->add_option("--res", res, "image size WxH");
        app->add_option("--cam", cam, "px,py,pz,lx,ly,lz,ux,uy,uz,fov_deg (default: framed automatically)");
        app->add_option("--kappa", kappa, "density threshold of the intersection ellipsoid");
    }

    Camera camera(const Aabb& scene) const {
        int w = 0, h = 0;
        parse_resolution(res, w, h);
        return cam.empty() ? default_camera(scene, w, h) : parse_camera(cam, w, h);
    }
    TraceConfig trace() const {
        TraceConfig t;
        t.kappa = kappa;
        t.validate();
        return t;
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_fit(const InputOptions& input, const LodOptions& lod, const std::string& out) {
    const Dataset ds = input.load();
    const auto t0 = std::chrono::steady_clock::now();
    FitStats stats;
    const GaussianModel model = fit_dataset(ds, lod.config(), &stats);
    const double secs = seconds_since(t0);
    write_ggm_file(model, out);
    std::printf("gaussians %zu\n", model.size());
    if (ds.kind == DatasetKind::Volume) {
        std::printf("dense_leaves %zu dense_gaussians %zu\n", stats.dense_leaves, stats.dense_gaussians);
        std::printf("sparse_leaves %zu sparse_gaussians %zu\n", stats.sparse_leaves, stats.sparse_gaussians);
        std::printf("tiles %zu tile_gaussians %zu\n", stats.tiles, stats.tile_gaussians);
    }
    std::printf("fit_seconds %.3f\n", secs);
    return 0;
}

int cmd_render(const std::string& model_path, const InputOptions& input, const ViewOptions& view, int sigma,
               const std::string& renderer, const std::string& out) {
    const TransferFunction tf = tf_by_name(view.tf);
    const Rgb bg = parse_rgb(view.bg);
    Image8 img;
    if (renderer == "ref") {
        const Dataset ds = input.load();
        img = render_reference_image(ds, view.camera(ds.bounds()), tf, MarchConfig{}, bg);
    } else {
        if (model_path.empty()) throw Error(ErrorCode::InvalidArgument, "--model is required for the gauss renderer");
        GaussianModel model = read_ggm_file(model_path);
        if (sigma != 0 && sigma != model.lod.sigma_multiplier) model.rebuild_aabbs(sigma);
        const Bvh bvh = build_bvh(model);
        RenderStats stats;
        img = render_gauss_image(model, bvh, view.camera(model.scene_aabb), tf, view.trace(), bg, &stats);
        std::printf("rays %llu candidates %llu hits %llu overflows %llu\n", (unsigned long long)stats.rays,
                    (unsigned long long)stats.candidates, (unsigned long long)stats.hits,
                    (unsigned long long)stats.overflows);
    }
    write_ppm_file(img, out);
    return 0;
}

int cmd_compare(const InputOptions& input, const LodOptions& lod, const ViewOptions& view, int frames,
                const std::string& out_prefix, bool no_header) {
    const Dataset ds = input.load();
    const GaussianModel model = fit_dataset(ds, lod.config());
    const Bvh bvh = build_bvh(model);
    CompareConfig cc;
    cc.trace = view.trace();
    cc.tf = tf_by_name(view.tf);
    cc.background = parse_rgb(view.bg);
    cc.frames = frames;
    const Camera cam = view.camera(ds.bounds());
    cc.camera = cam;
    cc.width = cam.width;
    cc.height = cam.height;
    const CompareResult r = run_compare(ds, model, bvh, cc);
    if (!out_prefix.empty()) {
        write_ppm_file(r.gauss, out_prefix + "_gauss.ppm");
        write_ppm_file(r.reference, out_prefix + "_ref.ppm");
    }
    if (!no_header) std::puts(csv_header().c_str());
    std::puts(csv_row(ds.label, lod.custom() ? 0 : lod.lod, lod.sigma, view.kappa, r).c_str());
    return 0;
}

int cmd_gen(const std::string& kind, int dim, uint64_t seed, double amplitude, int particles, int amr_levels,
            const std::string& out) {
    if (particles > 0) {
        std::ofstream os(out);
        if (!os) throw Error(ErrorCode::IoFailure, "cannot open " + out);
        write_xyz(gen_particles(size_t(particles), seed), os);
        return 0;
    }
    if (amr_levels > 0) {
        const AmrStack stack = gen_amr_stack(amr_levels, dim, amplitude);
        for (size_t k = 0; k < stack.levels.size(); ++k) {
            const std::string path = out + "_l" + std::to_string(k) + ".svol";
            write_svol_file(stack.levels[k], path);
            std::puts(path.c_str());
        }
        return 0;
    }
    SyntheticParams p;
    p.seed = seed;
    p.amplitude = amplitude;
    write_svol_file(gen_synthetic(parse_synthetic_kind(kind), {dim, dim, dim}, p), out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse volume to Gaussian conversion and rendering"};
    app.require_subcommand(1);

    InputOptions fit_in;
    LodOptions fit_lod;
    std::string fit_out;
    CLI::App* fit = app.add_subcommand("fit", "fit a Gaussian model and write GGM");
    fit_in.add(fit);
    fit_lod.add(fit);
    fit->add_option("--out", fit_out, "output GGM")->required();

    InputOptions render_in;
    ViewOptions render_view;
    std::string render_model, render_out, renderer = "gauss";
    int render_sigma = 0;
    CLI::App* rend = app.add_subcommand("render", "render a GGM model or a reference volume to PPM");
    rend->add_option("--model", render_model, "GGM model");
    render_in.add(rend);
    render_view.add(rend);
    rend->add_option("--sigma", render_sigma, "rebuild boxes with this sigma multiplier")->check(CLI::Range(1, 3));
    rend->add_option("--renderer", renderer, "gauss or ref")->check(CLI::IsMember({"gauss", "ref"}));
    rend->add_option("--out", render_out, "output PPM")->required();

    InputOptions cmp_in;
    LodOptions cmp_lod;
    ViewOptions cmp_view;
    int frames = 16;
    std::string cmp_prefix;
    bool no_header = false;
    CLI::App* cmp = app.add_subcommand("compare", "fit, render both paths and print a CSV row");
    cmp_in.add(cmp);
    cmp_lod.add(cmp);
    cmp_view.add(cmp);
    cmp->add_option("--frames", frames, "timed frames (median reported)")->check(CLI::PositiveNumber);
    cmp->add_option("--out", cmp_prefix, "write <prefix>_gauss.ppm and <prefix>_ref.ppm");
    cmp->add_flag("--no-header", no_header, "omit the CSV header");

    std::string gen_kind = "gaussian_blob", gen_out;
    int gen_dim = 128, gen_particles = 0, gen_amr = 0;
    uint64_t gen_seed = 0;
    double gen_amp = 1.0;
    CLI::App* gen = app.add_subcommand("gen", "write a procedural dataset");
    gen->add_option("--kind", gen_kind, "gaussian_blob, sphere_shell, checker, wavelet_like");
    gen->add_option("--dim", gen_dim, "edge length in voxels")->check(CLI::Range(8, 1024));
    gen->add_option("--amplitude", gen_amp, "peak value");
    gen->add_option("--particles", gen_particles, "write this many particles as text instead");
    gen->add_option("--amr-levels", gen_amr, "write an AMR stack as <out>_l<k>.svol instead");
    gen->add_option("--seed", gen_seed, "seed");
    gen->add_option("--out", gen_out, "output path")->required();

    std::string host = "127.0.0.1";
    int port = 8080;
    unsigned threads = 0;
    CLI::App* serve = app.add_subcommand("serve", "run the HTTP render service");
    serve->add_option("--host", host, "bind address");
    serve->add_option("--port", port, "port");
    serve->add_option("--threads", threads, "worker threads (0 = automatic)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (fit->parsed()) return cmd_fit(fit_in, fit_lod, fit_out);
        if (rend->parsed()) return cmd_render(render_model, render_in, render_view, render_sigma, renderer, render_out);
        if (cmp->parsed()) return cmd_compare(cmp_in, cmp_lod, cmp_view, frames, cmp_prefix, no_header);
        if (gen->parsed()) return cmd_gen(gen_kind, gen_dim, gen_seed, gen_amp, gen_particles, gen_amr, gen_out);
        if (serve->parsed()) {
            RenderService svc(ServiceConfig{threads, 0});
            std::printf("listening on %s:%d\n", host.c_str(), port);
            std::fflush(stdout);
            svc.listen(host, port);
            return 0;
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error [%s]: %s\n", to_string(e.code()), e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
