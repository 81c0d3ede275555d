// Copyright 2026 The voxgauss Authors
// SPDX-License-Identifier: Apache-2.0

#include <voxgauss/render_service.hpp>

#include <httplib.h>
#include <json.hpp>

#include <charconv>
#include <chrono>

namespace voxgauss {

using nlohmann::json;

namespace {

HttpResult json_result(int status, const json& j) { return {status, "application/json", j.dump()}; }

HttpResult error_result(int status, const std::string& message) {
    return json_result(status, json{{"error", message}});
}

int status_for(const Error& e) {
    switch (e.code()) {
    case ErrorCode::UnknownDataset: return 404;
    default: return 422;
    }
}

std::string get_or(const std::map<std::string, std::string>& q, const std::string& key, const std::string& def) {
    auto it = q.find(key);
    return it == q.end() ? def : it->second;
}

int parse_dim(const std::string& s) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || v < 1 || v > 4096)
        throw Error(ErrorCode::InvalidArgument, "image size must be an integer in [1, 4096]");
    return v;
}

SceneRequest parse_scene_request(const json& j) {
    if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "body must be a JSON object");
    if (!j.contains("dataset") || !j["dataset"].is_string())
        throw Error(ErrorCode::InvalidArgument, "'dataset' must be a string");
    SceneRequest req;
    req.dataset = j["dataset"].get<std::string>();
    const int lod = j.value("lod", 3);
    req.lod = lod_preset(lod);
    if (j.contains("dense_block")) req.lod.dense_block = j["dense_block"].get<int>();
    if (j.contains("sparse")) req.lod.sparse_strategy = parse_sparse_strategy(j["sparse"].get<std::string>());
    if (j.contains("sigma")) req.lod.sigma_multiplier = j["sigma"].get<int>();
    if (j.contains("opacity_threshold")) req.lod.opacity_threshold = j["opacity_threshold"].get<double>();
    if (j.contains("kappa")) req.trace.kappa = j["kappa"].get<double>();
    if (j.contains("id")) req.id = j["id"].get<std::string>();
    req.lod.validate();
    req.trace.validate();
    return req;
}

json psnr_json(double db) {
    if (std::isinf(db)) return "inf";
    return db;
}

} // namespace

std::shared_ptr<const Scene> build_scene(const SceneRequest& req) {
    auto scene = std::make_shared<Scene>();
    scene->dataset = load_dataset(req.dataset);
    scene->model = fit_dataset(scene->dataset, req.lod);
    if (scene->model.empty()) throw Error(ErrorCode::EmptyModel, "no Gaussian passed the opacity threshold");
    scene->bvh = build_bvh(scene->model);
    scene->trace = req.trace;
    return scene;
}

RenderService::RenderService(ServiceConfig cfg, SceneBuilder builder)
    : cfg_(cfg), builder_(std::move(builder)), server_(std::make_unique<httplib::Server>()) {
    const unsigned threads = cfg_.threads ? cfg_.threads : std::max(4u, std::thread::hardware_concurrency());
    server_->new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
    install_routes();
}

RenderService::~RenderService() { stop(); }

bool RenderService::lookup(const std::string& id, std::shared_ptr<const Scene>& scene, std::string& resolved) {
    std::shared_lock lock(mutex_);
    resolved = id.empty() ? latest_ : id;
    auto it = scenes_.find(resolved);
    if (it == scenes_.end()) return false;
    scene = it->second.scene;
    return true;
}

HttpResult RenderService::post_scene(const std::string& body) {
    SceneRequest req;
    try {
        req = parse_scene_request(json::parse(body));
    } catch (const Error& e) {
        return error_result(422, e.what());
    } catch (const json::exception& e) {
        return error_result(422, e.what());
    }

    bool expected = false;
    if (!building_.compare_exchange_strong(expected, true)) return error_result(409, "a scene build is in progress");
    struct Release {
        std::atomic<bool>& flag;
        ~Release() { flag.store(false); }
    } release{building_};

    std::shared_ptr<const Scene> scene;
    try {
        scene = builder_(req);
    } catch (const Error& e) {
        return error_result(status_for(e), e.what());
    }
    ++builds_;
    std::string id;
    {
        std::unique_lock lock(mutex_);
        id = req.id.empty() ? "s" + std::to_string(next_id_++) : req.id;
        scenes_[id] = Slot{scene, {}};
        latest_ = id;
    }
    return json_result(200, json{{"id", id}, {"gaussians", scene->model.size()}});
}

HttpResult RenderService::get_frame(const std::map<std::string, std::string>& query) {
    std::shared_ptr<const Scene> scene;
    std::string id;
    if (!lookup(get_or(query, "scene", ""), scene, id)) return error_result(404, "unknown scene");
    Image8 img;
    RenderStats stats;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const int w = parse_dim(get_or(query, "w", "256"));
        const int h = parse_dim(get_or(query, "h", "256"));
        const std::string cam_text = get_or(query, "cam", "");
        const Camera cam =
            cam_text.empty() ? default_camera(scene->dataset.bounds(), w, h) : parse_camera(cam_text, w, h);
        const TransferFunction tf = tf_by_name(get_or(query, "tf", "gray"));
        const Rgb bg = query.count("bg") ? parse_rgb(query.at("bg")) : Rgb{0, 0, 0};
        const std::string renderer = get_or(query, "renderer", "gauss");
        if (renderer == "gauss") {
            img = render_gauss_image(scene->model, scene->bvh, cam, tf, scene->trace, bg, &stats);
        } else if (renderer == "ref") {
            img = render_reference_image(scene->dataset, cam, tf, MarchConfig{}, bg);
        } else {
            return error_result(422, "renderer must be gauss or ref");
        }
    } catch (const Error& e) {
        return error_result(422, e.what());
    }
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    {
        std::unique_lock lock(mutex_);
        auto it = scenes_.find(id);
        if (it != scenes_.end() && it->second.scene == scene) {
            it->second.stats.last_frame_ms = ms;
            it->second.stats.hit_buffer_overflows += stats.overflows;
            ++it->second.stats.subframes;
        }
    }
    return {200, "application/octet-stream", encode_ppm(img)};
}

HttpResult RenderService::get_stats(const std::map<std::string, std::string>& query) {
    std::shared_lock lock(mutex_);
    const std::string id = get_or(query, "scene", latest_);
    auto it = scenes_.find(id);
    if (it == scenes_.end()) return error_result(404, "unknown scene");
    const Stats& s = it->second.stats;
    return json_result(200, json{{"scene", id},
                                 {"gaussians", it->second.scene->model.size()},
                                 {"last_frame_ms", s.last_frame_ms},
                                 {"hit_buffer_overflows", s.hit_buffer_overflows},
                                 {"subframes", s.subframes},
                                 {"scene_builds", builds_.load()}});
}

HttpResult RenderService::post_compare(const std::string& body) {
    json j;
    try {
        j = json::parse(body.empty() ? std::string("{}") : body);
        if (!j.is_object()) return error_result(422, "body must be a JSON object");
    } catch (const json::exception& e) {
        return error_result(422, e.what());
    }
    std::shared_ptr<const Scene> scene;
    std::string id;
    if (!lookup(j.value("scene", std::string()), scene, id)) return error_result(404, "unknown scene");
    try {
        const int w = j.value("w", 256), h = j.value("h", 256);
        parse_dim(std::to_string(w));
        parse_dim(std::to_string(h));
        const std::string cam_text = j.value("cam", std::string());
        const Camera cam =
            cam_text.empty() ? default_camera(scene->dataset.bounds(), w, h) : parse_camera(cam_text, w, h);
        const TransferFunction tf = tf_by_name(j.value("tf", std::string("gray")));
        const Image8 g = render_gauss_image(scene->model, scene->bvh, cam, tf, scene->trace, {0, 0, 0});
        const Image8 r = render_reference_image(scene->dataset, cam, tf, MarchConfig{}, {0, 0, 0});
        return json_result(200, json{{"scene", id}, {"psnr_db", psnr_json(psnr(g, r))}});
    } catch (const Error& e) {
        return error_result(422, e.what());
    } catch (const json::exception& e) {
        return error_result(422, e.what());
    }
}

void RenderService::install_routes() {
    auto reply = [](httplib::Response& res, const HttpResult& r) {
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    };
    auto params = [](const httplib::Request& req) {
        std::map<std::string, std::string> q;
        for (const auto& [k, v] : req.params) q.emplace(k, v);
        return q;
    };
    server_->Post("/api/scene", [=, this](const httplib::Request& req, httplib::Response& res) {
        reply(res, post_scene(req.body));
    });
    server_->Get("/api/frame", [=, this](const httplib::Request& req, httplib::Response& res) {
        reply(res, get_frame(params(req)));
    });
    server_->Get("/api/stats", [=, this](const httplib::Request& req, httplib::Response& res) {
        reply(res, get_stats(params(req)));
    });
    server_->Post("/api/compare", [=, this](const httplib::Request& req, httplib::Response& res) {
        reply(res, post_compare(req.body));
    });
}

int RenderService::start(const std::string& host, int port) {
    const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw Error(ErrorCode::IoFailure, "cannot bind " + host + ":" + std::to_string(port));
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    return bound;
}

void RenderService::listen(const std::string& host, int port) {
    if (!server_->listen(host, port)) throw Error(ErrorCode::IoFailure, "cannot listen on " + host + ":" + std::to_string(port));
}

void RenderService::stop() {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
}

} // namespace voxgauss
