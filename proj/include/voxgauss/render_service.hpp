// Copyright 2026 The voxgauss Authors
// SPDX-License-Identifier: Apache-2.0

///
/// @file render_service.hpp
///
/// HTTP/1.1 facade over scene building and rendering.
///
///   POST /api/scene    {"dataset", "lod", "dense_block", "sparse", "sigma", "kappa",
///                       "opacity_threshold", "id"?}           -> {"id", "gaussians"}
///   GET  /api/frame    ?scene&cam&tf&renderer=gauss|ref&w&h   -> binary PPM
///   GET  /api/stats    ?scene                                 -> {"gaussians", "last_frame_ms",
///                                                                 "hit_buffer_overflows", "subframes",
///                                                                 "scene_builds"}
///   POST /api/compare  {"scene", "cam"?, "tf"?, "w"?, "h"?}   -> {"psnr_db"}
///
/// `cam` is "px,py,pz,lx,ly,lz,ux,uy,uz,fov_deg"; without it the scene is
/// framed automatically. An infinite PSNR is sent as the string "inf".
///

#pragma once

#include <voxgauss/experiment.hpp>

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <thread>

namespace httplib {
class Server;
}

namespace voxgauss {

struct SceneRequest {
    std::string dataset;
    LodConfig lod;
    TraceConfig trace;
    /// Replaces this scene when set; otherwise a new id is assigned.
    std::string id;
};

struct Scene {
    Dataset dataset;
    GaussianModel model;
    Bvh bvh;
    TraceConfig trace;
};

/// Builds a scene; throws voxgauss::Error (UnknownDataset maps to 404).
using SceneBuilder = std::function<std::shared_ptr<const Scene>(const SceneRequest&)>;

std::shared_ptr<const Scene> build_scene(const SceneRequest& req);

struct HttpResult {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

struct ServiceConfig {
    /// Worker threads serving requests; 0 means max(4, logical cores).
    unsigned threads = 0;
    uint64_t seed = 0;
};

class RenderService {
public:
    explicit RenderService(ServiceConfig cfg = {}, SceneBuilder builder = build_scene);
    ~RenderService();
    RenderService(const RenderService&) = delete;
    RenderService& operator=(const RenderService&) = delete;

    HttpResult post_scene(const std::string& body);
    HttpResult get_frame(const std::map<std::string, std::string>& query);
    HttpResult get_stats(const std::map<std::string, std::string>& query);
    HttpResult post_compare(const std::string& body);

    /// Binds and serves on a background thread; port 0 picks a free port.
    /// Returns the bound port. Throws IoFailure.
    int start(const std::string& host, int port);
    /// Serves on the calling thread until stop().
    void listen(const std::string& host, int port);
    void stop();

    uint64_t scene_builds() const { return builds_.load(); }

private:
    struct Stats {
        double last_frame_ms = 0.0;
        uint64_t hit_buffer_overflows = 0;
        uint64_t subframes = 0;
    };
    struct Slot {
        std::shared_ptr<const Scene> scene;
        Stats stats;
    };

    void install_routes();
    bool lookup(const std::string& id, std::shared_ptr<const Scene>& scene, std::string& resolved);

    ServiceConfig cfg_;
    SceneBuilder builder_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;

    mutable std::shared_mutex mutex_;
    std::map<std::string, Slot> scenes_;
    std::string latest_;
    uint64_t next_id_ = 1;

    std::atomic<bool> building_{false};
    std::atomic<uint64_t> builds_{0};
};

} // namespace voxgauss
