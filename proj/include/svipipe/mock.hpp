#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <set>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include <chrono>

#include "svipipe/acquire.hpp"
#include "svipipe/image.hpp"
#include "svipipe/records.hpp"
#include "svipipe/rng.hpp"
#include "svipipe/transform.hpp"

// Mock SVI provider: a deterministic 50-image corpus served over the same
// HTTP protocol as a real tile provider, with fault-injection controls.
// Ships with the repo so the full pipeline runs offline.

namespace svipipe::mock {

namespace detail {

struct Rng : svipipe::rng::SplitMix64 {
    using SplitMix64::SplitMix64;

    // Signed variant: the corpus math mixes offsets that can go negative.
    int below(int n) { return static_cast<int>(SplitMix64::below(static_cast<size_t>(n))); }
};

inline uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (const char c : s) {
        h ^= static_cast<uint8_t>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace detail

/// The "miniville" test town: a 4 x 6 km box.
inline geo::BBox mini_bbox() { return geo::BBox::of(1.280, 103.820, 1.320, 103.880); }

/// Deterministic 50-image corpus: 5 sequences of 10 images along straight
/// streets, mixed pano/flat, day/night, 2019-2024, with one high-speed
/// outlier pair in seq05.
inline std::vector<ImageRecord> make_mini_corpus() {
    std::vector<ImageRecord> records;
    detail::Rng rng(42);

    // Sequence start points, headings (deg) and capture dates.
    struct Seq {
        double lat0, lon0, heading_deg;
        int64_t start_ms;
        int64_t step_ms;
        bool pano;
        const char* creator;
        const char* organization;
    };
    // Timestamps are UTC; local time in miniville is UTC+7 (lon ~104).
    const Seq seqs[5] = {
        // 2019-06-12 03:00 UTC = 10:00 local (day)
        {1.2850, 103.8250, 80.0, 1560308400000LL, 4000, true, "user_a", "org_city"},
        // 2021-01-20 06:30 UTC = 13:30 local (day)
        {1.2950, 103.8350, 10.0, 1611124200000LL, 5000, true, "user_b", ""},
        // 2022-09-03 15:00 UTC = 22:00 local (night)
        {1.3050, 103.8450, 135.0, 1662217200000LL, 3000, false, "user_a", ""},
        // 2023-04-15 02:00 UTC = 09:00 local (day)
        {1.3120, 103.8600, 350.0, 1681524000000LL, 6000, false, "user_c", "org_lab"},
        // 2024-11-30 05:45 UTC = 12:45 local (day)
        {1.2900, 103.8700, 225.0, 1732945500000LL, 2000, false, "user_b", ""},
    };

    int serial = 0;
    for (int s = 0; s < 5; ++s) {
        const Seq& seq = seqs[s];
        double lat = seq.lat0;
        double lon = seq.lon0;
        for (int i = 0; i < 10; ++i) {
            ImageRecord r;
            char id[16];
            std::snprintf(id, sizeof id, "img%04d", ++serial);
            r.image_id = id;
            r.location = geo::GeoPoint(lat, lon);
            r.captured_at_ms = seq.start_ms + static_cast<int64_t>(i) * seq.step_ms;
            double compass = seq.heading_deg + rng.range(-8.0, 8.0);
            while (compass < 0.0) compass += 360.0;
            while (compass >= 360.0) compass -= 360.0;
            r.compass_angle = compass;
            r.is_pano = seq.pano;
            r.sequence_id = "seq0" + std::to_string(s + 1);
            r.creator_id = seq.creator;
            r.organization_id = seq.organization;
            records.push_back(r);

            // Walk along the heading. seq05 jumps ~500 m between points 5
            // and 6 in 2 s (900 km/h, the speed outlier).
            double step_m = rng.range(30.0, 70.0);
            if (s == 4 && i == 4) step_m = 500.0;
            const double heading_rad = geo::deg2rad(seq.heading_deg);
            lat += step_m * std::cos(heading_rad) / 111194.9;
            lon += step_m * std::sin(heading_rad) /
                   (111194.9 * std::cos(geo::deg2rad(lat)));
        }
    }
    return records;
}

/// Deterministic synthetic image for a record: sky/ground split with bands
/// and boxes keyed by the image id. Panoramas are 2:1, flat images 4:3.
/// Even-serial images are smooth (blurry), odd ones carry sharp texture.
inline img::Image render_mock_image(const ImageRecord& r) {
    const uint64_t h = detail::fnv1a(r.image_id);
    const int w = r.is_pano ? 256 : 192;
    const int ht = r.is_pano ? 128 : 144;
    img::Image im(w, ht, 3);

    const int horizon = ht / 2;
    const uint8_t sky_r = 120 + static_cast<uint8_t>(h % 60);
    const uint8_t sky_g = 160 + static_cast<uint8_t>((h >> 8) % 60);
    const uint8_t ground = 60 + static_cast<uint8_t>((h >> 16) % 80);
    const bool sharp = (h >> 24) % 2 == 1;

    for (int y = 0; y < ht; ++y) {
        for (int x = 0; x < w; ++x) {
            uint8_t* px = im.pixel(x, y);
            if (y < horizon) {
                px[0] = sky_r;
                px[1] = sky_g;
                px[2] = 230;
            } else {
                const uint8_t g =
                    static_cast<uint8_t>(ground + (y - horizon) * 40 / (ht - horizon));
                px[0] = px[1] = px[2] = g;
            }
            if (sharp && y >= horizon && ((x / 4) + (y / 4)) % 2 == 0) {
                px[0] = px[0] > 128 ? px[0] - 90 : px[0] + 90;
                px[1] = px[0];
                px[2] = px[0];
            }
        }
    }

    // A few colored boxes (building fronts, vegetation patches).
    detail::Rng rng(h);
    const int boxes = 2 + rng.below(3);
    for (int b = 0; b < boxes; ++b) {
        const int bw = 8 + rng.below(w / 4);
        const int bh = 8 + rng.below(ht / 3);
        const int bx = rng.below(std::max(1, w - bw));
        const int by = horizon - bh / 3 + rng.below(std::max(1, ht / 3));
        const uint8_t cr = static_cast<uint8_t>(40 + rng.below(180));
        const uint8_t cg = static_cast<uint8_t>(40 + rng.below(180));
        const uint8_t cb = static_cast<uint8_t>(40 + rng.below(180));
        for (int y = std::max(0, by); y < std::min(ht, by + bh); ++y) {
            for (int x = std::max(0, bx); x < std::min(w, bx + bw); ++x) {
                uint8_t* px = im.pixel(x, y);
                px[0] = cr;
                px[1] = cg;
                px[2] = cb;
            }
        }
    }
    return im;
}

inline std::vector<uint8_t> mock_image_jpeg(const ImageRecord& r) {
    return img::encode_jpeg(render_mock_image(r), 90);
}

/// Relative-depth panorama fixture matching render_mock_image geometry:
/// far sky above the horizon, ground plane rolling off below.
inline transform::DepthMap mock_depth_for(const ImageRecord& r, bool absolute = true) {
    const img::Image im = render_mock_image(r);
    transform::DepthMap d;
    d.width = im.width;
    d.height = im.height;
    d.absolute = absolute;
    d.values.resize(static_cast<size_t>(im.width) * im.height);
    const int horizon = im.height / 2;
    for (int y = 0; y < im.height; ++y) {
        for (int x = 0; x < im.width; ++x) {
            float meters;
            if (y < horizon) {
                meters = 45.0f;  // sky shell
            } else {
                // Camera 2.5 m above a flat ground plane.
                const double lat_deg = 90.0 - (y + 0.5) / im.height * 180.0;
                const double depression = std::max(1e-3, -geo::deg2rad(lat_deg));
                meters = static_cast<float>(std::min(45.0, 2.5 / std::tan(depression)));
            }
            d.values[static_cast<size_t>(y) * im.width + x] =
                absolute ? meters : static_cast<float>(meters / 45.0 * 255.0);
        }
    }
    return d;
}

struct FaultPlan {
    int latency_ms = 0;
    int fail_429_every = 0;  // every Nth request answers 429 (0 = off)
    int fail_500_every = 0;
    std::set<std::string> broken_image_ids;  // these fetches always 500
};

struct ServerStats {
    int64_t total_requests = 0;
    int max_concurrent = 0;
};

/// HTTP mock of a tile provider plus a tiny geocoder, with fault injection
/// and concurrency accounting.
class MockProviderServer {
  public:
    explicit MockProviderServer(std::string api_key = "")
        : api_key_(std::move(api_key)), records_(make_mini_corpus()) {
        for (const auto& r : records_) by_id_.emplace(r.image_id, &r);
        install_routes();
    }

    /// Binds (any free port by default) and serves on a background thread.
    int start(int port = 0) {
        if (port == 0) {
            port_ = server_.bind_to_any_port("127.0.0.1");
        } else {
            if (!server_.bind_to_port("127.0.0.1", port)) {
                throw std::runtime_error("mock server cannot bind port " +
                                         std::to_string(port));
            }
            port_ = port;
        }
        if (port_ <= 0) throw std::runtime_error("mock server failed to bind");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
        return port_;
    }

    void stop() {
        if (thread_.joinable()) {
            server_.stop();
            thread_.join();
        }
    }

    ~MockProviderServer() { stop(); }

    int port() const { return port_; }
    std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }

    void set_faults(const FaultPlan& plan) {
        std::lock_guard lock(mutex_);
        faults_ = plan;
    }

    ServerStats stats() const {
        std::lock_guard lock(mutex_);
        return stats_;
    }

    void reset_stats() {
        std::lock_guard lock(mutex_);
        stats_ = ServerStats{};
    }

    const std::vector<ImageRecord>& corpus() const { return records_; }

  private:
    struct ConcurrencyGuard {
        explicit ConcurrencyGuard(MockProviderServer& s) : server(s) {
            const int now = ++server.concurrent_;
            std::lock_guard lock(server.mutex_);
            ++server.stats_.total_requests;
            server.stats_.max_concurrent = std::max(server.stats_.max_concurrent, now);
        }
        ~ConcurrencyGuard() { --server.concurrent_; }
        MockProviderServer& server;
    };

    // Returns true when the request was answered by a fault or auth check.
    bool preamble(const httplib::Request& req, httplib::Response& res) {
        FaultPlan plan;
        {
            std::lock_guard lock(mutex_);
            plan = faults_;
        }
        if (plan.latency_ms > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(plan.latency_ms));
        }
        if (!api_key_.empty() && req.get_header_value("X-Api-Key") != api_key_) {
            res.status = 401;
            res.set_content("{\"error\":\"credentials rejected\"}", "application/json");
            return true;
        }
        const int64_t n = ++data_requests_;
        if (plan.fail_429_every > 0 && n % plan.fail_429_every == 0) {
            res.status = 429;
            res.set_content("{\"error\":\"rate limited\"}", "application/json");
            return true;
        }
        if (plan.fail_500_every > 0 && n % plan.fail_500_every == 0) {
            res.status = 500;
            res.set_content("{\"error\":\"internal\"}", "application/json");
            return true;
        }
        return false;
    }

    void install_routes() {
        server_.Get(R"(/tiles/(\d+)/(\d+)/(\d+))",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        ConcurrencyGuard guard(*this);
                        if (preamble(req, res)) return;
                        const int z = std::stoi(req.matches[1]);
                        const int x = std::stoi(req.matches[2]);
                        const int y = std::stoi(req.matches[3]);

                        nlohmann::json images = nlohmann::json::array();
                        for (const auto& r : records_) {
                            const auto t = acquire::tile_at(r.location, z);
                            if (t.x != x || t.y != y) continue;
                            images.push_back({{"image_id", r.image_id},
                                              {"lat", r.location.lat},
                                              {"lon", r.location.lon},
                                              {"captured_at_ms", r.captured_at_ms},
                                              {"compass_angle", r.compass_angle},
                                              {"is_pano", r.is_pano},
                                              {"sequence_id", r.sequence_id},
                                              {"creator_id", r.creator_id},
                                              {"organization_id", r.organization_id}});
                        }
                        res.set_content(nlohmann::json{{"images", images}}.dump(),
                                        "application/json");
                    });

        server_.Get(R"(/images/(img\d+))",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        ConcurrencyGuard guard(*this);
                        if (preamble(req, res)) return;
                        {
                            std::lock_guard lock(mutex_);
                            if (faults_.broken_image_ids.count(req.matches[1])) {
                                res.status = 500;
                                return;
                            }
                        }
                        const auto it = by_id_.find(req.matches[1]);
                        if (it == by_id_.end()) {
                            res.status = 404;
                            return;
                        }
                        const auto bytes = mock_image_jpeg(*it->second);
                        res.set_content(reinterpret_cast<const char*>(bytes.data()),
                                        bytes.size(), "image/jpeg");
                    });

        server_.Get("/geocode", [this](const httplib::Request& req, httplib::Response& res) {
            ConcurrencyGuard guard(*this);
            if (preamble(req, res)) return;
            if (req.get_param_value("q") != "miniville") {
                res.status = 404;
                res.set_content("{\"error\":\"place not found\"}", "application/json");
                return;
            }
            const auto b = mini_bbox();
            const nlohmann::json polygon = {
                {"type", "Feature"},
                {"geometry",
                 {{"type", "Polygon"},
                  {"coordinates",
                   {{{b.min_lon, b.min_lat},
                     {b.max_lon, b.min_lat},
                     {b.max_lon, b.max_lat},
                     {b.min_lon, b.max_lat},
                     {b.min_lon, b.min_lat}}}}}},
                {"properties", {{"name", "miniville"}}}};
            res.set_content(polygon.dump(), "application/json");
        });

        server_.Post("/control/faults",
                     [this](const httplib::Request& req, httplib::Response& res) {
                         const auto j = nlohmann::json::parse(req.body);
                         FaultPlan plan;
                         plan.latency_ms = j.value("latency_ms", 0);
                         plan.fail_429_every = j.value("fail_429_every", 0);
                         plan.fail_500_every = j.value("fail_500_every", 0);
                         set_faults(plan);
                         res.set_content("{\"ok\":true}", "application/json");
                     });

        server_.Get("/control/stats",
                    [this](const httplib::Request&, httplib::Response& res) {
                        const auto s = stats();
                        res.set_content(nlohmann::json{{"total_requests", s.total_requests},
                                                       {"max_concurrent", s.max_concurrent}}
                                            .dump(),
                                        "application/json");
                    });
    }

    std::string api_key_;
    std::vector<ImageRecord> records_;
    std::map<std::string, const ImageRecord*> by_id_;
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    mutable std::mutex mutex_;
    FaultPlan faults_;
    ServerStats stats_;
    std::atomic<int> concurrent_{0};
    std::atomic<int64_t> data_requests_{0};
};

}  // namespace svipipe::mock
