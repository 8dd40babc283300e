#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "svipipe/records.hpp"

// Provider abstraction: tile-indexed discovery plus per-image fetch. New
// platforms plug in behind this interface without touching the downloader.

namespace svipipe::acquire {

/// Web-Mercator tile address.
struct TileCoord {
    int z = 0;
    int x = 0;
    int y = 0;

    std::string unit_id() const {
        return "tile/" + std::to_string(z) + "/" + std::to_string(x) + "/" +
               std::to_string(y);
    }

    friend bool operator<(const TileCoord& a, const TileCoord& b) {
        if (a.z != b.z) return a.z < b.z;
        if (a.x != b.x) return a.x < b.x;
        return a.y < b.y;
    }
    friend bool operator==(const TileCoord& a, const TileCoord& b) {
        return a.z == b.z && a.x == b.x && a.y == b.y;
    }
};

/// Transient failure: retried with exponential backoff.
struct RetryableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Credentials rejected: aborts the whole run.
struct AuthError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Provider {
  public:
    virtual ~Provider() = default;

    /// Image metadata for one discovery tile.
    virtual std::vector<ImageRecord> discover(const TileCoord& tile) = 0;

    /// Image bytes (JPEG). `size` is a provider-specific size hint.
    virtual std::vector<uint8_t> fetch(const std::string& image_id, int size) = 0;
};

/// Generic HTTP(S) tile provider. Endpoints:
///   GET /tiles/{z}/{x}/{y}          -> {"images": [record...]}
///   GET /images/{id}?size=N         -> image bytes
/// The API key, when set, is sent as the X-Api-Key header. The bundled mock
/// provider server speaks exactly this protocol.
class HttpProvider : public Provider {
  public:
    HttpProvider(std::string base_url, std::string api_key = "", int timeout_s = 30)
        : base_url_(std::move(base_url)), api_key_(std::move(api_key)),
          timeout_s_(timeout_s) {}

    std::vector<ImageRecord> discover(const TileCoord& tile) override {
        const std::string path = "/tiles/" + std::to_string(tile.z) + "/" +
                                 std::to_string(tile.x) + "/" + std::to_string(tile.y);
        const auto body = get(path);
        const auto doc = nlohmann::json::parse(body);

        std::vector<ImageRecord> records;
        for (const auto& j : doc.value("images", nlohmann::json::array())) {
            ImageRecord r;
            r.image_id = j.at("image_id").get<std::string>();
            r.location = geo::GeoPoint(j.at("lat").get<double>(), j.at("lon").get<double>());
            r.captured_at_ms = j.at("captured_at_ms").get<int64_t>();
            r.compass_angle = j.at("compass_angle").get<double>();
            r.is_pano = j.at("is_pano").get<bool>();
            r.sequence_id = j.value("sequence_id", "");
            r.creator_id = j.value("creator_id", "");
            r.organization_id = j.value("organization_id", "");
            r.validate();
            records.push_back(std::move(r));
        }
        return records;
    }

    std::vector<uint8_t> fetch(const std::string& image_id, int size) override {
        const std::string body =
            get("/images/" + image_id + "?size=" + std::to_string(size));
        return {body.begin(), body.end()};
    }

  private:
    std::string get(const std::string& path) {
        httplib::Client client(base_url_);
        client.set_connection_timeout(timeout_s_);
        client.set_read_timeout(timeout_s_);
        httplib::Headers headers;
        if (!api_key_.empty()) headers.emplace("X-Api-Key", api_key_);

        const auto res = client.Get(path, headers);
        if (!res) throw RetryableError("connection failed: " + base_url_ + path);
        if (res->status == 401 || res->status == 403) {
            throw AuthError("credentials rejected by provider");
        }
        if (res->status == 429 || res->status >= 500) {
            throw RetryableError("HTTP " + std::to_string(res->status) + " for " + path);
        }
        if (res->status != 200) {
            throw std::runtime_error("HTTP " + std::to_string(res->status) + " for " + path);
        }
        return res->body;
    }

    std::string base_url_;
    std::string api_key_;
    int timeout_s_;
};

/// Resolves place names to regions (GeoJSON features).
class Geocoder {
  public:
    virtual ~Geocoder() = default;

    /// GeoJSON of the named place, or nullopt when unknown.
    virtual std::optional<nlohmann::json> lookup(const std::string& name) = 0;
};

/// GET /geocode?q=<name> -> GeoJSON feature, 404 on miss.
class HttpGeocoder : public Geocoder {
  public:
    explicit HttpGeocoder(std::string base_url) : base_url_(std::move(base_url)) {}

    std::optional<nlohmann::json> lookup(const std::string& name) override {
        httplib::Client client(base_url_);
        client.set_read_timeout(30);
        httplib::Params params{{"q", name}};
        const auto res = client.Get("/geocode", params, httplib::Headers{});
        if (!res) throw RetryableError("geocoder unreachable: " + base_url_);
        if (res->status == 404) return std::nullopt;
        if (res->status != 200) {
            throw std::runtime_error("geocoder HTTP " + std::to_string(res->status));
        }
        return nlohmann::json::parse(res->body);
    }

  private:
    std::string base_url_;
};

}  // namespace svipipe::acquire
