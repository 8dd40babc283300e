#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "svipipe/checkpoint.hpp"
#include "svipipe/csv.hpp"
#include "svipipe/geo.hpp"
#include "svipipe/geojson.hpp"
#include "svipipe/provider.hpp"
#include "svipipe/records.hpp"

// Region parsing, tile enumeration and the checkpointed parallel downloader.

namespace svipipe::acquire {

// ---- regions ----

/// Parsed acquisition region: one bounding box, or two when the input crosses
/// the antimeridian, plus an optional clip polygon.
struct Region {
    std::vector<geo::BBox> boxes;
    std::vector<geo::GeoPoint> clip_polygon;  // empty = box only

    bool contains(const geo::GeoPoint& p) const {
        bool in_box = false;
        for (const auto& b : boxes) {
            if (b.contains(p)) {
                in_box = true;
                break;
            }
        }
        if (!in_box) return false;
        if (clip_polygon.size() < 3) return true;

        bool inside = false;
        for (size_t i = 0, j = clip_polygon.size() - 1; i < clip_polygon.size(); j = i++) {
            const auto& a = clip_polygon[i];
            const auto& b = clip_polygon[j];
            if ((a.lat > p.lat) != (b.lat > p.lat) &&
                p.lon < (b.lon - a.lon) * (p.lat - a.lat) / (b.lat - a.lat) + a.lon) {
                inside = !inside;
            }
        }
        return inside;
    }
};

namespace detail {

inline bool ends_with_icase(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           std::equal(suffix.rbegin(), suffix.rend(), s.rbegin(), [](char a, char b) {
               return std::tolower(static_cast<unsigned char>(a)) ==
                      std::tolower(static_cast<unsigned char>(b));
           });
}

}  // namespace detail

/// Region described one of five ways; exactly one variant may be set.
struct RegionInput {
    std::vector<geo::GeoPoint> points;
    std::string csv_path;
    std::string geojson_path;
    std::optional<std::array<double, 4>> bbox;  // min_lon, min_lat, max_lon, max_lat
    std::string place_name;

    /// Classifies a CLI region argument: an existing .csv/.geojson file, a
    /// "min_lon,min_lat,max_lon,max_lat" box, a "lat,lon" point, or a place
    /// name.
    static RegionInput from_string(const std::string& arg) {
        RegionInput input;
        if (std::filesystem::exists(arg)) {
            if (detail::ends_with_icase(arg, ".csv")) {
                input.csv_path = arg;
            } else if (detail::ends_with_icase(arg, ".geojson") || detail::ends_with_icase(arg, ".json")) {
                input.geojson_path = arg;
            } else {
                throw std::runtime_error(
                    "region file must be .csv or .geojson (convert shapefiles first): " + arg);
            }
            return input;
        }

        std::vector<double> nums;
        {
            std::istringstream ss(arg);
            std::string tok;
            bool numeric = true;
            while (std::getline(ss, tok, ',')) {
                try {
                    size_t pos = 0;
                    nums.push_back(std::stod(tok, &pos));
                    if (pos != tok.size()) numeric = false;
                } catch (const std::exception&) {
                    numeric = false;
                }
                if (!numeric) break;
            }
            if (!numeric) nums.clear();
        }
        if (nums.size() == 4) {
            input.bbox = {nums[0], nums[1], nums[2], nums[3]};
        } else if (nums.size() == 2) {
            input.points.emplace_back(nums[0], nums[1]);
        } else {
            input.place_name = arg;
        }
        return input;
    }
};

namespace detail {

inline geo::GeoPoint csv_point(const std::vector<std::string>& row, int lon_col,
                               int lat_col) {
    return {std::stod(row[lat_col]), std::stod(row[lon_col])};
}

inline int find_column_containing(const csv::Table& t,
                                  std::initializer_list<const char*> needles) {
    for (size_t i = 0; i < t.header.size(); ++i) {
        std::string lower = t.header[i];
        std::transform(lower.begin(), lower.end(), lower.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        for (const char* n : needles) {
            if (lower.find(n) != std::string::npos) return static_cast<int>(i);
        }
    }
    return -1;
}

}  // namespace detail

/// Resolves any region input to bounding box(es) plus optional clip polygon.
/// A geocoder is only consulted for place names. Boxes given with
/// min_lon > max_lon split at the antimeridian.
inline Region parse_region(const RegionInput& input, Geocoder* geocoder = nullptr) {
    Region region;

    if (input.bbox) {
        const auto [min_lon, min_lat, max_lon, max_lat] = *input.bbox;
        if (min_lat > max_lat) throw std::runtime_error("bbox min_lat exceeds max_lat");
        if (min_lon <= max_lon) {
            region.boxes.push_back(geo::BBox::of(min_lat, min_lon, max_lat, max_lon));
        } else {
            region.boxes.push_back(geo::BBox::of(min_lat, min_lon, max_lat, 180.0));
            region.boxes.push_back(geo::BBox::of(min_lat, -180.0, max_lat, max_lon));
        }
        return region;
    }

    if (!input.points.empty()) {
        region.boxes.push_back(geo::BBox::envelope(input.points));
        return region;
    }

    if (!input.csv_path.empty()) {
        const csv::Table t = csv::read_file(input.csv_path);
        const int lon_col = detail::find_column_containing(t, {"lon", "lng", "longitude", "x"});
        const int lat_col = detail::find_column_containing(t, {"lat", "latitude", "y"});
        if (lon_col < 0 || lat_col < 0) {
            throw std::runtime_error("CSV region needs longitude and latitude columns: " +
                                     input.csv_path);
        }
        std::vector<geo::GeoPoint> pts;
        for (const auto& row : t.rows) {
            pts.push_back(detail::csv_point(row, lon_col, lat_col));
        }
        if (pts.empty()) throw std::runtime_error("no coordinates in CSV: " + input.csv_path);
        region.boxes.push_back(geo::BBox::envelope(pts));
        return region;
    }

    if (!input.geojson_path.empty()) {
        const auto doc = geojson::load(input.geojson_path);
        const auto pts = geojson::all_positions(doc);
        if (pts.empty()) {
            throw std::runtime_error("no coordinates in GeoJSON: " + input.geojson_path);
        }
        region.boxes.push_back(geo::BBox::envelope(pts));
        region.clip_polygon = geojson::first_polygon_ring(doc);
        return region;
    }

    if (!input.place_name.empty()) {
        if (!geocoder) throw std::runtime_error("place-name region requires a geocoder");
        const auto doc = geocoder->lookup(input.place_name);
        if (!doc) throw std::runtime_error("place not found: " + input.place_name);
        const auto pts = geojson::all_positions(*doc);
        if (pts.empty()) {
            throw std::runtime_error("geocoder returned no geometry for " + input.place_name);
        }
        region.boxes.push_back(geo::BBox::envelope(pts));
        region.clip_polygon = geojson::first_polygon_ring(*doc);
        return region;
    }

    throw std::runtime_error("empty region input");
}

// ---- tiles ----

/// Web-Mercator tile containing a point.
inline TileCoord tile_at(const geo::GeoPoint& p, int z) {
    const double lat = std::clamp(p.lat, -85.05112878, 85.05112878);
    const double n = std::pow(2.0, z);
    const double lat_rad = geo::deg2rad(lat);
    int x = static_cast<int>(std::floor((p.lon + 180.0) / 360.0 * n));
    int y = static_cast<int>(
        std::floor((1.0 - std::log(std::tan(lat_rad) + 1.0 / std::cos(lat_rad)) / geo::kPi) /
                   2.0 * n));
    const int max_idx = static_cast<int>(n) - 1;
    return {z, std::clamp(x, 0, max_idx), std::clamp(y, 0, max_idx)};
}

/// Exactly the tiles intersecting the region's boxes, deduplicated, sorted.
inline std::vector<TileCoord> enumerate_tiles(const Region& region, int z) {
    if (z < 0 || z > 22) throw std::out_of_range("tile zoom must be in [0, 22]");
    std::set<TileCoord> tiles;
    for (const auto& box : region.boxes) {
        const TileCoord nw = tile_at({box.max_lat, box.min_lon}, z);
        const TileCoord se = tile_at({box.min_lat, box.max_lon}, z);
        for (int x = nw.x; x <= se.x; ++x) {
            for (int y = nw.y; y <= se.y; ++y) tiles.insert({z, x, y});
        }
    }
    return {tiles.begin(), tiles.end()};
}

// ---- rate limiting ----

/// Token bucket shared by all workers of a provider.
class RateLimiter {
  public:
    explicit RateLimiter(double requests_per_second)
        : rate_(requests_per_second), tokens_(requests_per_second),
          last_(std::chrono::steady_clock::now()) {}

    void acquire() {
        std::unique_lock lock(mutex_);
        while (true) {
            refill();
            if (tokens_ >= 1.0) {
                tokens_ -= 1.0;
                return;
            }
            const double wait_s = (1.0 - tokens_) / rate_;
            lock.unlock();
            std::this_thread::sleep_for(std::chrono::duration<double>(wait_s));
            lock.lock();
        }
    }

  private:
    void refill() {
        const auto now = std::chrono::steady_clock::now();
        const double elapsed = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        tokens_ = std::min(rate_, tokens_ + elapsed * rate_);
    }

    std::mutex mutex_;
    double rate_;
    double tokens_;
    std::chrono::steady_clock::time_point last_;
};

// ---- download driver ----

struct DownloadOptions {
    int workers = 4;
    int discovery_zoom = 14;
    int image_size = 1024;
    double requests_per_second = 10.0;
    int max_attempts = 5;
    int backoff_base_ms = 1000;
    // Metadata filters: exact string match on record fields, e.g.
    // {"is_pano", "true"} or {"sequence_id", "seq3"}.
    std::map<std::string, std::string> filters;
    // Cooperative stop for tests and signal handling; checked between units.
    std::function<bool()> should_stop;
    std::function<void(const std::string&)> log;
};

struct DownloadResult {
    std::vector<ImageRecord> records;          // successfully downloaded, sorted by id
    std::vector<std::string> failed_units;     // permanently failed unit ids
    bool interrupted = false;
};

namespace detail {

inline bool record_matches(const ImageRecord& r,
                           const std::map<std::string, std::string>& filters) {
    for (const auto& [key, want] : filters) {
        std::string have;
        if (key == "is_pano") have = r.is_pano ? "true" : "false";
        else if (key == "sequence_id") have = r.sequence_id;
        else if (key == "creator_id") have = r.creator_id;
        else if (key == "organization_id") have = r.organization_id;
        else if (key == "min_captured_at_ms") {
            if (r.captured_at_ms < std::stoll(want)) return false;
            continue;
        } else if (key == "max_captured_at_ms") {
            if (r.captured_at_ms > std::stoll(want)) return false;
            continue;
        } else {
            throw std::runtime_error("unknown metadata filter: " + key);
        }
        if (have != want) return false;
    }
    return true;
}

// Runs fn(i) for i in [0, n) on a bounded pool; at most `workers` calls are
// in flight at any instant.
inline void parallel_for(size_t n, int workers, const std::function<void(size_t)>& fn) {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    const int count = std::max(1, std::min<int>(workers, static_cast<int>(n)));
    std::exception_ptr failure;
    std::mutex failure_mutex;

    for (int w = 0; w < count; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

inline void write_file_atomic(const std::string& path, const std::vector<uint8_t>& bytes) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        if (!out) throw std::runtime_error("short write: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace detail

/// Discovers and downloads every image in the region that matches the
/// filters, exactly once across resumed runs. Metadata lands in
/// <out_dir>/images.csv, files in <out_dir>/images/<id>.jpg, permanent
/// failures in <out_dir>/errors.log.
inline DownloadResult download_all(Provider& provider, const Region& region,
                                   const std::string& out_dir,
                                   const std::string& checkpoint_path,
                                   const DownloadOptions& opt = {}) {
    if (opt.workers < 1) throw std::invalid_argument("workers must be >= 1");
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    fs::create_directories(out_dir + "/images");

    Checkpoint checkpoint(checkpoint_path);
    RateLimiter limiter(opt.requests_per_second);
    auto log = [&](const std::string& msg) {
        if (opt.log) opt.log(msg);
    };
    auto stopping = [&] { return opt.should_stop && opt.should_stop(); };

    // Retry wrapper: exponential backoff for transient errors.
    auto with_retries = [&](const std::string& unit, const auto& action) -> bool {
        for (int attempt = 0; attempt < opt.max_attempts; ++attempt) {
            try {
                limiter.acquire();
                action();
                return true;
            } catch (const AuthError&) {
                throw;
            } catch (const RetryableError& e) {
                if (attempt + 1 == opt.max_attempts) {
                    log("giving up on " + unit + ": " + e.what());
                    return false;
                }
                const auto delay =
                    std::chrono::milliseconds(opt.backoff_base_ms << attempt);
                log("retrying " + unit + " after " + std::to_string(delay.count()) +
                    " ms: " + e.what());
                std::this_thread::sleep_for(delay);
            }
        }
        return false;
    };

    DownloadResult result;
    std::mutex state_mutex;
    std::map<std::string, ImageRecord> discovered;  // id -> record, deduplicated

    // Phase 1: tile discovery. Completed tiles replay their records from the
    // tile cache so resumed runs see the full corpus without refetching.
    const std::vector<TileCoord> tiles = enumerate_tiles(region, opt.discovery_zoom);
    const std::string tile_cache_dir = out_dir + "/tiles";
    fs::create_directories(tile_cache_dir);

    auto tile_cache_path = [&](const TileCoord& t) {
        return tile_cache_dir + "/" + std::to_string(t.z) + "_" + std::to_string(t.x) + "_" +
               std::to_string(t.y) + ".csv";
    };
    auto ingest = [&](const std::vector<ImageRecord>& records) {
        std::lock_guard lock(state_mutex);
        for (const auto& r : records) {
            if (region.contains(r.location) && detail::record_matches(r, opt.filters)) {
                discovered.emplace(r.image_id, r);
            }
        }
    };

    detail::parallel_for(tiles.size(), opt.workers, [&](size_t i) {
        const TileCoord& tile = tiles[i];
        const std::string unit = tile.unit_id();
        if (stopping()) return;

        if (checkpoint.is_done(unit)) {
            if (fs::exists(tile_cache_path(tile))) {
                ingest(read_image_csv(tile_cache_path(tile)));
            }
            return;
        }

        std::vector<ImageRecord> records;
        const bool ok = with_retries(unit, [&] { records = provider.discover(tile); });
        if (!ok) {
            std::lock_guard lock(state_mutex);
            checkpoint.mark_failed(unit);
            result.failed_units.push_back(unit);
            return;
        }
        write_image_csv(tile_cache_path(tile), records);
        ingest(records);
        checkpoint.mark_done(unit);
    });

    if (stopping()) {
        result.interrupted = true;
        return result;
    }

    // Phase 2: image fetch.
    std::vector<ImageRecord> to_fetch;
    to_fetch.reserve(discovered.size());
    for (const auto& [id, r] : discovered) to_fetch.push_back(r);

    std::set<std::string> failed_images;
    detail::parallel_for(to_fetch.size(), opt.workers, [&](size_t i) {
        ImageRecord& r = to_fetch[i];
        const std::string unit = "img/" + r.image_id;
        const std::string path = out_dir + "/images/" + r.image_id + ".jpg";
        if (stopping()) return;
        if (checkpoint.is_done(unit) && fs::exists(path)) return;

        std::vector<uint8_t> bytes;
        const bool ok =
            with_retries(unit, [&] { bytes = provider.fetch(r.image_id, opt.image_size); });
        if (!ok) {
            std::lock_guard lock(state_mutex);
            checkpoint.mark_failed(unit);
            result.failed_units.push_back(unit);
            failed_images.insert(r.image_id);
            return;
        }
        detail::write_file_atomic(path, bytes);
        checkpoint.mark_done(unit);
    });

    if (stopping()) {
        result.interrupted = true;
        return result;
    }

    // Final metadata: one CSV row per downloaded image, deterministic order.
    for (auto& [id, r] : discovered) {
        const std::string path = out_dir + "/images/" + id + ".jpg";
        if (failed_images.count(id) || !fs::exists(path)) continue;
        r.local_path = "images/" + id + ".jpg";
        result.records.push_back(r);
    }
    write_image_csv(out_dir + "/images.csv", result.records);

    if (!result.failed_units.empty()) {
        std::ofstream err(out_dir + "/errors.log", std::ios::app);
        for (const auto& unit : result.failed_units) err << unit << "\n";
    }
    return result;
}

}  // namespace svipipe::acquire
