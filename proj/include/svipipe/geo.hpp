#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "svipipe/h3.hpp"

// Shared geodesy primitives. Spherical earth, R = 6,371,000 m; adequate at
// street scale and keeps the closed-form checks exact.

namespace svipipe::geo {

inline constexpr double kEarthRadiusM = 6'371'000.0;
inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

/// WGS-style coordinate in degrees, lon normalized to (-180, 180].
struct GeoPoint {
    double lat = 0.0;
    double lon = 0.0;

    GeoPoint() = default;
    GeoPoint(double lat_deg, double lon_deg) : lat(lat_deg), lon(lon_deg) {
        if (!std::isfinite(lat) || !std::isfinite(lon)) {
            throw std::invalid_argument("non-finite coordinate");
        }
        if (lat < -90.0 || lat > 90.0) {
            throw std::invalid_argument("latitude out of [-90, 90]: " + std::to_string(lat));
        }
        while (lon <= -180.0) lon += 360.0;
        while (lon > 180.0) lon -= 360.0;
    }

    friend bool operator==(const GeoPoint& a, const GeoPoint& b) {
        return a.lat == b.lat && a.lon == b.lon;
    }
};

struct BBox {
    double min_lat = 0.0;
    double min_lon = 0.0;
    double max_lat = 0.0;
    double max_lon = 0.0;

    static BBox of(double min_lat, double min_lon, double max_lat, double max_lon) {
        if (min_lat > max_lat || min_lon > max_lon) {
            throw std::invalid_argument("degenerate bounding box: min > max");
        }
        return BBox{min_lat, min_lon, max_lat, max_lon};
    }

    static BBox around(const GeoPoint& p) { return BBox{p.lat, p.lon, p.lat, p.lon}; }

    static BBox envelope(std::span<const GeoPoint> points) {
        if (points.empty()) throw std::invalid_argument("empty point set");
        BBox b = around(points.front());
        for (const auto& p : points.subspan(1)) b.expand(p);
        return b;
    }

    void expand(const GeoPoint& p) {
        min_lat = std::min(min_lat, p.lat);
        max_lat = std::max(max_lat, p.lat);
        min_lon = std::min(min_lon, p.lon);
        max_lon = std::max(max_lon, p.lon);
    }

    bool contains(const GeoPoint& p) const {
        return p.lat >= min_lat && p.lat <= max_lat && p.lon >= min_lon && p.lon <= max_lon;
    }
};

/// Street segment: stable id plus polyline of at least two distinct points.
struct StreetSegment {
    std::string id;
    std::vector<GeoPoint> polyline;

    void validate() const {
        if (polyline.size() < 2) throw std::invalid_argument("segment needs >= 2 points");
        for (size_t i = 1; i < polyline.size(); ++i) {
            if (polyline[i] == polyline[i - 1]) {
                throw std::invalid_argument("segment has consecutive duplicate points: " + id);
            }
        }
    }
};

struct HexId {
    uint64_t value = 0;
    int resolution = 0;

    friend bool operator==(const HexId& a, const HexId& b) { return a.value == b.value; }
};

/// Great-circle distance in meters.
inline double haversine_distance(const GeoPoint& a, const GeoPoint& b) {
    const double lat1 = deg2rad(a.lat);
    const double lat2 = deg2rad(b.lat);
    const double dlat = lat2 - lat1;
    const double dlon = deg2rad(b.lon - a.lon);
    const double sl = std::sin(dlat / 2.0);
    const double so = std::sin(dlon / 2.0);
    const double h = sl * sl + std::cos(lat1) * std::cos(lat2) * so * so;
    return 2.0 * kEarthRadiusM * std::atan2(std::sqrt(h), std::sqrt(1.0 - h));
}

/// Compass bearing from `a` toward `b` in [0, 360): 0 = north, 90 = east.
inline double initial_bearing(const GeoPoint& a, const GeoPoint& b) {
    if (a == b) throw std::invalid_argument("undefined bearing: coincident points");
    const double lat1 = deg2rad(a.lat);
    const double lat2 = deg2rad(b.lat);
    const double dlon = deg2rad(b.lon - a.lon);
    const double y = std::sin(dlon) * std::cos(lat2);
    const double x =
        std::cos(lat1) * std::sin(lat2) - std::sin(lat1) * std::cos(lat2) * std::cos(dlon);
    double bearing = rad2deg(std::atan2(y, x));
    if (bearing < 0.0) bearing += 360.0;
    if (bearing >= 360.0) bearing -= 360.0;
    return bearing;
}

/// H3 cell containing `p` at the given resolution (0-15).
inline HexId hex_index(const GeoPoint& p, int resolution) {
    if (resolution < 0 || resolution > h3::kMaxResolution) {
        throw std::out_of_range("H3 resolution must be in [0, 15]");
    }
    return HexId{h3::latlng_to_cell(p.lat, p.lon, resolution), resolution};
}

struct SnapResult {
    std::string segment_id;
    double distance_m = 0.0;
    double segment_bearing_deg = 0.0;
};

namespace detail {

// Local equirectangular plane centered at `origin`, meters.
struct LocalPlane {
    double lat0_rad;
    double cos_lat0;

    explicit LocalPlane(const GeoPoint& origin)
        : lat0_rad(deg2rad(origin.lat)), cos_lat0(std::cos(deg2rad(origin.lat))) {}

    std::pair<double, double> project(const GeoPoint& origin, const GeoPoint& p) const {
        double dlon = p.lon - origin.lon;
        if (dlon > 180.0) dlon -= 360.0;
        if (dlon < -180.0) dlon += 360.0;
        const double x = deg2rad(dlon) * cos_lat0 * kEarthRadiusM;
        const double y = deg2rad(p.lat - origin.lat) * kEarthRadiusM;
        return {x, y};
    }
};

inline double point_to_edge_sq(double px, double py, double ax, double ay, double bx,
                               double by) {
    const double abx = bx - ax;
    const double aby = by - ay;
    const double len_sq = abx * abx + aby * aby;
    double t = len_sq > 0.0 ? ((px - ax) * abx + (py - ay) * aby) / len_sq : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = px - (ax + t * abx);
    const double dy = py - (ay + t * aby);
    return dx * dx + dy * dy;
}

}  // namespace detail

/// Nearest segment by perpendicular distance to the closest sub-edge.
/// Equal distances break toward the lowest segment id.
inline SnapResult snap_to_segment(const GeoPoint& p, std::span<const StreetSegment> network) {
    if (network.empty()) throw std::invalid_argument("empty street network");

    const detail::LocalPlane plane(p);
    const auto [px, py] = plane.project(p, p);

    SnapResult best;
    double best_sq = std::numeric_limits<double>::infinity();
    const GeoPoint* best_a = nullptr;
    const GeoPoint* best_b = nullptr;

    for (const auto& seg : network) {
        for (size_t i = 1; i < seg.polyline.size(); ++i) {
            const auto [ax, ay] = plane.project(p, seg.polyline[i - 1]);
            const auto [bx, by] = plane.project(p, seg.polyline[i]);
            const double d_sq = detail::point_to_edge_sq(px, py, ax, ay, bx, by);
            const bool closer = d_sq < best_sq;
            const bool tie = d_sq == best_sq && seg.id < best.segment_id;
            if (closer || tie) {
                best_sq = d_sq;
                best.segment_id = seg.id;
                best_a = &seg.polyline[i - 1];
                best_b = &seg.polyline[i];
            }
        }
    }

    best.distance_m = std::sqrt(best_sq);
    best.segment_bearing_deg = initial_bearing(*best_a, *best_b);
    return best;
}

}  // namespace svipipe::geo
