#pragma once

#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "svipipe/geo.hpp"

// GeoJSON ingestion (street networks, region polygons) and emission helpers.
// Coordinates follow the GeoJSON order: [lon, lat].

namespace svipipe::geojson {

using json = nlohmann::json;

inline json load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open GeoJSON file: " + path);
    json doc;
    in >> doc;
    return doc;
}

inline geo::GeoPoint parse_position(const json& coord) {
    if (!coord.is_array() || coord.size() < 2) {
        throw std::runtime_error("GeoJSON position must be [lon, lat]");
    }
    return geo::GeoPoint(coord[1].get<double>(), coord[0].get<double>());
}

namespace detail {

inline void append_line(std::vector<geo::StreetSegment>& out, const json& coords,
                        const std::string& base_id, int part) {
    geo::StreetSegment seg;
    seg.id = part < 0 ? base_id : base_id + "/" + std::to_string(part);
    for (const auto& c : coords) {
        const geo::GeoPoint p = parse_position(c);
        if (!seg.polyline.empty() && p == seg.polyline.back()) continue;
        seg.polyline.push_back(p);
    }
    if (seg.polyline.size() >= 2) out.push_back(std::move(seg));
}

}  // namespace detail

/// Reads LineString/MultiLineString features into street segments. Feature
/// ids come from an `id` member or property, falling back to the feature
/// index; MultiLineString parts get a `/N` suffix.
inline std::vector<geo::StreetSegment> read_network(const json& doc) {
    if (!doc.contains("features")) {
        throw std::runtime_error("GeoJSON network must be a FeatureCollection");
    }
    std::vector<geo::StreetSegment> segments;
    size_t index = 0;
    for (const auto& feature : doc["features"]) {
        std::string id;
        if (feature.contains("id")) {
            id = feature["id"].is_string() ? feature["id"].get<std::string>()
                                           : feature["id"].dump();
        } else if (feature.contains("properties") && feature["properties"].is_object() &&
                   feature["properties"].contains("id")) {
            const auto& pid = feature["properties"]["id"];
            id = pid.is_string() ? pid.get<std::string>() : pid.dump();
        } else {
            id = "feature-" + std::to_string(index);
        }

        const auto& geom = feature["geometry"];
        const std::string type = geom.value("type", "");
        if (type == "LineString") {
            detail::append_line(segments, geom["coordinates"], id, -1);
        } else if (type == "MultiLineString") {
            int part = 0;
            for (const auto& line : geom["coordinates"]) {
                detail::append_line(segments, line, id, part++);
            }
        }
        ++index;
    }
    return segments;
}

inline std::vector<geo::StreetSegment> read_network_file(const std::string& path) {
    return read_network(load(path));
}

/// Every coordinate in the document, regardless of geometry type.
inline std::vector<geo::GeoPoint> all_positions(const json& node) {
    std::vector<geo::GeoPoint> points;
    std::function<void(const json&)> walk = [&](const json& n) {
        if (n.is_array()) {
            if (n.size() >= 2 && n[0].is_number() && n[1].is_number()) {
                points.push_back(parse_position(n));
            } else {
                for (const auto& child : n) walk(child);
            }
        } else if (n.is_object()) {
            if (n.contains("coordinates")) walk(n["coordinates"]);
            for (const auto& key : {"features", "geometry", "geometries"}) {
                if (n.contains(key)) walk(n[key]);
            }
        }
    };
    walk(node);
    return points;
}

/// Outer ring of the first Polygon/MultiPolygon in the document, if any.
inline std::vector<geo::GeoPoint> first_polygon_ring(const json& node) {
    std::vector<geo::GeoPoint> ring;
    std::function<bool(const json&)> walk = [&](const json& n) -> bool {
        if (!n.is_object()) return false;
        const std::string type = n.value("type", "");
        if (type == "Polygon") {
            for (const auto& c : n["coordinates"][0]) ring.push_back(parse_position(c));
            return true;
        }
        if (type == "MultiPolygon") {
            for (const auto& c : n["coordinates"][0][0]) ring.push_back(parse_position(c));
            return true;
        }
        for (const auto& key : {"geometry", "features", "geometries"}) {
            if (n.contains(key)) {
                const auto& child = n[key];
                if (child.is_array()) {
                    for (const auto& f : child) {
                        if (walk(f)) return true;
                    }
                } else if (walk(child)) {
                    return true;
                }
            }
        }
        return false;
    };
    walk(node);
    return ring;
}

inline json point_feature(const geo::GeoPoint& p, json properties) {
    return json{{"type", "Feature"},
                {"geometry", {{"type", "Point"}, {"coordinates", {p.lon, p.lat}}}},
                {"properties", std::move(properties)}};
}

inline json polygon_feature(const std::vector<geo::GeoPoint>& ring, json properties) {
    json coords = json::array();
    for (const auto& p : ring) coords.push_back({p.lon, p.lat});
    if (!ring.empty() && !(ring.front() == ring.back())) {
        coords.push_back({ring.front().lon, ring.front().lat});
    }
    return json{
        {"type", "Feature"},
        {"geometry", {{"type", "Polygon"}, {"coordinates", json::array({coords})}}},
        {"properties", std::move(properties)}};
}

inline json line_feature(const std::vector<geo::GeoPoint>& line, json properties) {
    json coords = json::array();
    for (const auto& p : line) coords.push_back({p.lon, p.lat});
    return json{{"type", "Feature"},
                {"geometry", {{"type", "LineString"}, {"coordinates", coords}}},
                {"properties", std::move(properties)}};
}

inline json feature_collection(std::vector<json> features) {
    return json{{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

}  // namespace svipipe::geojson
