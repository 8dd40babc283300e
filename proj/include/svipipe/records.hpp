#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "svipipe/csv.hpp"
#include "svipipe/geo.hpp"

// Core record type shared by acquisition and metadata analysis, plus its
// images.csv serialization (UTF-8, header row, RFC 4180).

namespace svipipe {

/// One SVI capture as reported by a provider.
struct ImageRecord {
    std::string image_id;
    geo::GeoPoint location;
    int64_t captured_at_ms = 0;      // UTC, unix milliseconds
    double compass_angle = 0.0;      // degrees [0, 360)
    bool is_pano = false;
    std::string sequence_id;
    std::string creator_id;
    std::string organization_id;     // empty when absent
    std::string local_path;          // empty until downloaded

    void validate() const {
        if (image_id.empty()) throw std::invalid_argument("image record without id");
        if (compass_angle < 0.0 || compass_angle >= 360.0) {
            throw std::invalid_argument("compass angle out of [0, 360): " + image_id);
        }
    }
};

inline const std::vector<std::string>& image_csv_header() {
    static const std::vector<std::string> kHeader = {
        "image_id", "lon",         "lat",        "captured_at_ms", "compass_angle",
        "is_pano",  "sequence_id", "creator_id", "organization_id", "file_path"};
    return kHeader;
}

inline std::vector<std::string> to_csv_row(const ImageRecord& r) {
    char lon[32], lat[32], compass[32];
    std::snprintf(lon, sizeof lon, "%.8f", r.location.lon);
    std::snprintf(lat, sizeof lat, "%.8f", r.location.lat);
    std::snprintf(compass, sizeof compass, "%.3f", r.compass_angle);
    return {r.image_id,  lon,           lat,          std::to_string(r.captured_at_ms),
            compass,     r.is_pano ? "true" : "false", r.sequence_id, r.creator_id,
            r.organization_id, r.local_path};
}

inline ImageRecord image_record_from_row(const csv::Table& t,
                                         const std::vector<std::string>& row) {
    static constexpr const char* kCols[] = {"image_id", "lon", "lat", "captured_at_ms",
                                            "compass_angle", "is_pano", "sequence_id",
                                            "creator_id", "organization_id", "file_path"};
    int idx[10];
    for (int i = 0; i < 10; ++i) idx[i] = t.require_column(kCols[i]);

    ImageRecord r;
    r.image_id = row[idx[0]];
    r.location = geo::GeoPoint(std::stod(row[idx[2]]), std::stod(row[idx[1]]));
    r.captured_at_ms = std::stoll(row[idx[3]]);
    r.compass_angle = std::stod(row[idx[4]]);
    r.is_pano = row[idx[5]] == "true" || row[idx[5]] == "1";
    r.sequence_id = row[idx[6]];
    r.creator_id = row[idx[7]];
    r.organization_id = row[idx[8]];
    r.local_path = row[idx[9]];
    r.validate();
    return r;
}

inline std::vector<ImageRecord> read_image_csv(const std::string& path) {
    const csv::Table t = csv::read_file(path);
    std::vector<ImageRecord> records;
    records.reserve(t.rows.size());
    for (const auto& row : t.rows) records.push_back(image_record_from_row(t, row));
    return records;
}

inline void write_image_csv(const std::string& path, const std::vector<ImageRecord>& records) {
    csv::Table t;
    t.header = image_csv_header();
    for (const auto& r : records) t.rows.push_back(to_csv_row(r));
    csv::write_file(path, t);
}

}  // namespace svipipe
