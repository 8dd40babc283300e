#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "svipipe/geo.hpp"
#include "svipipe/records.hpp"
#include "svipipe/solar.hpp"

// Spatiotemporal metadata: per-image indicators and their aggregation to hex
// cells or street segments.

namespace svipipe::metadata {

enum class Season { kSpring, kSummer, kAutumn, kWinter };

inline const char* season_name(Season s) {
    switch (s) {
        case Season::kSpring: return "spring";
        case Season::kSummer: return "summer";
        case Season::kAutumn: return "autumn";
        case Season::kWinter: return "winter";
    }
    return "?";
}

struct CivilDateTime {
    int year = 0;
    int month = 0;        // 1-12
    int day = 0;          // 1-31
    int hour = 0;         // 0-23
    int day_of_week = 0;  // ISO: 1 = Monday .. 7 = Sunday
    int64_t civil_days = 0;  // days since 1970-01-01 of the local date
};

namespace detail {

// Civil-calendar conversion (proleptic Gregorian), Hinnant's algorithm.
inline int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

inline void civil_from_days(int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int64_t yy = static_cast<int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

}  // namespace detail

/// Local civil date/time for a UTC instant, with the UTC offset derived from
/// longitude at 15 degrees per hour (rounded to whole hours). No timezone
/// database is consulted.
inline CivilDateTime local_civil_time(int64_t unix_ms, double lon) {
    const int offset_hours = static_cast<int>(std::lround(lon / 15.0));
    const int64_t local_s = unix_ms / 1000 + static_cast<int64_t>(offset_hours) * 3600;

    int64_t days = local_s / 86400;
    int64_t rem = local_s % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }

    CivilDateTime out;
    detail::civil_from_days(days, out.year, out.month, out.day);
    out.hour = static_cast<int>(rem / 3600);
    // 1970-01-01 was a Thursday (ISO weekday 4).
    int dow = static_cast<int>((days % 7 + 7) % 7);  // 0 = Thursday
    out.day_of_week = (dow + 3) % 7 + 1;
    out.civil_days = days;
    return out;
}

/// Meteorological season for the hemisphere (equator counts as northern).
inline Season season_of(double lat, int month) {
    const bool north = lat >= 0.0;
    const int m = north ? month : (month + 6 - 1) % 12 + 1;
    if (m >= 3 && m <= 5) return Season::kSpring;
    if (m >= 6 && m <= 8) return Season::kSummer;
    if (m >= 9 && m <= 11) return Season::kAutumn;
    return Season::kWinter;
}

/// Camera angle relative to an undirected street bearing, folded into [0, 90].
inline double relative_angle(double compass_deg, double segment_bearing_deg) {
    double d = std::fmod(std::fabs(compass_deg - segment_bearing_deg), 180.0);
    if (d > 90.0) d = 180.0 - d;
    return d;
}

struct EnrichedRecord {
    ImageRecord record;
    int year = 0;
    int month = 0;
    int day = 0;
    int hour = 0;
    int day_of_week = 0;
    int64_t civil_days = 0;
    bool daytime = true;
    Season season = Season::kSpring;
    std::optional<double> relative_angle_deg;
    std::optional<std::string> nearest_segment_id;
    geo::HexId h3_id;
    std::optional<double> speed_kmh;
};

struct EnrichOptions {
    int h3_resolution = 9;
    double max_snap_distance_m = 500.0;
    bool civil_twilight = false;  // day/night boundary at -6 deg instead of 0
};

/// Populates every image-level indicator. Records are processed in sequence
/// order for the speed computation; the last point of a sequence inherits its
/// predecessor's speed and singletons get none.
inline std::vector<EnrichedRecord> enrich(std::span<const ImageRecord> records,
                                          std::span<const geo::StreetSegment> network,
                                          const EnrichOptions& opt = {}) {
    std::vector<EnrichedRecord> out;
    out.reserve(records.size());

    for (const auto& r : records) {
        EnrichedRecord e;
        e.record = r;
        const CivilDateTime t = local_civil_time(r.captured_at_ms, r.location.lon);
        e.year = t.year;
        e.month = t.month;
        e.day = t.day;
        e.hour = t.hour;
        e.day_of_week = t.day_of_week;
        e.civil_days = t.civil_days;
        e.daytime = solar::is_daytime(r.location, r.captured_at_ms, opt.civil_twilight);
        e.season = season_of(r.location.lat, t.month);
        e.h3_id = geo::hex_index(r.location, opt.h3_resolution);

        if (!network.empty()) {
            const geo::SnapResult snap = geo::snap_to_segment(r.location, network);
            if (snap.distance_m <= opt.max_snap_distance_m) {
                e.relative_angle_deg = relative_angle(r.compass_angle, snap.segment_bearing_deg);
                e.nearest_segment_id = snap.segment_id;
            }
        }
        out.push_back(std::move(e));
    }

    // Speed between consecutive points of the same sequence.
    std::unordered_map<std::string, std::vector<size_t>> sequences;
    for (size_t i = 0; i < out.size(); ++i) {
        sequences[out[i].record.sequence_id].push_back(i);
    }
    for (auto& [seq_id, idx] : sequences) {
        std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
            return out[a].record.captured_at_ms < out[b].record.captured_at_ms;
        });
        for (size_t k = 0; k + 1 < idx.size(); ++k) {
            const auto& cur = out[idx[k]].record;
            const auto& next = out[idx[k + 1]].record;
            const double dt_s =
                static_cast<double>(next.captured_at_ms - cur.captured_at_ms) / 1000.0;
            if (dt_s <= 0.0) continue;
            const double dist_m = geo::haversine_distance(cur.location, next.location);
            out[idx[k]].speed_kmh = dist_m / dt_s * 3.6;
        }
        if (idx.size() >= 2) {
            auto& last = out[idx.back()];
            const auto& prev = out[idx[idx.size() - 2]];
            if (!last.speed_kmh && prev.speed_kmh) last.speed_kmh = prev.speed_kmh;
        }
    }
    return out;
}

/// Direction-aware mean of angles in degrees, result in [0, 360).
inline double circular_mean_deg(std::span<const double> angles) {
    double sum_sin = 0.0, sum_cos = 0.0;
    for (const double a : angles) {
        sum_sin += std::sin(geo::deg2rad(a));
        sum_cos += std::cos(geo::deg2rad(a));
    }
    double mean = geo::rad2deg(std::atan2(sum_sin, sum_cos));
    if (mean < 0.0) mean += 360.0;
    if (mean >= 360.0) mean -= 360.0;
    return mean;
}

/// One aggregate row per analysis unit (hex cell or street segment).
struct AggregateRow {
    std::string unit_id;
    double coverage_pct = 0.0;
    int64_t count = 0;
    int64_t days_elapsed = 0;
    std::string most_recent_date;  // ISO yyyy-mm-dd, local civil date
    std::string oldest_date;
    int64_t number_of_years = 0;
    int64_t number_of_months = 0;
    int64_t number_of_days = 0;  // distinct calendar dates
    int64_t number_of_hours = 0;
    int64_t number_of_days_of_week = 0;
    int64_t number_of_daytime = 0;
    int64_t number_of_nighttime = 0;
    int64_t number_of_spring = 0;
    int64_t number_of_summer = 0;
    int64_t number_of_autumn = 0;
    int64_t number_of_winter = 0;
    double average_compass_angle = 0.0;
    std::optional<double> average_relative_angle;
    double average_is_pano = 0.0;
    int64_t number_of_users = 0;
    int64_t number_of_sequences = 0;
    int64_t number_of_organizations = 0;
    std::optional<double> average_speed_kmh;
};

struct AggregateOptions {
    double buffer_m = 50.0;
    int coverage_grid = 48;  // sampling grid per axis for cell coverage
};

namespace detail {

inline std::string iso_date(int64_t civil_days) {
    int y, m, d;
    civil_from_days(civil_days, y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
    return buf;
}

inline AggregateRow summarize(const std::string& unit_id,
                              std::span<const EnrichedRecord* const> group) {
    AggregateRow row;
    row.unit_id = unit_id;
    row.count = static_cast<int64_t>(group.size());

    std::set<int> years, months, hours, dows;
    std::set<int64_t> dates;
    std::set<std::string> users, sequences, organizations;
    std::vector<double> compass;
    double rel_sum = 0.0, speed_sum = 0.0;
    int64_t rel_n = 0, speed_n = 0, pano_n = 0;
    int64_t min_days = group.front()->civil_days;
    int64_t max_days = min_days;

    for (const EnrichedRecord* e : group) {
        years.insert(e->year);
        months.insert(e->month);
        hours.insert(e->hour);
        dows.insert(e->day_of_week);
        dates.insert(e->civil_days);
        min_days = std::min(min_days, e->civil_days);
        max_days = std::max(max_days, e->civil_days);

        if (e->daytime) ++row.number_of_daytime;
        else ++row.number_of_nighttime;
        switch (e->season) {
            case Season::kSpring: ++row.number_of_spring; break;
            case Season::kSummer: ++row.number_of_summer; break;
            case Season::kAutumn: ++row.number_of_autumn; break;
            case Season::kWinter: ++row.number_of_winter; break;
        }

        compass.push_back(e->record.compass_angle);
        if (e->relative_angle_deg) {
            rel_sum += *e->relative_angle_deg;
            ++rel_n;
        }
        if (e->speed_kmh) {
            speed_sum += *e->speed_kmh;
            ++speed_n;
        }
        if (e->record.is_pano) ++pano_n;
        users.insert(e->record.creator_id);
        sequences.insert(e->record.sequence_id);
        if (!e->record.organization_id.empty()) organizations.insert(e->record.organization_id);
    }

    row.days_elapsed = max_days - min_days;
    row.most_recent_date = iso_date(max_days);
    row.oldest_date = iso_date(min_days);
    row.number_of_years = static_cast<int64_t>(years.size());
    row.number_of_months = static_cast<int64_t>(months.size());
    row.number_of_days = static_cast<int64_t>(dates.size());
    row.number_of_hours = static_cast<int64_t>(hours.size());
    row.number_of_days_of_week = static_cast<int64_t>(dows.size());
    row.average_compass_angle = circular_mean_deg(compass);
    if (rel_n > 0) row.average_relative_angle = rel_sum / static_cast<double>(rel_n);
    row.average_is_pano = static_cast<double>(pano_n) / static_cast<double>(row.count);
    row.number_of_users = static_cast<int64_t>(users.size());
    row.number_of_sequences = static_cast<int64_t>(sequences.size());
    row.number_of_organizations = static_cast<int64_t>(organizations.size());
    if (speed_n > 0) row.average_speed_kmh = speed_sum / static_cast<double>(speed_n);
    return row;
}

// Point-in-polygon on the local plane (even-odd rule).
inline bool in_polygon(double x, double y, std::span<const std::pair<double, double>> poly) {
    bool inside = false;
    for (size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const auto [xi, yi] = poly[i];
        const auto [xj, yj] = poly[j];
        if ((yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi) {
            inside = !inside;
        }
    }
    return inside;
}

// Share of the cell polygon within `buffer_m` of any image point, sampled on
// a regular grid over the local plane.
inline double cell_coverage_pct(uint64_t cell, std::span<const EnrichedRecord* const> group,
                                double buffer_m, int grid) {
    const auto boundary = h3::cell_to_boundary(cell);
    if (boundary.size() < 3) return 0.0;

    const auto [clat, clon] = h3::cell_to_latlng(cell);
    const geo::GeoPoint center(clat, clon);
    const geo::detail::LocalPlane plane(center);

    std::vector<std::pair<double, double>> poly;
    poly.reserve(boundary.size());
    double min_x = 1e30, min_y = 1e30, max_x = -1e30, max_y = -1e30;
    for (const auto& [blat, blon] : boundary) {
        const auto [x, y] = plane.project(center, geo::GeoPoint(blat, blon));
        poly.emplace_back(x, y);
        min_x = std::min(min_x, x);
        max_x = std::max(max_x, x);
        min_y = std::min(min_y, y);
        max_y = std::max(max_y, y);
    }

    std::vector<std::pair<double, double>> pts;
    pts.reserve(group.size());
    for (const EnrichedRecord* e : group) {
        pts.push_back(plane.project(center, e->record.location));
    }

    const double r_sq = buffer_m * buffer_m;
    int64_t in_cell = 0, covered = 0;
    for (int gy = 0; gy < grid; ++gy) {
        const double y = min_y + (gy + 0.5) * (max_y - min_y) / grid;
        for (int gx = 0; gx < grid; ++gx) {
            const double x = min_x + (gx + 0.5) * (max_x - min_x) / grid;
            if (!in_polygon(x, y, poly)) continue;
            ++in_cell;
            for (const auto& [px, py] : pts) {
                const double dx = x - px, dy = y - py;
                if (dx * dx + dy * dy <= r_sq) {
                    ++covered;
                    break;
                }
            }
        }
    }
    if (in_cell == 0) return 0.0;
    return 100.0 * static_cast<double>(covered) / static_cast<double>(in_cell);
}

// Fraction of the segment's length within `buffer_m` of any assigned point.
inline double street_coverage_pct(const geo::StreetSegment& seg,
                                  std::span<const EnrichedRecord* const> group,
                                  double buffer_m) {
    if (seg.polyline.size() < 2) return 0.0;
    const geo::GeoPoint& origin = seg.polyline.front();
    const geo::detail::LocalPlane plane(origin);

    std::vector<std::pair<double, double>> pts;
    pts.reserve(group.size());
    for (const EnrichedRecord* e : group) {
        pts.push_back(plane.project(origin, e->record.location));
    }

    const double r_sq = buffer_m * buffer_m;
    double total = 0.0, covered = 0.0;
    constexpr int kStepsPerEdge = 64;
    for (size_t i = 1; i < seg.polyline.size(); ++i) {
        const auto [ax, ay] = plane.project(origin, seg.polyline[i - 1]);
        const auto [bx, by] = plane.project(origin, seg.polyline[i]);
        const double len = std::hypot(bx - ax, by - ay);
        const double step = len / kStepsPerEdge;
        for (int s = 0; s < kStepsPerEdge; ++s) {
            const double t = (s + 0.5) / kStepsPerEdge;
            const double x = ax + t * (bx - ax);
            const double y = ay + t * (by - ay);
            total += step;
            for (const auto& [px, py] : pts) {
                const double dx = x - px, dy = y - py;
                if (dx * dx + dy * dy <= r_sq) {
                    covered += step;
                    break;
                }
            }
        }
    }
    return total > 0.0 ? 100.0 * covered / total : 0.0;
}

}  // namespace detail

/// Aggregates enriched records to H3 cells at the resolution they carry.
/// Only non-empty cells are emitted, sorted by cell id.
inline std::vector<AggregateRow> aggregate_by_hex(std::span<const EnrichedRecord> records,
                                                  const AggregateOptions& opt = {}) {
    std::map<uint64_t, std::vector<const EnrichedRecord*>> groups;
    for (const auto& e : records) groups[e.h3_id.value].push_back(&e);

    std::vector<AggregateRow> rows;
    rows.reserve(groups.size());
    for (const auto& [cell, group] : groups) {
        char hex[24];
        std::snprintf(hex, sizeof hex, "%llx", static_cast<unsigned long long>(cell));
        AggregateRow row = detail::summarize(hex, group);
        row.coverage_pct =
            detail::cell_coverage_pct(cell, group, opt.buffer_m, opt.coverage_grid);
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Aggregates enriched records to their nearest street segment (nearest-only
/// assignment, computed during enrichment). Sorted by segment id.
inline std::vector<AggregateRow> aggregate_by_street(
    std::span<const EnrichedRecord> records, std::span<const geo::StreetSegment> network,
    const AggregateOptions& opt = {}) {
    std::map<std::string, std::vector<const EnrichedRecord*>> groups;
    for (const auto& e : records) {
        if (e.nearest_segment_id) groups[*e.nearest_segment_id].push_back(&e);
    }

    std::map<std::string, const geo::StreetSegment*> by_id;
    for (const auto& seg : network) by_id[seg.id] = &seg;

    std::vector<AggregateRow> rows;
    rows.reserve(groups.size());
    for (const auto& [seg_id, group] : groups) {
        AggregateRow row = detail::summarize(seg_id, group);
        const auto it = by_id.find(seg_id);
        if (it != by_id.end()) {
            row.coverage_pct = detail::street_coverage_pct(*it->second, group, opt.buffer_m);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---- CSV / GeoJSON serialization ----

inline const std::vector<std::string>& enriched_csv_header() {
    static const std::vector<std::string> kHeader = [] {
        std::vector<std::string> h = image_csv_header();
        for (const char* extra :
             {"year", "month", "day", "hour", "day_of_week", "daytime_nighttime", "season",
              "relative_angle", "nearest_segment_id", "h3_id", "speed_kmh"}) {
            h.push_back(extra);
        }
        return h;
    }();
    return kHeader;
}

inline std::vector<std::string> to_csv_row(const EnrichedRecord& e) {
    std::vector<std::string> row = to_csv_row(e.record);
    row.push_back(std::to_string(e.year));
    row.push_back(std::to_string(e.month));
    row.push_back(std::to_string(e.day));
    row.push_back(std::to_string(e.hour));
    row.push_back(std::to_string(e.day_of_week));
    row.push_back(e.daytime ? "day" : "night");
    row.push_back(season_name(e.season));
    if (e.relative_angle_deg) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4f", *e.relative_angle_deg);
        row.push_back(buf);
    } else {
        row.push_back("");
    }
    row.push_back(e.nearest_segment_id.value_or(""));
    char hex[24];
    std::snprintf(hex, sizeof hex, "%llx", static_cast<unsigned long long>(e.h3_id.value));
    row.push_back(hex);
    if (e.speed_kmh) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4f", *e.speed_kmh);
        row.push_back(buf);
    } else {
        row.push_back("");
    }
    return row;
}

inline void write_enriched_csv(const std::string& path,
                               std::span<const EnrichedRecord> records) {
    csv::Table t;
    t.header = enriched_csv_header();
    for (const auto& e : records) t.rows.push_back(to_csv_row(e));
    csv::write_file(path, t);
}

inline std::vector<EnrichedRecord> read_enriched_csv(const std::string& path) {
    const csv::Table t = csv::read_file(path);
    std::vector<EnrichedRecord> out;
    out.reserve(t.rows.size());
    const int year = t.require_column("year");
    const int month = t.require_column("month");
    const int day = t.require_column("day");
    const int hour = t.require_column("hour");
    const int dow = t.require_column("day_of_week");
    const int daynight = t.require_column("daytime_nighttime");
    const int season = t.require_column("season");
    const int rel = t.require_column("relative_angle");
    const int seg = t.require_column("nearest_segment_id");
    const int h3col = t.require_column("h3_id");
    const int speed = t.require_column("speed_kmh");

    for (const auto& row : t.rows) {
        EnrichedRecord e;
        e.record = image_record_from_row(t, row);
        e.year = std::stoi(row[year]);
        e.month = std::stoi(row[month]);
        e.day = std::stoi(row[day]);
        e.hour = std::stoi(row[hour]);
        e.day_of_week = std::stoi(row[dow]);
        e.civil_days = detail::days_from_civil(e.year, e.month, e.day);
        e.daytime = row[daynight] == "day";
        for (const Season s :
             {Season::kSpring, Season::kSummer, Season::kAutumn, Season::kWinter}) {
            if (row[season] == season_name(s)) e.season = s;
        }
        if (!row[rel].empty()) e.relative_angle_deg = std::stod(row[rel]);
        if (!row[seg].empty()) e.nearest_segment_id = row[seg];
        e.h3_id.value = std::stoull(row[h3col], nullptr, 16);
        e.h3_id.resolution = h3::resolution(e.h3_id.value);
        if (!row[speed].empty()) e.speed_kmh = std::stod(row[speed]);
        out.push_back(std::move(e));
    }
    return out;
}

inline const std::vector<std::string>& aggregate_csv_header() {
    static const std::vector<std::string> kHeader = {"unit_id",
                                                     "coverage",
                                                     "count",
                                                     "days_elapsed",
                                                     "most_recent_date",
                                                     "oldest_date",
                                                     "number_of_years",
                                                     "number_of_months",
                                                     "number_of_days",
                                                     "number_of_hours",
                                                     "number_of_days_of_week",
                                                     "number_of_daytime",
                                                     "number_of_nighttime",
                                                     "number_of_spring",
                                                     "number_of_summer",
                                                     "number_of_autumn",
                                                     "number_of_winter",
                                                     "average_compass_angle",
                                                     "average_relative_angle",
                                                     "average_is_pano",
                                                     "number_of_users",
                                                     "number_of_sequences",
                                                     "number_of_organizations",
                                                     "average_speed_kmh"};
    return kHeader;
}

inline std::vector<std::string> to_csv_row(const AggregateRow& a) {
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", v);
        return std::string(buf);
    };
    return {a.unit_id,
            fmt(a.coverage_pct),
            std::to_string(a.count),
            std::to_string(a.days_elapsed),
            a.most_recent_date,
            a.oldest_date,
            std::to_string(a.number_of_years),
            std::to_string(a.number_of_months),
            std::to_string(a.number_of_days),
            std::to_string(a.number_of_hours),
            std::to_string(a.number_of_days_of_week),
            std::to_string(a.number_of_daytime),
            std::to_string(a.number_of_nighttime),
            std::to_string(a.number_of_spring),
            std::to_string(a.number_of_summer),
            std::to_string(a.number_of_autumn),
            std::to_string(a.number_of_winter),
            fmt(a.average_compass_angle),
            a.average_relative_angle ? fmt(*a.average_relative_angle) : "",
            fmt(a.average_is_pano),
            std::to_string(a.number_of_users),
            std::to_string(a.number_of_sequences),
            std::to_string(a.number_of_organizations),
            a.average_speed_kmh ? fmt(*a.average_speed_kmh) : ""};
}

inline void write_aggregate_csv(const std::string& path, std::span<const AggregateRow> rows) {
    csv::Table t;
    t.header = aggregate_csv_header();
    for (const auto& a : rows) t.rows.push_back(to_csv_row(a));
    csv::write_file(path, t);
}

}  // namespace svipipe::metadata
