#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "svipipe/geo.hpp"
#include "svipipe/h3.hpp"

using namespace svipipe;

namespace {

struct CellVector {
    double lat;
    double lon;
    int res;
    uint64_t cell;
};

const CellVector kCellVectors[] = {
#include "support/h3_cell_vectors.inc"
};

struct GeoVector {
    uint64_t cell;
    double center_lat;
    double center_lon;
    int n_verts;
    double boundary[20];
};

const GeoVector kGeoVectors[] = {
#include "support/h3_geo_vectors.inc"
};

}  // namespace

TEST_CASE("latlng_to_cell matches the published reference vectors") {
    std::map<int, int> per_resolution;
    for (const auto& v : kCellVectors) {
        CAPTURE(v.lat, v.lon, v.res);
        CHECK(h3::latlng_to_cell(v.lat, v.lon, v.res) == v.cell);
        ++per_resolution[v.res];
    }
    // The conformance set covers every pinned resolution with >= 100 vectors.
    CHECK(std::size(kCellVectors) >= 100);
    for (const int res : {0, 5, 9, 15}) {
        CAPTURE(res);
        CHECK(per_resolution[res] >= 25);
    }
}

TEST_CASE("the canonical San Francisco vector") {
    CHECK(h3::latlng_to_cell(37.7752702151959, -122.418307270836, 9) == 0x8928308280fffffULL);
}

TEST_CASE("cell centers and boundaries match the reference") {
    for (const auto& g : kGeoVectors) {
        CAPTURE(g.cell);
        const auto [lat, lon] = h3::cell_to_latlng(g.cell);
        CHECK_THAT(lat, Catch::Matchers::WithinAbs(g.center_lat, 1e-9));
        CHECK_THAT(lon, Catch::Matchers::WithinAbs(g.center_lon, 1e-9));

        const auto boundary = h3::cell_to_boundary(g.cell);
        REQUIRE(boundary.size() == static_cast<size_t>(g.n_verts));
        for (int i = 0; i < g.n_verts; ++i) {
            CHECK_THAT(boundary[i].first, Catch::Matchers::WithinAbs(g.boundary[2 * i], 1e-9));
            CHECK_THAT(boundary[i].second,
                       Catch::Matchers::WithinAbs(g.boundary[2 * i + 1], 1e-9));
        }
    }
}

TEST_CASE("hierarchy: res-0 parent contains the res-9 cell") {
    const uint64_t c9 = h3::latlng_to_cell(37.7752702151959, -122.418307270836, 9);
    const uint64_t c0 = h3::latlng_to_cell(37.7752702151959, -122.418307270836, 0);
    CHECK(h3::cell_to_parent(c9, 0) == c0);
    CHECK(h3::cell_to_parent(c9, 9) == c9);
    CHECK_THROWS_AS(h3::cell_to_parent(c9, 10), std::out_of_range);
}

TEST_CASE("two nearby points share a cell; indexing is deterministic") {
    const geo::GeoPoint a(1.3521, 103.8198);
    const geo::GeoPoint b(1.35211, 103.81981);  // ~1.5 m away
    const auto ha = geo::hex_index(a, 9);
    const auto hb = geo::hex_index(b, 9);
    CHECK(ha == hb);
    CHECK(ha.resolution == 9);
    CHECK(geo::hex_index(a, 9).value == geo::hex_index(a, 9).value);
}

TEST_CASE("resolution bounds are enforced") {
    CHECK_THROWS_AS(geo::hex_index({0.0, 0.0}, -1), std::out_of_range);
    CHECK_THROWS_AS(geo::hex_index({0.0, 0.0}, 16), std::out_of_range);
    CHECK_THROWS_AS(h3::latlng_to_cell(0.0, 0.0, 16), std::out_of_range);
}

TEST_CASE("index validity") {
    for (const auto& v : kCellVectors) {
        CHECK(h3::is_valid_cell(v.cell));
    }
    CHECK_FALSE(h3::is_valid_cell(0));
    CHECK_FALSE(h3::is_valid_cell(0xffffffffffffffffULL));
    // Trailing digits must be unused (0b111) beyond the cell resolution.
    CHECK_FALSE(h3::is_valid_cell(0x892830828000000ULL));
}

TEST_CASE("cell boundary surrounds its center") {
    for (const auto& v : kCellVectors) {
        if (v.res != 9) continue;
        const auto [clat, clon] = h3::cell_to_latlng(v.cell);
        const auto boundary = h3::cell_to_boundary(v.cell);
        // The center must be strictly inside the boundary's bounding box.
        double min_lat = 90, max_lat = -90, min_lon = 360, max_lon = -360;
        for (const auto& [lat, lon] : boundary) {
            min_lat = std::min(min_lat, lat);
            max_lat = std::max(max_lat, lat);
            min_lon = std::min(min_lon, lon);
            max_lon = std::max(max_lon, lon);
        }
        if (max_lon - min_lon > 180.0) continue;  // antimeridian wrap, skip the box check
        CHECK(clat > min_lat);
        CHECK(clat < max_lat);
        CHECK(clon > min_lon);
        CHECK(clon < max_lon);
    }
}
