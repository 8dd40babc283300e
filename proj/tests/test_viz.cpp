#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>

#include "svipipe/viz.hpp"

using namespace svipipe;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const std::string kTmp = "/tmp/svipipe_viz_tests";

struct TmpDir {
    TmpDir() {
        fs::remove_all(kTmp);
        fs::create_directories(kTmp);
    }
};

}  // namespace

TEST_CASE("histogram bin semantics") {
    SECTION("{0,0,1} in two bins") {
        const std::vector<double> values{0.0, 0.0, 1.0};
        const auto h = viz::compute_histogram(values, 2);
        REQUIRE(h.counts.size() == 2);
        CHECK(h.counts[0] == 2);
        CHECK(h.counts[1] == 1);  // the max value lands in the closed last bin
    }

    SECTION("constant values occupy a single bin") {
        const std::vector<double> values{3.0, 3.0, 3.0};
        const auto h = viz::compute_histogram(values, 4);
        int64_t total = 0;
        int occupied = 0;
        for (const int64_t c : h.counts) {
            total += c;
            occupied += c > 0;
        }
        CHECK(total == 3);
        CHECK(occupied == 1);
    }

    SECTION("counts always sum to N") {
        std::mt19937_64 rng(8);
        std::uniform_real_distribution<double> u(-100.0, 100.0);
        std::vector<double> values;
        for (int i = 0; i < 500; ++i) values.push_back(u(rng));
        const auto h = viz::compute_histogram(values, 13);
        int64_t total = 0;
        for (const int64_t c : h.counts) total += c;
        CHECK(total == 500);
    }

    SECTION("empty input is an error") {
        CHECK_THROWS_AS(viz::compute_histogram({}, 4), std::invalid_argument);
    }
}

TEST_CASE("histogram files") {
    TmpDir tmp;
    const std::vector<double> values{0.0, 0.5, 1.0, 1.5, 1.5};
    viz::render_histogram(values, 3, kTmp + "/h.svg", kTmp + "/h.data.csv", "demo");

    const std::string svg = slurp(kTmp + "/h.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("<rect") != std::string::npos);

    const csv::Table side = csv::read_file(kTmp + "/h.data.csv");
    REQUIRE(side.rows.size() == 3);
    int64_t total = 0;
    for (const auto& row : side.rows) total += std::stoll(row[2]);
    CHECK(total == 5);
}

TEST_CASE("kde density properties") {
    SECTION("density integrates to one") {
        std::mt19937_64 rng(21);
        std::normal_distribution<double> gauss(2.0, 1.5);
        std::vector<double> values;
        for (int i = 0; i < 400; ++i) values.push_back(gauss(rng));

        const auto k = viz::compute_kde(values);
        double integral = 0.0;
        for (size_t i = 1; i < k.xs.size(); ++i) {
            integral += 0.5 * (k.density[i] + k.density[i - 1]) * (k.xs[i] - k.xs[i - 1]);
        }
        CHECK_THAT(integral, Catch::Matchers::WithinAbs(1.0, 1e-3));
    }

    SECTION("symmetric input yields a symmetric density") {
        const std::vector<double> values{-1.0, 1.0};
        const auto k = viz::compute_kde(values, 0.5);
        const size_t n = k.density.size();
        for (size_t i = 0; i < n / 2; ++i) {
            CHECK_THAT(k.density[i], Catch::Matchers::WithinAbs(k.density[n - 1 - i], 1e-9));
        }
    }

    SECTION("standard normal sample peaks near zero") {
        // Mirrored draws keep the sample exactly symmetric, pinning the mode.
        std::mt19937_64 rng(4);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<double> values;
        for (int i = 0; i < 5000; ++i) {
            const double x = gauss(rng);
            values.push_back(x);
            values.push_back(-x);
        }

        const auto k = viz::compute_kde(values);
        size_t peak = 0;
        for (size_t i = 1; i < k.density.size(); ++i) {
            if (k.density[i] > k.density[peak]) peak = i;
        }
        CHECK(std::fabs(k.xs[peak]) < 0.1);
    }

    SECTION("zero variance falls back to a fixed bandwidth") {
        const std::vector<double> values{2.0, 2.0, 2.0};
        const auto k = viz::compute_kde(values);
        CHECK(k.bandwidth_fallback);
        CHECK(k.bandwidth > 0.0);
    }

    SECTION("needs two values") {
        CHECK_THROWS_AS(viz::compute_kde(std::vector<double>{1.0}), std::invalid_argument);
    }
}

TEST_CASE("hex map aggregates and writes a sidecar that agrees") {
    TmpDir tmp;
    // Three points in one res-9 cell -> one polygon with count 3.
    const geo::GeoPoint base(1.3521, 103.8198);
    const auto cell = geo::hex_index(base, 9);
    char hex[24];
    std::snprintf(hex, sizeof hex, "%llx", static_cast<unsigned long long>(cell.value));

    std::map<std::string, double> cells{{hex, 3.0}};
    viz::MapSpec spec;
    spec.kind = viz::MapKind::kHex;
    viz::render_hex_map(cells, spec, kTmp + "/map.svg", kTmp + "/map.geojson");

    const std::string svg = slurp(kTmp + "/map.svg");
    CHECK(svg.find("<polygon") != std::string::npos);

    const auto doc = nlohmann::json::parse(slurp(kTmp + "/map.geojson"));
    REQUIRE(doc["features"].size() == 1);
    CHECK(doc["features"][0]["properties"]["value"] == 3.0);
    CHECK(doc["features"][0]["properties"]["id"] == hex);
    CHECK(doc["features"][0]["geometry"]["type"] == "Polygon");
    // The polygon ring has the hexagon's vertices (closed ring: 7 positions).
    CHECK(doc["features"][0]["geometry"]["coordinates"][0].size() >= 7);
}

TEST_CASE("point map plots one marker per record") {
    TmpDir tmp;
    std::vector<ImageRecord> records;
    ImageRecord r;
    r.image_id = "solo";
    r.location = geo::GeoPoint(1.3, 103.8);
    r.captured_at_ms = 1600000000000LL;
    r.compass_angle = 0.0;
    r.sequence_id = "s";
    r.creator_id = "u";
    records.push_back(r);

    viz::MapSpec spec;
    viz::render_point_map(records, {}, spec, kTmp + "/pts.svg", kTmp + "/pts.geojson");
    const std::string svg = slurp(kTmp + "/pts.svg");
    CHECK(svg.find("<circle") != std::string::npos);

    const auto doc = nlohmann::json::parse(slurp(kTmp + "/pts.geojson"));
    REQUIRE(doc["features"].size() == 1);
    CHECK(doc["features"][0]["geometry"]["type"] == "Point");
}

TEST_CASE("line map colors segments by value") {
    TmpDir tmp;
    std::vector<geo::StreetSegment> network;
    network.push_back({"road", {{1.30, 103.80}, {1.31, 103.81}}});
    network.push_back({"unused", {{1.40, 103.90}, {1.41, 103.91}}});

    std::map<std::string, double> values{{"road", 5.0}};
    viz::MapSpec spec;
    spec.kind = viz::MapKind::kLine;
    viz::render_line_map(network, values, spec, kTmp + "/line.svg", kTmp + "/line.geojson");

    const auto doc = nlohmann::json::parse(slurp(kTmp + "/line.geojson"));
    REQUIRE(doc["features"].size() == 1);  // segments without values are not drawn
    CHECK(doc["features"][0]["properties"]["id"] == "road");
    CHECK(doc["features"][0]["geometry"]["type"] == "LineString");
}

TEST_CASE("image grid composition") {
    TmpDir tmp;
    // Write five small distinct images.
    std::vector<std::string> paths;
    for (int i = 0; i < 5; ++i) {
        img::Image im(10 + i, 8, 3);
        for (auto& v : im.data) v = static_cast<uint8_t>(40 * i + 20);
        const std::string p = kTmp + "/img" + std::to_string(i) + ".png";
        img::save_png(p, im);
        paths.push_back(p);
    }

    SECTION("4 images in 2 columns form a 2x2 composite") {
        viz::ImageGridSpec spec;
        spec.columns = 2;
        spec.cell_width = 32;
        spec.cell_height = 24;
        const auto grid =
            viz::image_grid(std::vector<std::string>(paths.begin(), paths.begin() + 4), spec);
        CHECK(grid.composite.width == 64);
        CHECK(grid.composite.height == 48);
        CHECK(grid.order.size() == 4);
    }

    SECTION("5 images in 2 columns need 3 rows") {
        viz::ImageGridSpec spec;
        spec.columns = 2;
        spec.cell_width = 16;
        spec.cell_height = 12;
        const auto grid = viz::image_grid(paths, spec);
        CHECK(grid.composite.width == 32);
        CHECK(grid.composite.height == 36);
    }

    SECTION("sorting follows ascending scores") {
        std::map<std::string, double> scores;
        for (size_t i = 0; i < paths.size(); ++i) {
            scores[paths[i]] = static_cast<double>(paths.size() - i);  // reverse order
        }
        viz::ImageGridSpec spec;
        spec.columns = 5;
        const auto grid = viz::image_grid(paths, spec, &scores);
        REQUIRE(grid.order.size() == 5);
        for (size_t i = 0; i < 5; ++i) CHECK(grid.order[i] == paths[4 - i]);
    }

    SECTION("shuffles are seeded and deterministic") {
        viz::ImageGridSpec spec;
        spec.columns = 3;
        spec.seed = 99;
        const auto a = viz::image_grid(paths, spec);
        const auto b = viz::image_grid(paths, spec);
        CHECK(a.order == b.order);
        CHECK(a.composite.data == b.composite.data);
    }

    SECTION("unreadable images are skipped; all unreadable is an error") {
        auto with_bad = paths;
        with_bad.push_back(kTmp + "/missing.png");
        const auto grid = viz::image_grid(with_bad, {});
        CHECK(grid.skipped.size() == 1);
        CHECK(grid.order.size() == 5);

        const std::vector<std::string> all_bad{kTmp + "/nope1.png", kTmp + "/nope2.png"};
        CHECK_THROWS(viz::image_grid(all_bad, {}));
    }
}

TEST_CASE("hex-map counts agree with the aggregation module") {
    TmpDir tmp;
    // Spread records over several cells, then compare the per-cell counts the
    // map plots with the counts the aggregation module reports.
    std::vector<ImageRecord> records;
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> lat(1.28, 1.33);
    std::uniform_real_distribution<double> lon(103.82, 103.87);
    for (int i = 0; i < 60; ++i) {
        ImageRecord r;
        r.image_id = "m" + std::to_string(i);
        r.location = geo::GeoPoint(lat(rng), lon(rng));
        r.captured_at_ms = 1600000000000LL + i;
        r.compass_angle = 0.0;
        r.sequence_id = "s";
        r.creator_id = "u";
        records.push_back(r);
    }
    const auto enriched = metadata::enrich(records, {}, {});
    const auto rows = metadata::aggregate_by_hex(enriched);

    // The plotted value per cell: a straight recount of enriched records.
    std::map<std::string, double> plotted;
    for (const auto& e : enriched) {
        char hex[24];
        std::snprintf(hex, sizeof hex, "%llx",
                      static_cast<unsigned long long>(e.h3_id.value));
        plotted[hex] += 1.0;
    }

    REQUIRE(plotted.size() == rows.size());
    for (const auto& row : rows) {
        REQUIRE(plotted.count(row.unit_id) == 1);
        CHECK(plotted[row.unit_id] == static_cast<double>(row.count));
    }

    // And the rendered sidecar carries exactly those values.
    viz::MapSpec spec;
    spec.kind = viz::MapKind::kHex;
    viz::render_hex_map(plotted, spec, kTmp + "/xc.svg", kTmp + "/xc.geojson");
    const auto doc = nlohmann::json::parse(slurp(kTmp + "/xc.geojson"));
    REQUIRE(doc["features"].size() == rows.size());
    for (const auto& f : doc["features"]) {
        const std::string id = f["properties"]["id"];
        CHECK(f["properties"]["value"].get<double>() == plotted[id]);
    }
}

TEST_CASE("colormap endpoints and monotone brightness direction") {
    const auto low = viz::colormap(0.0);
    const auto high = viz::colormap(1.0);
    CHECK(static_cast<int>(low[2]) > static_cast<int>(low[1]));   // dark purple
    CHECK(static_cast<int>(high[0]) > 200);                       // bright yellow
    CHECK(static_cast<int>(high[1]) > 200);
    CHECK(viz::color_hex({255, 0, 16}) == "#ff0010");
}
