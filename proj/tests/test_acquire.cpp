#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>

#include "svipipe/acquire.hpp"
#include "svipipe/mock.hpp"

using namespace svipipe;
namespace fs = std::filesystem;

namespace {

const std::string kTmp = "/tmp/svipipe_acquire_tests";

struct TmpDir {
    TmpDir() {
        fs::remove_all(kTmp);
        fs::create_directories(kTmp);
    }
};

acquire::DownloadOptions fast_options(int workers = 4) {
    acquire::DownloadOptions opt;
    opt.workers = workers;
    opt.requests_per_second = 500.0;
    opt.backoff_base_ms = 5;
    return opt;
}

std::string file_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("region parsing variants") {
    TmpDir tmp;

    SECTION("a single point becomes a degenerate box") {
        const auto input = acquire::RegionInput::from_string("1.35,103.82");
        const auto region = acquire::parse_region(input);
        REQUIRE(region.boxes.size() == 1);
        CHECK(region.boxes[0].min_lat == region.boxes[0].max_lat);
        CHECK(region.boxes[0].contains({1.35, 103.82}));
    }

    SECTION("bbox string is min_lon,min_lat,max_lon,max_lat") {
        const auto input = acquire::RegionInput::from_string("103.0,1.0,104.0,2.0");
        const auto region = acquire::parse_region(input);
        REQUIRE(region.boxes.size() == 1);
        CHECK(region.boxes[0].min_lat == 1.0);
        CHECK(region.boxes[0].max_lon == 104.0);
    }

    SECTION("CSV envelope") {
        const std::string path = kTmp + "/pts.csv";
        std::ofstream(path) << "longitude,latitude\n0,0\n1,1\n";
        const auto region = acquire::parse_region(acquire::RegionInput::from_string(path));
        REQUIRE(region.boxes.size() == 1);
        CHECK(region.boxes[0].min_lat == 0.0);
        CHECK(region.boxes[0].max_lat == 1.0);
        CHECK(region.boxes[0].min_lon == 0.0);
        CHECK(region.boxes[0].max_lon == 1.0);
    }

    SECTION("empty CSV is an error") {
        const std::string path = kTmp + "/empty.csv";
        std::ofstream(path) << "longitude,latitude\n";
        CHECK_THROWS_WITH(acquire::parse_region(acquire::RegionInput::from_string(path)),
                          Catch::Matchers::ContainsSubstring("no coordinates"));
    }

    SECTION("CSV without coordinate columns is an error") {
        const std::string path = kTmp + "/nocoords.csv";
        std::ofstream(path) << "a,b\n1,2\n";
        CHECK_THROWS(acquire::parse_region(acquire::RegionInput::from_string(path)));
    }

    SECTION("GeoJSON polygon carries a clip ring") {
        const std::string path = kTmp + "/region.geojson";
        std::ofstream(path) << R"({"type":"Feature","geometry":{"type":"Polygon",
            "coordinates":[[[0,0],[2,0],[2,2],[0,2],[0,0]]]}})";
        const auto region = acquire::parse_region(acquire::RegionInput::from_string(path));
        CHECK(region.clip_polygon.size() >= 4);
        CHECK(region.contains({1.0, 1.0}));
        CHECK_FALSE(region.contains({1.0, 3.0}));
    }

    SECTION("place names need a geocoder and can miss") {
        mock::MockProviderServer server;
        server.start();
        acquire::HttpGeocoder geocoder(server.base_url());

        const auto region = acquire::parse_region(
            acquire::RegionInput::from_string("miniville"), &geocoder);
        REQUIRE(region.boxes.size() == 1);
        const auto want = mock::mini_bbox();
        CHECK_THAT(region.boxes[0].min_lat, Catch::Matchers::WithinAbs(want.min_lat, 1e-9));
        CHECK_THAT(region.boxes[0].max_lon, Catch::Matchers::WithinAbs(want.max_lon, 1e-9));

        CHECK_THROWS_WITH(
            acquire::parse_region(acquire::RegionInput::from_string("atlantis"), &geocoder),
            Catch::Matchers::ContainsSubstring("place not found"));
        CHECK_THROWS(acquire::parse_region(acquire::RegionInput::from_string("nowhere")));
    }

    SECTION("unreadable file is an error") {
        CHECK_THROWS(acquire::parse_region(
            acquire::RegionInput::from_string(kTmp + "/region.shp")));
    }
}

TEST_CASE("tile enumeration") {
    SECTION("a small box fits one z14 tile") {
        acquire::Region region;
        region.boxes.push_back(geo::BBox::of(1.3000, 103.8200, 1.3001, 103.8201));
        CHECK(acquire::enumerate_tiles(region, 14).size() == 1);
    }

    SECTION("the whole world at z5 has 4^5 tiles") {
        acquire::Region region;
        region.boxes.push_back(geo::BBox::of(-85.0, -179.999, 85.0, 179.999));
        CHECK(acquire::enumerate_tiles(region, 5).size() == 1024);
    }

    SECTION("a box straddling a tile boundary covers two tiles") {
        // Tile x boundary at lon 0 for any zoom.
        acquire::Region region;
        region.boxes.push_back(geo::BBox::of(10.0, -0.001, 10.001, 0.001));
        CHECK(acquire::enumerate_tiles(region, 10).size() == 2);
    }

    SECTION("antimeridian-crossing boxes split without error") {
        const auto input = acquire::RegionInput::from_string("179.5,10.0,-179.5,10.4");
        const auto region = acquire::parse_region(input);
        REQUIRE(region.boxes.size() == 2);
        const auto tiles = acquire::enumerate_tiles(region, 8);
        CHECK(!tiles.empty());
        for (const auto& t : tiles) {
            CHECK(t.x >= 0);
            CHECK(t.x < (1 << 8));
        }
    }

    SECTION("zoom bounds") {
        acquire::Region region;
        region.boxes.push_back(geo::BBox::of(0.0, 0.0, 1.0, 1.0));
        CHECK_THROWS_AS(acquire::enumerate_tiles(region, 23), std::out_of_range);
    }
}

TEST_CASE("checkpoint log replay") {
    TmpDir tmp;
    const std::string path = kTmp + "/ck.log";
    {
        acquire::Checkpoint ck(path);
        CHECK_FALSE(ck.is_done("u1"));
        ck.mark_done("u1");
        ck.mark_done("u2");
        ck.mark_failed("u3");
        CHECK(ck.is_done("u1"));
        CHECK_FALSE(ck.is_done("u3"));
    }
    {
        acquire::Checkpoint reloaded(path);
        CHECK(reloaded.is_done("u1"));
        CHECK(reloaded.is_done("u2"));
        CHECK_FALSE(reloaded.is_done("u3"));
        // Duplicate completions stay idempotent.
        reloaded.mark_done("u1");
        CHECK(reloaded.done_count() == 2);
    }
    // A torn last line (no tabs) is tolerated.
    std::ofstream(path, std::ios::app) << "half-a-reco";
    acquire::Checkpoint tolerant(path);
    CHECK(tolerant.is_done("u2"));
}

TEST_CASE("download against the mock provider") {
    TmpDir tmp;
    mock::MockProviderServer server;
    server.start();
    acquire::HttpProvider provider(server.base_url());
    const acquire::Region region =
        acquire::parse_region(acquire::RegionInput::from_string("103.80,1.27,103.90,1.33"));

    SECTION("full corpus downloads once, rerun does no data fetches") {
        const auto result = acquire::download_all(provider, region, kTmp + "/out",
                                                  kTmp + "/out/ck.log", fast_options());
        CHECK(result.records.size() == 50);
        CHECK(result.failed_units.empty());
        CHECK(fs::exists(kTmp + "/out/images.csv"));
        CHECK(read_image_csv(kTmp + "/out/images.csv").size() == 50);
        for (const auto& r : result.records) {
            CHECK(fs::exists(kTmp + "/out/" + r.local_path));
        }

        const auto before = server.stats().total_requests;
        const auto again = acquire::download_all(provider, region, kTmp + "/out",
                                                 kTmp + "/out/ck.log", fast_options());
        CHECK(again.records.size() == 50);
        // Checkpoint idempotence: no tile or image requests the second time.
        CHECK(server.stats().total_requests == before);
    }

    SECTION("a 10-image subset: 10 files, 10 CSV rows") {
        auto opt = fast_options(4);
        opt.filters["sequence_id"] = "seq01";
        const auto result = acquire::download_all(provider, region, kTmp + "/ten",
                                                  kTmp + "/ten/ck.log", opt);
        CHECK(result.records.size() == 10);
        CHECK(read_image_csv(kTmp + "/ten/images.csv").size() == 10);
        size_t files = 0;
        for (const auto& entry : fs::directory_iterator(kTmp + "/ten/images")) {
            files += entry.path().extension() == ".jpg";
        }
        CHECK(files == 10);
    }

    SECTION("metadata filters narrow the corpus") {
        auto opt = fast_options();
        opt.filters["is_pano"] = "true";
        const auto result = acquire::download_all(provider, region, kTmp + "/pano",
                                                  kTmp + "/pano/ck.log", opt);
        CHECK(result.records.size() == 20);  // seq01 + seq02
        for (const auto& r : result.records) CHECK(r.is_pano);
    }

    SECTION("worker budget bounds in-flight requests") {
        auto opt = fast_options(3);
        mock::FaultPlan plan;
        plan.latency_ms = 15;  // hold requests open so concurrency is observable
        server.set_faults(plan);
        acquire::download_all(provider, region, kTmp + "/c3", kTmp + "/c3/ck.log", opt);
        server.set_faults({});
        CHECK(server.stats().max_concurrent <= 3);
    }

    SECTION("429 storms are retried to success") {
        mock::FaultPlan plan;
        plan.fail_429_every = 4;  // every 4th data request rate-limits
        server.set_faults(plan);
        const auto result = acquire::download_all(provider, region, kTmp + "/retry",
                                                  kTmp + "/retry/ck.log", fast_options());
        server.set_faults({});
        CHECK(result.records.size() == 50);
        CHECK(result.failed_units.empty());
    }

    SECTION("auth failures abort immediately") {
        mock::MockProviderServer secured("sesame");
        secured.start();
        acquire::HttpProvider anonymous(secured.base_url());
        CHECK_THROWS_AS(acquire::download_all(anonymous, region, kTmp + "/auth",
                                              kTmp + "/auth/ck.log", fast_options()),
                        acquire::AuthError);

        acquire::HttpProvider keyed(secured.base_url(), "sesame");
        const auto ok = acquire::download_all(keyed, region, kTmp + "/auth2",
                                              kTmp + "/auth2/ck.log", fast_options());
        CHECK(ok.records.size() == 50);
    }

    SECTION("interrupt and resume produce the single-run output set") {
        // Reference run, uninterrupted.
        acquire::download_all(provider, region, kTmp + "/ref", kTmp + "/ref/ck.log",
                              fast_options());

        // Interrupted run: stop after a handful of completed fetches.
        std::atomic<int> completed{0};
        auto opt = fast_options(2);
        opt.should_stop = [&] { return completed.load() >= 5; };
        // Count completions by watching the checkpoint grow.
        acquire::Checkpoint probe(kTmp + "/probe.log");
        opt.log = [&](const std::string&) {};

        {
            auto counting = fast_options(2);
            counting.should_stop = [&] { return completed.load() >= 5; };
            // Wrap the provider to count fetches.
            struct CountingProvider : acquire::Provider {
                acquire::Provider& inner;
                std::atomic<int>& n;
                CountingProvider(acquire::Provider& p, std::atomic<int>& c) : inner(p), n(c) {}
                std::vector<ImageRecord> discover(const acquire::TileCoord& t) override {
                    return inner.discover(t);
                }
                std::vector<uint8_t> fetch(const std::string& id, int size) override {
                    auto bytes = inner.fetch(id, size);
                    ++n;
                    return bytes;
                }
            } counting_provider(provider, completed);

            const auto partial =
                acquire::download_all(counting_provider, region, kTmp + "/resume",
                                      kTmp + "/resume/ck.log", counting);
            CHECK(partial.interrupted);
        }

        // Resume to completion.
        const auto resumed = acquire::download_all(provider, region, kTmp + "/resume",
                                                   kTmp + "/resume/ck.log", fast_options());
        CHECK_FALSE(resumed.interrupted);
        CHECK(resumed.records.size() == 50);

        // Byte-identical output set.
        CHECK(file_bytes(kTmp + "/resume/images.csv") == file_bytes(kTmp + "/ref/images.csv"));
        for (const auto& r : resumed.records) {
            CHECK(file_bytes(kTmp + "/resume/" + r.local_path) ==
                  file_bytes(kTmp + "/ref/" + r.local_path));
        }
    }

    SECTION("unfetchable images land in the error log, not the CSV") {
        mock::FaultPlan plan;
        plan.broken_image_ids = {"img0003", "img0017"};
        server.set_faults(plan);
        auto opt = fast_options(2);
        opt.max_attempts = 3;
        opt.backoff_base_ms = 1;
        const auto result = acquire::download_all(provider, region, kTmp + "/err",
                                                  kTmp + "/err/ck.log", opt);
        server.set_faults({});
        REQUIRE(result.failed_units.size() == 2);
        CHECK(fs::exists(kTmp + "/err/errors.log"));
        // CSV row count equals discovered minus permanently failed ids.
        CHECK(result.records.size() == 48);
        CHECK(read_image_csv(kTmp + "/err/images.csv").size() == 48);
        for (const auto& r : result.records) {
            CHECK(r.image_id != "img0003");
            CHECK(r.image_id != "img0017");
        }
    }
}

TEST_CASE("record filter semantics") {
    ImageRecord r;
    r.image_id = "x";
    r.location = geo::GeoPoint(1.0, 103.0);
    r.captured_at_ms = 1000;
    r.is_pano = true;
    r.sequence_id = "s9";
    r.creator_id = "me";

    using acquire::detail::record_matches;
    CHECK(record_matches(r, {{"is_pano", "true"}}));
    CHECK_FALSE(record_matches(r, {{"is_pano", "false"}}));
    CHECK(record_matches(r, {{"sequence_id", "s9"}, {"creator_id", "me"}}));
    CHECK(record_matches(r, {{"min_captured_at_ms", "500"}}));
    CHECK_FALSE(record_matches(r, {{"max_captured_at_ms", "500"}}));
    CHECK_THROWS(record_matches(r, {{"bogus", "1"}}));
}
