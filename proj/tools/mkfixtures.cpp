// Writes the mini-corpus companion fixtures: per-image attribute table,
// embedding vectors, a street network and per-panorama depth grids. All
// outputs are deterministic so repeated runs are byte-identical.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "svipipe/csv.hpp"
#include "svipipe/geojson.hpp"
#include "svipipe/mock.hpp"

namespace fs = std::filesystem;
using namespace svipipe;

namespace {

std::string fmt(double v, const char* spec = "%.4f") {
    char buf[32];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"generate mini-corpus fixtures"};
    std::string out_dir = "data/mini/gen";
    app.add_option("--out", out_dir, "output directory");
    CLI11_PARSE(app, argc, argv);

    fs::create_directories(out_dir);
    fs::create_directories(out_dir + "/depth");
    const auto corpus = mock::make_mini_corpus();

    // Attribute table: quality/platform/view/lighting labels plus segment
    // ratios, scene probabilities and perception scores. The mix is chosen so
    // every filter criterion fires on part of the corpus while most
    // daytime drive imagery stays suitable.
    csv::Table attrs;
    attrs.header = {"image_id", "quality", "platform", "view_direction", "lighting",
                    "seg_sky", "seg_building", "seg_vegetation", "seg_road", "seg_sidewalk",
                    "p365_highway", "p365_residential_neighborhood", "p365_construction_site",
                    "p365_tree_farm", "p365_forest_path", "p365_forest_road",
                    "pp_beautiful", "pp_boring", "pp_depressing", "pp_lively", "pp_safe",
                    "pp_wealthy"};

    mock::detail::Rng rng(2024);
    for (size_t i = 0; i < corpus.size(); ++i) {
        const auto& r = corpus[i];
        const int seq = std::stoi(r.sequence_id.substr(3));  // 1..5

        std::string quality = "good";
        if (i % 11 == 3) quality = "very poor";
        else if (i % 7 == 2) quality = "slightly poor";
        else if (i % 17 == 5) quality = "";  // missing

        std::string platform = "driving surface";
        if (i % 13 == 4) platform = "walking surface";
        if (i % 19 == 7) platform = "cycling surface";

        std::string view = (i % 9 == 6) ? "side" : "front/back";
        // seq03 was captured at 22:00 local.
        std::string lighting = (seq == 3) ? "night" : (i % 15 == 8 ? "dusk/dawn" : "day");

        // Segment mixes differ per sequence so the clusters are separable:
        // highway-ish, dense urban, green corridor, mixed, residential.
        double sky = 0, building = 0, veg = 0, road = 0, sidewalk = 0;
        switch (seq) {
            case 1: sky = 0.45; building = 0.05; veg = 0.08; road = 0.35; sidewalk = 0.02; break;
            case 2: sky = 0.10; building = 0.55; veg = 0.05; road = 0.20; sidewalk = 0.08; break;
            case 3: sky = 0.15; building = 0.10; veg = 0.50; road = 0.20; sidewalk = 0.03; break;
            case 4: sky = 0.25; building = 0.25; veg = 0.20; road = 0.22; sidewalk = 0.06; break;
            case 5: sky = 0.20; building = 0.15; veg = 0.35; road = 0.18; sidewalk = 0.10; break;
        }
        auto jitter = [&](double v) { return std::max(0.0, v + rng.range(-0.03, 0.03)); };
        sky = jitter(sky);
        building = jitter(building);
        veg = jitter(veg);
        road = jitter(road);
        sidewalk = jitter(sidewalk);
        // A handful of near-monochrome frames fail the complexity filter.
        if (i % 16 == 9) {
            sky = 0.97;
            building = veg = road = sidewalk = 0.005;
        }

        const double highway = seq == 1 ? rng.range(0.5, 0.8) : rng.range(0.0, 0.15);
        const double residential = seq == 5 ? rng.range(0.4, 0.7) : rng.range(0.0, 0.2);
        const double construction = seq == 4 ? rng.range(0.2, 0.4) : rng.range(0.0, 0.1);
        const double tree_farm = seq == 3 ? rng.range(0.3, 0.5) : rng.range(0.0, 0.1);
        const double forest_path = seq == 3 ? rng.range(0.2, 0.4) : rng.range(0.0, 0.08);
        const double forest_road = seq == 3 ? rng.range(0.2, 0.5) : rng.range(0.0, 0.1);

        const double base = static_cast<double>(seq);
        attrs.rows.push_back({r.image_id, quality, platform, view, lighting,
                              fmt(sky), fmt(building), fmt(veg), fmt(road), fmt(sidewalk),
                              fmt(highway), fmt(residential), fmt(construction),
                              fmt(tree_farm), fmt(forest_path), fmt(forest_road),
                              fmt(2.0 + base + rng.range(-0.5, 0.5)),
                              fmt(8.0 - base + rng.range(-0.5, 0.5)),
                              fmt(6.0 - base * 0.8 + rng.range(-0.4, 0.4)),
                              fmt(1.5 + base * 1.2 + rng.range(-0.5, 0.5)),
                              fmt(3.0 + base * 0.9 + rng.range(-0.4, 0.4)),
                              fmt(2.5 + base * 0.7 + rng.range(-0.5, 0.5))});
    }
    csv::write_file(out_dir + "/attributes.csv", attrs);
    std::cerr << "[info] mkfixtures: attributes.csv (" << attrs.rows.size() << " rows)\n";

    // Embeddings: 16-dim, clustered by sequence.
    csv::Table emb;
    emb.header = {"image_id"};
    for (int d = 0; d < 16; ++d) emb.header.push_back("e" + std::to_string(d));
    for (const auto& r : corpus) {
        const int seq = std::stoi(r.sequence_id.substr(3));
        std::vector<std::string> row{r.image_id};
        for (int d = 0; d < 16; ++d) {
            const double center = (d % 5 == seq - 1) ? 2.0 : 0.2;
            row.push_back(fmt(center + rng.range(-0.15, 0.15), "%.6f"));
        }
        emb.rows.push_back(std::move(row));
    }
    csv::write_file(out_dir + "/embeddings.csv", emb);
    std::cerr << "[info] mkfixtures: embeddings.csv\n";

    // Street network: one LineString per sequence path, slightly offset so
    // snap distances stay small but non-zero.
    std::vector<nlohmann::json> features;
    for (int seq = 1; seq <= 5; ++seq) {
        std::vector<geo::GeoPoint> line;
        for (const auto& r : corpus) {
            if (r.sequence_id == "seq0" + std::to_string(seq)) {
                line.emplace_back(r.location.lat + 0.00005, r.location.lon);
            }
        }
        features.push_back(
            geojson::line_feature(line, {{"id", "street-" + std::to_string(seq)}}));
    }
    {
        std::ofstream out(out_dir + "/network.geojson");
        out << geojson::feature_collection(features).dump(2) << "\n";
    }
    std::cerr << "[info] mkfixtures: network.geojson\n";

    // Absolute depth fixtures for the panoramas.
    int depth_count = 0;
    for (const auto& r : corpus) {
        if (!r.is_pano) continue;
        const auto depth = mock::mock_depth_for(r, true);
        transform::save_depth_bin(out_dir + "/depth/" + r.image_id + ".depth.bin", depth);
        ++depth_count;
    }
    std::cerr << "[info] mkfixtures: " << depth_count << " depth grids\n";
    return 0;
}
