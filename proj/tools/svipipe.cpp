// svipipe: one binary for the whole SVI workflow. Subcommands cover
// acquisition, metadata, transformation, classical features, suitability
// filtering, clustering and plots; `pipeline` chains them from a config file.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or config error.
// Progress goes to stderr; data only to files.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "svipipe/acquire.hpp"
#include "svipipe/analysis.hpp"
#include "svipipe/config.hpp"
#include "svipipe/features.hpp"
#include "svipipe/geojson.hpp"
#include "svipipe/metadata.hpp"
#include "svipipe/mock.hpp"
#include "svipipe/transform.hpp"
#include "svipipe/viz.hpp"

namespace fs = std::filesystem;
using namespace svipipe;

namespace {

int g_verbosity = 1;  // 0 quiet, 1 normal, 2 verbose

void log_info(const std::string& module, const std::string& msg) {
    if (g_verbosity >= 1) std::cerr << "[info] " << module << ": " << msg << "\n";
}

void log_debug(const std::string& module, const std::string& msg) {
    if (g_verbosity >= 2) std::cerr << "[debug] " << module << ": " << msg << "\n";
}

/// Flags or config values that make the request unrunnable (exit code 2).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// All outputs are written to a temp path and renamed into place, so a rerun
// or crash never leaves a half-written file behind. The temp name keeps the
// extension so format dispatch still works.
template <typename WriteFn>
void atomic_output(const std::string& path, WriteFn&& write) {
    const fs::path p(path);
    const std::string tmp = (p.parent_path() / ("tmp." + p.filename().string())).string();
    write(tmp);
    fs::rename(tmp, path);
}

std::string sidecar_path(const std::string& out, const char* ext) {
    const fs::path p(out);
    fs::path side = p.parent_path() / p.stem();
    return side.string() + ext;
}

double parse_double(const std::string& s, const char* what) {
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        throw UsageError(std::string("cannot parse ") + what + ": " + s);
    }
}

// ---- download ----

struct DownloadArgs {
    std::string region;
    std::string provider = "http";
    std::string base_url;
    std::string geocoder_url;
    std::string out_dir = "out";
    std::string checkpoint;
    int workers = 4;
    int zoom = 14;
    int image_size = 1024;
    double rps = 10.0;
    int backoff_base_ms = 1000;
    std::vector<std::string> filters;
};

int run_download(const DownloadArgs& args) {
    if (args.provider != "http" && args.provider != "mock") {
        throw UsageError("unknown provider '" + args.provider + "' (available: http, mock)");
    }
    if (args.base_url.empty()) throw UsageError("--base-url is required");

    std::string api_key;
    if (const char* env = std::getenv("SVIPIPE_API_KEY")) api_key = env;

    acquire::HttpProvider provider(args.base_url, api_key);
    std::unique_ptr<acquire::Geocoder> geocoder;
    const std::string geocoder_url =
        args.geocoder_url.empty() ? args.base_url : args.geocoder_url;
    geocoder = std::make_unique<acquire::HttpGeocoder>(geocoder_url);

    const auto input = acquire::RegionInput::from_string(args.region);
    const acquire::Region region = acquire::parse_region(input, geocoder.get());
    log_info("download", "region resolved to " + std::to_string(region.boxes.size()) +
                             " box(es)");

    acquire::DownloadOptions opt;
    opt.workers = args.workers;
    opt.discovery_zoom = args.zoom;
    opt.image_size = args.image_size;
    opt.requests_per_second = args.rps;
    opt.backoff_base_ms = args.backoff_base_ms;
    opt.log = [](const std::string& msg) { log_debug("download", msg); };
    for (const auto& f : args.filters) {
        const size_t eq = f.find('=');
        if (eq == std::string::npos) throw UsageError("--filter expects key=value: " + f);
        opt.filters[f.substr(0, eq)] = f.substr(eq + 1);
    }

    const std::string checkpoint =
        args.checkpoint.empty() ? args.out_dir + "/checkpoint.log" : args.checkpoint;
    fs::create_directories(args.out_dir);

    const auto result = acquire::download_all(provider, region, args.out_dir, checkpoint, opt);
    log_info("download", std::to_string(result.records.size()) + " images downloaded, " +
                             std::to_string(result.failed_units.size()) + " failures");
    // Per-unit failures are recorded and tolerated; a run that produced
    // nothing at all is a failure.
    if (result.records.empty() && !result.failed_units.empty()) {
        throw std::runtime_error("download produced no images (" +
                                 std::to_string(result.failed_units.size()) +
                                 " failed units; see errors.log)");
    }
    return 0;
}

// ---- metadata ----

struct MetadataArgs {
    std::string images_csv;
    std::string network;
    std::string out_dir = "out";
    int resolution = 9;
    double buffer_m = 50.0;
    double snap_max_m = 500.0;
    std::string aggregate = "hex";  // hex | street | both | none
    bool civil_twilight = false;
};

int run_metadata(const MetadataArgs& args) {
    if (args.images_csv.empty()) throw UsageError("--images is required");
    if (args.resolution < 0 || args.resolution > 15) {
        throw UsageError("--resolution must be in [0, 15]");
    }

    const auto records = read_image_csv(args.images_csv);
    std::vector<geo::StreetSegment> network;
    if (!args.network.empty()) network = geojson::read_network_file(args.network);
    log_info("metadata", "enriching " + std::to_string(records.size()) + " records (" +
                             std::to_string(network.size()) + " street segments)");

    metadata::EnrichOptions opt;
    opt.h3_resolution = args.resolution;
    opt.max_snap_distance_m = args.snap_max_m;
    opt.civil_twilight = args.civil_twilight;
    const auto enriched = metadata::enrich(records, network, opt);

    fs::create_directories(args.out_dir);
    atomic_output(args.out_dir + "/metadata.csv",
                  [&](const std::string& p) { metadata::write_enriched_csv(p, enriched); });

    metadata::AggregateOptions agg_opt;
    agg_opt.buffer_m = args.buffer_m;

    if (args.aggregate == "hex" || args.aggregate == "both") {
        const auto rows = metadata::aggregate_by_hex(enriched, agg_opt);
        atomic_output(args.out_dir + "/aggregate_hex.csv",
                      [&](const std::string& p) { metadata::write_aggregate_csv(p, rows); });
        std::vector<nlohmann::json> features;
        for (const auto& row : rows) {
            std::vector<geo::GeoPoint> ring;
            for (const auto& [lat, lon] :
                 h3::cell_to_boundary(std::stoull(row.unit_id, nullptr, 16))) {
                ring.emplace_back(lat, lon);
            }
            nlohmann::json props{{"h3_id", row.unit_id},
                                 {"count", row.count},
                                 {"coverage", row.coverage_pct}};
            features.push_back(geojson::polygon_feature(ring, props));
        }
        atomic_output(args.out_dir + "/aggregate_hex.geojson", [&](const std::string& p) {
            std::ofstream out(p);
            out << geojson::feature_collection(features).dump(2) << "\n";
        });
        log_info("metadata", std::to_string(rows.size()) + " hex cells aggregated");
    }
    if (args.aggregate == "street" || args.aggregate == "both") {
        if (network.empty()) throw UsageError("street aggregation requires --network");
        const auto rows = metadata::aggregate_by_street(enriched, network, agg_opt);
        atomic_output(args.out_dir + "/aggregate_street.csv",
                      [&](const std::string& p) { metadata::write_aggregate_csv(p, rows); });
        std::map<std::string, const geo::StreetSegment*> by_id;
        for (const auto& seg : network) by_id[seg.id] = &seg;
        std::vector<nlohmann::json> features;
        for (const auto& row : rows) {
            const auto it = by_id.find(row.unit_id);
            if (it == by_id.end()) continue;
            features.push_back(geojson::line_feature(
                it->second->polyline, {{"segment_id", row.unit_id},
                                       {"count", row.count},
                                       {"coverage", row.coverage_pct}}));
        }
        atomic_output(args.out_dir + "/aggregate_street.geojson", [&](const std::string& p) {
            std::ofstream out(p);
            out << geojson::feature_collection(features).dump(2) << "\n";
        });
        log_info("metadata", std::to_string(rows.size()) + " street segments aggregated");
    }
    return 0;
}

// ---- transform ----

struct TransformArgs {
    std::string style = "perspective";  // fisheye | perspective | pointcloud
    std::string input;
    std::string input_dir;
    std::string out;
    std::string out_dir;
    int workers = 4;
    std::string projection = "equidistant";
    int size = 512;
    double theta_max = 90.0;
    bool downward = false;
    double fov = 90.0;
    double yaw = 0.0;
    double pitch = 0.0;
    int width = 640;
    int height = 480;
    std::string depth;
    int stride = 1;
    double max_range = 50.0;
    double max_depth = 1e9;
};

int run_transform_one(const TransformArgs& args);

int run_transform(const TransformArgs& args) {
    if (!args.input_dir.empty()) {
        if (args.out_dir.empty()) throw UsageError("--input-dir requires --out-dir");
        std::vector<std::string> inputs;
        for (const auto& entry : fs::directory_iterator(args.input_dir)) {
            const std::string p = entry.path().string();
            if (img::has_suffix(p, ".jpg") || img::has_suffix(p, ".jpeg") ||
                img::has_suffix(p, ".png")) {
                inputs.push_back(p);
            }
        }
        std::sort(inputs.begin(), inputs.end());
        if (inputs.empty()) throw UsageError("no images in " + args.input_dir);
        fs::create_directories(args.out_dir);

        const std::string ext = args.style == "pointcloud" ? ".ply"
                                : args.style == "fisheye"  ? ".png"
                                                           : ".jpg";
        std::atomic<size_t> done{0};
        std::atomic<size_t> skipped{0};
        acquire::detail::parallel_for(inputs.size(), args.workers, [&](size_t i) {
            TransformArgs one = args;
            one.input_dir.clear();
            one.input = inputs[i];
            one.out = (fs::path(args.out_dir) / fs::path(inputs[i]).stem()).string() + ext;
            try {
                run_transform_one(one);
                ++done;
            } catch (const std::exception& e) {
                // Mixed directories are normal; skip what does not transform.
                log_info("transform", "skipping " + inputs[i] + ": " + e.what());
                ++skipped;
            }
        });
        if (done == 0) throw std::runtime_error("no image in the batch could be transformed");
        log_info("transform", std::to_string(done.load()) + " images (" +
                                  std::to_string(skipped.load()) + " skipped) -> " +
                                  args.out_dir);
        return 0;
    }
    return run_transform_one(args);
}

int run_transform_one(const TransformArgs& args) {
    if (args.input.empty() || args.out.empty()) {
        throw UsageError("--input and --out are required");
    }

    if (args.style == "fisheye") {
        const img::Image pano = img::load(args.input);
        transform::FisheyeSpec spec;
        spec.projection = transform::fisheye_projection_from_name(args.projection);
        spec.size = args.size;
        spec.theta_max_deg = args.theta_max;
        spec.downward = args.downward;
        const img::Image out = transform::to_fisheye(pano, spec);
        atomic_output(args.out, [&](const std::string& p) { img::save(p, out); });
    } else if (args.style == "perspective") {
        const img::Image pano = img::load(args.input);
        transform::PerspectiveSpec spec;
        spec.fov_deg = args.fov;
        spec.yaw_deg = args.yaw;
        spec.pitch_deg = args.pitch;
        spec.width = args.width;
        spec.height = args.height;
        const img::Image out = transform::to_perspective(pano, spec);
        atomic_output(args.out, [&](const std::string& p) { img::save(p, out); });
    } else if (args.style == "pointcloud") {
        if (args.depth.empty()) throw UsageError("--depth is required for pointcloud");
        const img::Image pano = img::load(args.input);
        const transform::DepthMap depth = transform::load_depth(args.depth);
        transform::PointCloudOptions opt;
        opt.stride = args.stride;
        opt.max_range_m = args.max_range;
        opt.max_depth_m = args.max_depth;
        const auto cloud = transform::to_pointcloud(pano, depth, opt);
        atomic_output(args.out, [&](const std::string& p) { transform::write_ply(cloud, p); });
        log_info("transform", std::to_string(cloud.size()) + " points");
    } else {
        throw UsageError("unknown --style '" + args.style +
                         "' (fisheye | perspective | pointcloud)");
    }
    log_info("transform", args.style + " -> " + args.out);
    return 0;
}

// ---- features ----

struct FeaturesArgs {
    std::string meta_csv;
    std::string images_root;
    std::string attributes;
    std::string out = "features.csv";
    std::string append_meta;  // metadata CSV to receive the feature columns
    std::string embeddings;
    std::string pca_out;
    std::string knn_query_id;
    int knn_k = 5;
    std::string knn_out;
    int workers = 4;
};

int run_features(const FeaturesArgs& args) {
    if (args.meta_csv.empty() && args.embeddings.empty()) {
        throw UsageError("--meta or --embeddings is required");
    }

    if (!args.meta_csv.empty()) {
        const auto records = read_image_csv(args.meta_csv);
        const fs::path root = args.images_root.empty()
                                  ? fs::path(args.meta_csv).parent_path()
                                  : fs::path(args.images_root);

        std::optional<analysis::AttributeTable> attrs;
        if (!args.attributes.empty()) {
            attrs = analysis::AttributeTable::from_file(args.attributes);
        }

        // Segment-ratio columns feed the Shannon complexity index.
        std::vector<std::string> seg_columns;
        if (attrs) {
            for (const auto& col : attrs->columns()) {
                if (col.rfind("seg_", 0) == 0) seg_columns.push_back(col);
            }
        }

        csv::Table out;
        out.header = {"image_id",  "blur_score",     "canny_edge_density",
                      "blob_count", "hsl_hue",       "hsl_saturation",
                      "hsl_lightness", "shannon_index"};
        out.rows.resize(records.size());

        std::atomic<size_t> done{0};
        acquire::detail::parallel_for(records.size(), args.workers, [&](size_t i) {
            const auto& r = records[i];
            std::vector<std::string> row(out.header.size());
            row[0] = r.image_id;

            const fs::path img_path = root / r.local_path;
            if (!r.local_path.empty() && fs::exists(img_path)) {
                const img::Image image = img::load(img_path.string());
                const img::GrayF gray = img::to_gray(image);

                char buf[32];
                std::snprintf(buf, sizeof buf, "%.6f", features::blur_score(gray));
                row[1] = buf;

                const img::GrayF edges = features::canny(gray);
                int64_t edge_px = 0;
                for (const float v : edges.v) edge_px += v > 0.f;
                std::snprintf(buf, sizeof buf, "%.6f",
                              static_cast<double>(edge_px) / static_cast<double>(edges.v.size()));
                row[2] = buf;

                row[3] = std::to_string(features::blob_detect(gray, 16).size());

                const auto hsl = features::hsl_stats(image);
                std::snprintf(buf, sizeof buf, "%.4f", hsl.mean_hue_deg);
                row[4] = buf;
                std::snprintf(buf, sizeof buf, "%.6f", hsl.mean_saturation);
                row[5] = buf;
                std::snprintf(buf, sizeof buf, "%.6f", hsl.mean_lightness);
                row[6] = buf;
            }

            if (attrs && !seg_columns.empty()) {
                std::map<std::string, double> ratios;
                bool any = false;
                for (const auto& col : seg_columns) {
                    if (const auto v = attrs->get_number(r.image_id, col)) {
                        ratios[col] = *v;
                        if (*v > 0.0) any = true;
                    }
                }
                if (any) {
                    char buf[32];
                    std::snprintf(buf, sizeof buf, "%.6f", features::shannon_index(ratios));
                    row[7] = buf;
                }
            }
            out.rows[i] = std::move(row);
            ++done;
        });

        atomic_output(args.out, [&](const std::string& p) { csv::write_file(p, out); });
        log_info("features", std::to_string(done.load()) + " images scored -> " + args.out);

        if (!args.append_meta.empty()) {
            // Append the feature columns to an existing metadata CSV in place.
            csv::Table meta = csv::read_file(args.append_meta);
            const int id_col = meta.require_column("image_id");
            std::map<std::string, const std::vector<std::string>*> by_id;
            for (const auto& row : out.rows) by_id[row[0]] = &row;
            for (size_t c = 1; c < out.header.size(); ++c) meta.header.push_back(out.header[c]);
            for (auto& row : meta.rows) {
                const auto it = by_id.find(row[id_col]);
                for (size_t c = 1; c < out.header.size(); ++c) {
                    row.push_back(it != by_id.end() ? (*it->second)[c] : "");
                }
            }
            atomic_output(args.append_meta,
                          [&](const std::string& p) { csv::write_file(p, meta); });
            log_info("features", "feature columns appended to " + args.append_meta);
        }
    }

    if (!args.embeddings.empty()) {
        const auto corpus = features::read_embeddings_csv(args.embeddings);
        if (!args.pca_out.empty()) {
            const auto pca = features::pca_2d(corpus);
            if (pca.rank_deficient) {
                log_info("features", "warning: rank-deficient corpus, second axis zeroed");
            }
            csv::Table t;
            t.header = {"image_id", "pc1", "pc2"};
            for (size_t i = 0; i < corpus.size(); ++i) {
                char a[32], b[32];
                std::snprintf(a, sizeof a, "%.9g", pca.coords[i][0]);
                std::snprintf(b, sizeof b, "%.9g", pca.coords[i][1]);
                t.rows.push_back({corpus[i].id, a, b});
            }
            atomic_output(args.pca_out, [&](const std::string& p) { csv::write_file(p, t); });
            log_info("features", "pca projection -> " + args.pca_out);
        }
        if (!args.knn_query_id.empty()) {
            const auto query = std::find_if(corpus.begin(), corpus.end(), [&](const auto& e) {
                return e.id == args.knn_query_id;
            });
            if (query == corpus.end()) {
                throw UsageError("knn query id not in corpus: " + args.knn_query_id);
            }
            const auto neighbors = features::knn_query(
                query->values, corpus, static_cast<size_t>(args.knn_k));
            csv::Table t;
            t.header = {"rank", "image_id", "distance"};
            for (size_t i = 0; i < neighbors.size(); ++i) {
                char d[32];
                std::snprintf(d, sizeof d, "%.9g", neighbors[i].distance);
                t.rows.push_back({std::to_string(i), neighbors[i].id, d});
            }
            const std::string out = args.knn_out.empty() ? "knn.csv" : args.knn_out;
            atomic_output(out, [&](const std::string& p) { csv::write_file(p, t); });
            log_info("features", "knn -> " + out);
        }
    }
    return 0;
}

// ---- filter ----

analysis::SuitabilityThresholds thresholds_from_config(const config::Config& cfg,
                                                       const std::string& prefix) {
    analysis::SuitabilityThresholds t;
    t.complexity_min = cfg.get_double(prefix + "complexity_min", t.complexity_min);
    t.blur_threshold = cfg.get_double(prefix + "blur_threshold", t.blur_threshold);
    t.blur_remove_low_variance =
        cfg.get_bool(prefix + "blur_remove_low_variance", t.blur_remove_low_variance);
    t.speed_max_kmh = cfg.get_double(prefix + "speed_max_kmh", t.speed_max_kmh);
    t.excluded_quality = cfg.get_string(prefix + "excluded_quality", t.excluded_quality);
    t.required_view_direction =
        cfg.get_string(prefix + "required_view_direction", t.required_view_direction);
    t.required_platform = cfg.get_string(prefix + "required_platform", t.required_platform);
    t.exclude_nighttime = cfg.get_bool(prefix + "exclude_nighttime", t.exclude_nighttime);
    t.na_is_pass = cfg.get_bool(prefix + "na_is_pass", t.na_is_pass);
    t.use_metadata_lighting =
        cfg.get_bool(prefix + "use_metadata_lighting", t.use_metadata_lighting);
    return t;
}

/// Joins model attributes with the computed features and metadata speed into
/// one attribute table keyed by image id.
analysis::AttributeTable build_joined_table(
    const std::vector<metadata::EnrichedRecord>& enriched,
    const analysis::AttributeTable* attrs, const csv::Table* features_csv) {
    csv::Table joined;
    joined.header = {"image_id", "speed_kmh", "daytime_nighttime", "blur_score",
                     "shannon_index"};
    std::vector<std::string> attr_cols;
    if (attrs) {
        for (const auto& col : attrs->columns()) {
            if (col == "image_id") continue;
            attr_cols.push_back(col);
            joined.header.push_back(col);
        }
    }

    std::map<std::string, std::pair<std::string, std::string>> feat_by_id;
    if (features_csv) {
        const int id_col = features_csv->require_column("image_id");
        const int blur_col = features_csv->require_column("blur_score");
        const int shannon_col = features_csv->require_column("shannon_index");
        for (const auto& row : features_csv->rows) {
            feat_by_id[row[id_col]] = {row[blur_col], row[shannon_col]};
        }
    }

    for (const auto& e : enriched) {
        std::vector<std::string> row;
        row.push_back(e.record.image_id);
        if (e.speed_kmh) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.4f", *e.speed_kmh);
            row.push_back(buf);
        } else {
            row.push_back("");
        }
        row.push_back(e.daytime ? "day" : "night");
        const auto feat = feat_by_id.find(e.record.image_id);
        row.push_back(feat != feat_by_id.end() ? feat->second.first : "");
        row.push_back(feat != feat_by_id.end() ? feat->second.second : "");
        for (const auto& col : attr_cols) {
            const auto v = attrs->get(e.record.image_id, col);
            row.push_back(v.value_or(""));
        }
        joined.rows.push_back(std::move(row));
    }
    return analysis::AttributeTable(std::move(joined));
}

struct FilterArgs {
    std::string meta_csv;
    std::string features_csv;
    std::string attributes;
    std::string out = "suitability.csv";
    std::string config_path;
};

void write_suitability_csv(const std::string& path,
                           const std::vector<analysis::SuitabilityReport>& reports) {
    csv::Table t;
    t.header = {"image_id",  "quality",  "sharpness",      "complexity", "speed",
                "lighting",  "view_direction", "platform", "is_suitable"};
    for (const auto& rep : reports) {
        std::vector<std::string> row{rep.image_id};
        for (const auto& [name, verdict] : rep.criteria()) {
            row.push_back(analysis::verdict_name(verdict));
        }
        row.push_back(rep.is_suitable ? "true" : "false");
        t.rows.push_back(std::move(row));
    }
    csv::write_file(path, t);
}

int run_filter(const FilterArgs& args) {
    if (args.meta_csv.empty()) throw UsageError("--meta is required");

    analysis::SuitabilityThresholds thresholds;
    if (!args.config_path.empty()) {
        thresholds = thresholds_from_config(config::Config::from_file(args.config_path),
                                            "filter.");
    }

    const auto enriched = metadata::read_enriched_csv(args.meta_csv);
    std::optional<analysis::AttributeTable> attrs;
    if (!args.attributes.empty()) attrs = analysis::AttributeTable::from_file(args.attributes);
    std::optional<csv::Table> feats;
    if (!args.features_csv.empty()) feats = csv::read_file(args.features_csv);

    const auto joined = build_joined_table(enriched, attrs ? &*attrs : nullptr,
                                           feats ? &*feats : nullptr);

    std::vector<analysis::SuitabilityReport> reports;
    size_t suitable = 0;
    for (const auto& e : enriched) {
        reports.push_back(
            analysis::evaluate_suitability(e.record.image_id, joined, thresholds));
        suitable += reports.back().is_suitable;
    }
    atomic_output(args.out,
                  [&](const std::string& p) { write_suitability_csv(p, reports); });
    log_info("filter", std::to_string(suitable) + "/" + std::to_string(reports.size()) +
                           " images suitable -> " + args.out);
    return 0;
}

// ---- cluster ----

struct ClusterArgs {
    std::string meta_csv;
    std::string attributes;
    std::string suitability;
    std::string out_dir = "out";
    int k = 5;
    uint64_t seed = 42;
    std::vector<std::string> indicators;
    int elbow_min = 0;
    int elbow_max = 0;
    int restarts = 10;
};

const std::vector<std::string>& default_indicators() {
    static const std::vector<std::string> kDefault = {
        // Scene classification probabilities.
        "p365_highway", "p365_residential_neighborhood", "p365_construction_site",
        "p365_tree_farm", "p365_forest_path", "p365_forest_road",
        // Perception scores.
        "pp_beautiful", "pp_boring", "pp_depressing", "pp_lively", "pp_safe", "pp_wealthy",
        // Segment pixel ratios.
        "seg_sky", "seg_building", "seg_vegetation", "seg_road", "seg_sidewalk"};
    return kDefault;
}

int run_cluster(const ClusterArgs& args) {
    if (args.meta_csv.empty() || args.attributes.empty()) {
        throw UsageError("--meta and --attributes are required");
    }

    const auto enriched = metadata::read_enriched_csv(args.meta_csv);
    const auto attrs = analysis::AttributeTable::from_file(args.attributes);

    std::unordered_map<std::string, bool> suitable;
    if (!args.suitability.empty()) {
        const csv::Table t = csv::read_file(args.suitability);
        const int id_col = t.require_column("image_id");
        const int ok_col = t.require_column("is_suitable");
        for (const auto& row : t.rows) suitable[row[id_col]] = row[ok_col] == "true";
    } else {
        for (const auto& e : enriched) suitable[e.record.image_id] = true;
    }

    const auto& indicators =
        args.indicators.empty() ? default_indicators() : args.indicators;
    std::vector<std::string> present;
    for (const auto& col : indicators) {
        if (attrs.has_column(col)) present.push_back(col);
    }
    if (present.empty()) {
        throw UsageError("none of the indicator columns exist in the attribute table");
    }

    const auto matrix = analysis::aggregate_features(enriched, attrs, present, suitable);
    if (matrix.rows() < static_cast<size_t>(args.k)) {
        throw std::runtime_error("only " + std::to_string(matrix.rows()) +
                                 " cells with suitable images; k=" + std::to_string(args.k) +
                                 " is too large");
    }
    log_info("cluster", std::to_string(matrix.rows()) + " cells x " +
                            std::to_string(matrix.cols()) + " indicators");

    const auto standardized = analysis::zscore(matrix);
    const auto model = analysis::kmeans_best(standardized, static_cast<size_t>(args.k),
                                             args.seed, args.restarts);
    log_info("cluster", "k=" + std::to_string(args.k) +
                            " inertia=" + std::to_string(model.inertia));

    fs::create_directories(args.out_dir);

    csv::Table t;
    t.header = {"h3_id", "cluster"};
    for (const auto& col : present) t.header.push_back(col);
    for (size_t r = 0; r < matrix.rows(); ++r) {
        std::vector<std::string> row{matrix.row_ids[r],
                                     std::to_string(model.assignment[r])};
        for (size_t c = 0; c < matrix.cols(); ++c) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.6f", matrix.at(r, c));
            row.push_back(buf);
        }
        t.rows.push_back(std::move(row));
    }
    atomic_output(args.out_dir + "/clusters.csv",
                  [&](const std::string& p) { csv::write_file(p, t); });

    std::vector<nlohmann::json> features;
    for (size_t r = 0; r < matrix.rows(); ++r) {
        std::vector<geo::GeoPoint> ring;
        for (const auto& [lat, lon] :
             h3::cell_to_boundary(std::stoull(matrix.row_ids[r], nullptr, 16))) {
            ring.emplace_back(lat, lon);
        }
        features.push_back(geojson::polygon_feature(
            ring, {{"h3_id", matrix.row_ids[r]}, {"cluster", model.assignment[r]}}));
    }
    atomic_output(args.out_dir + "/clusters.geojson", [&](const std::string& p) {
        std::ofstream out(p);
        out << geojson::feature_collection(features).dump(2) << "\n";
    });

    if (args.elbow_min > 0 && args.elbow_max >= args.elbow_min) {
        const auto curve = analysis::elbow_curve(
            standardized, static_cast<size_t>(args.elbow_min),
            static_cast<size_t>(std::min<size_t>(args.elbow_max, standardized.rows())),
            args.seed);
        csv::Table e;
        e.header = {"k", "inertia"};
        for (const auto& [k, inertia] : curve) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.9g", inertia);
            e.rows.push_back({std::to_string(k), buf});
        }
        atomic_output(args.out_dir + "/elbow.csv",
                      [&](const std::string& p) { csv::write_file(p, e); });
    }
    return 0;
}

// ---- viz ----

struct VizArgs {
    std::string kind;
    std::string data;
    std::string column;
    std::string meta_csv;
    std::string network;
    std::string variable;
    std::string out;
    std::string images_root;
    std::string sort_column;
    int bins = 20;
    double bandwidth = 0.0;
    int resolution = 9;
    int columns = 4;
    int classes = 0;  // >0 replaces map values with quantile class indices
    uint64_t seed = 0;
};

// Continuous values -> quantile class indices 0..n-1 (equal-count classes).
void apply_quantile_classes(std::map<std::string, double>& values, int n) {
    if (n <= 0 || values.empty()) return;
    std::vector<double> sorted;
    sorted.reserve(values.size());
    for (const auto& [id, v] : values) sorted.push_back(v);
    std::sort(sorted.begin(), sorted.end());
    for (auto& [id, v] : values) {
        const auto rank = std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin();
        int cls = static_cast<int>(rank * n / sorted.size());
        v = std::min(cls, n - 1);
    }
}

std::vector<double> column_values(const csv::Table& t, const std::string& column) {
    const int col = t.column(column);
    if (col < 0) throw UsageError("column not found in data: " + column);
    std::vector<double> values;
    for (const auto& row : t.rows) {
        if (!row[col].empty()) values.push_back(parse_double(row[col], column.c_str()));
    }
    if (values.empty()) throw std::runtime_error("no numeric values in column " + column);
    return values;
}

int run_viz(const VizArgs& args) {
    if (args.out.empty()) throw UsageError("--out is required");

    if (args.kind == "hist" || args.kind == "kde") {
        if (args.data.empty() || args.column.empty()) {
            throw UsageError("--data and --column are required for " + args.kind);
        }
        const csv::Table t = csv::read_file(args.data);
        const auto values = column_values(t, args.column);
        if (args.kind == "hist") {
            atomic_output(args.out, [&](const std::string& p) {
                viz::render_histogram(values, args.bins, p,
                                      sidecar_path(args.out, ".data.csv"), args.column);
            });
        } else {
            atomic_output(args.out, [&](const std::string& p) {
                viz::render_kde(values, args.bandwidth, p,
                                sidecar_path(args.out, ".data.csv"), args.column);
            });
        }
        log_info("viz", args.kind + " -> " + args.out);
        return 0;
    }

    if (args.kind == "map_point" || args.kind == "map_hex" || args.kind == "map_line") {
        if (args.meta_csv.empty()) throw UsageError("--meta is required for maps");
        const auto enriched = metadata::read_enriched_csv(args.meta_csv);
        const csv::Table raw = csv::read_file(args.meta_csv);

        viz::MapSpec spec;
        spec.variable = args.variable;
        spec.title = args.variable.empty() ? "count" : args.variable;

        // Per-image variable values (empty when plotting counts).
        std::map<std::string, double> by_id;
        if (!args.variable.empty()) {
            const int id_col = raw.require_column("image_id");
            const int val_col = raw.column(args.variable);
            if (val_col < 0) throw UsageError("variable column not found: " + args.variable);
            for (const auto& row : raw.rows) {
                if (!row[val_col].empty()) {
                    by_id[row[id_col]] = parse_double(row[val_col], args.variable.c_str());
                }
            }
        }

        const std::string geo_out = sidecar_path(args.out, ".geojson");
        if (args.kind == "map_point") {
            std::vector<ImageRecord> records;
            for (const auto& e : enriched) records.push_back(e.record);
            spec.kind = viz::MapKind::kPoint;
            atomic_output(args.out, [&](const std::string& p) {
                viz::render_point_map(records, by_id, spec, p, geo_out);
            });
        } else if (args.kind == "map_hex") {
            // Default to counts; with a variable, take the per-cell mean.
            std::map<std::string, std::pair<double, int64_t>> acc;
            for (const auto& e : enriched) {
                const uint64_t cell =
                    args.resolution == e.h3_id.resolution
                        ? e.h3_id.value
                        : geo::hex_index(e.record.location, args.resolution).value;
                char hex[24];
                std::snprintf(hex, sizeof hex, "%llx", static_cast<unsigned long long>(cell));
                auto& slot = acc[hex];
                if (args.variable.empty()) {
                    slot.first += 1.0;
                    slot.second = 1;
                } else if (const auto it = by_id.find(e.record.image_id); it != by_id.end()) {
                    slot.first += it->second;
                    ++slot.second;
                }
            }
            std::map<std::string, double> cells;
            for (const auto& [hex, sum_count] : acc) {
                if (sum_count.second > 0) cells[hex] = sum_count.first / sum_count.second;
            }
            apply_quantile_classes(cells, args.classes);
            spec.kind = viz::MapKind::kHex;
            atomic_output(args.out, [&](const std::string& p) {
                viz::render_hex_map(cells, spec, p, geo_out);
            });
        } else {
            if (args.network.empty()) throw UsageError("--network is required for map_line");
            const auto network = geojson::read_network_file(args.network);
            std::map<std::string, std::pair<double, int64_t>> acc;
            for (const auto& e : enriched) {
                if (!e.nearest_segment_id) continue;
                auto& slot = acc[*e.nearest_segment_id];
                if (args.variable.empty()) {
                    slot.first += 1.0;
                    slot.second = 1;
                } else if (const auto it = by_id.find(e.record.image_id); it != by_id.end()) {
                    slot.first += it->second;
                    ++slot.second;
                }
            }
            std::map<std::string, double> segs;
            for (const auto& [id, sum_count] : acc) {
                if (sum_count.second > 0) segs[id] = sum_count.first / sum_count.second;
            }
            apply_quantile_classes(segs, args.classes);
            spec.kind = viz::MapKind::kLine;
            atomic_output(args.out, [&](const std::string& p) {
                viz::render_line_map(network, segs, spec, p, geo_out);
            });
        }
        log_info("viz", args.kind + " -> " + args.out);
        return 0;
    }

    if (args.kind == "image_grid") {
        if (args.meta_csv.empty() && args.images_root.empty()) {
            throw UsageError("--meta or --images-dir is required for image_grid");
        }
        std::vector<std::string> paths;
        std::map<std::string, double> scores;
        if (!args.meta_csv.empty()) {
            const auto records = read_image_csv(args.meta_csv);
            const fs::path root = fs::path(args.meta_csv).parent_path();
            for (const auto& r : records) {
                if (!r.local_path.empty()) paths.push_back((root / r.local_path).string());
            }
            if (!args.sort_column.empty() && !args.data.empty()) {
                const csv::Table t = csv::read_file(args.data);
                const int id_col = t.require_column("image_id");
                const int val_col = t.column(args.sort_column);
                if (val_col < 0) throw UsageError("sort column not found: " + args.sort_column);
                std::map<std::string, double> by_id;
                for (const auto& row : t.rows) {
                    if (!row[val_col].empty()) by_id[row[id_col]] = std::stod(row[val_col]);
                }
                for (const auto& r : records) {
                    const auto it = by_id.find(r.image_id);
                    if (it != by_id.end() && !r.local_path.empty()) {
                        scores[(root / r.local_path).string()] = it->second;
                    }
                }
            }
        } else {
            for (const auto& entry : fs::directory_iterator(args.images_root)) {
                const std::string p = entry.path().string();
                if (img::has_suffix(p, ".jpg") || img::has_suffix(p, ".jpeg") ||
                    img::has_suffix(p, ".png")) {
                    paths.push_back(p);
                }
            }
            std::sort(paths.begin(), paths.end());
        }

        viz::ImageGridSpec spec;
        spec.columns = args.columns;
        spec.seed = args.seed;
        const auto grid =
            viz::image_grid(paths, spec, scores.empty() ? nullptr : &scores);
        for (const auto& skipped : grid.skipped) {
            log_info("viz", "warning: skipped unreadable image " + skipped);
        }
        atomic_output(args.out,
                      [&](const std::string& p) { img::save(p, grid.composite); });
        log_info("viz", "image grid (" + std::to_string(grid.order.size()) + " tiles) -> " +
                            args.out);
        return 0;
    }

    throw UsageError("unknown --kind '" + args.kind +
                     "' (hist | kde | map_point | map_hex | map_line | image_grid)");
}

// ---- pipeline ----

const std::set<std::string>& pipeline_config_keys() {
    static const std::set<std::string> kKeys = {
        "provider.name", "provider.base_url", "provider.api_key_env",
        "region.value", "region.geocoder_url",
        "download.workers", "download.checkpoint", "download.zoom",
        "download.requests_per_second", "download.image_size", "download.backoff_base_ms",
        "metadata.network", "metadata.resolution", "metadata.buffer_m",
        "metadata.snap_max_m", "metadata.aggregate",
        "features.attributes", "features.embeddings",
        "filter.complexity_min", "filter.blur_threshold", "filter.blur_remove_low_variance",
        "filter.speed_max_kmh", "filter.excluded_quality", "filter.required_view_direction",
        "filter.required_platform", "filter.exclude_nighttime", "filter.na_is_pass", "filter.use_metadata_lighting",
        "cluster.k", "cluster.seed", "cluster.indicators", "cluster.restarts",
        "cluster.elbow_min", "cluster.elbow_max",
        "transform.fov", "transform.width", "transform.height",
        "transform.fisheye_projection", "transform.fisheye_size",
        "transform.depth_dir", "transform.stride", "transform.max_range",
        "viz.resolution", "viz.variable", "viz.grid_columns", "viz.grid_seed",
        "output.dir",
    };
    return kKeys;
}

int run_pipeline(const std::string& config_path) {
    config::Config cfg;
    std::string out_dir;
    fs::path base;
    try {
        cfg = config::Config::from_file(config_path);
        cfg.reject_unknown_keys(pipeline_config_keys());
        out_dir = cfg.get_string("output.dir", "out");
        base = fs::path(config_path).parent_path();
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }

    auto resolve = [&](const std::string& p) {
        if (p.empty()) return p;
        const fs::path path(p);
        return path.is_absolute() ? p : (base / path).string();
    };

    fs::create_directories(out_dir);

    // 1. download
    DownloadArgs dl;
    dl.region = cfg.require_string("region.value");
    if (fs::exists(resolve(dl.region))) dl.region = resolve(dl.region);
    dl.provider = cfg.get_string("provider.name", "http");
    dl.base_url = cfg.require_string("provider.base_url");
    dl.geocoder_url = cfg.get_string("region.geocoder_url", dl.base_url);
    dl.out_dir = out_dir + "/download";
    dl.checkpoint = resolve(cfg.get_string("download.checkpoint", ""));
    if (dl.checkpoint.empty()) dl.checkpoint = out_dir + "/download/checkpoint.log";
    dl.workers = static_cast<int>(cfg.get_int("download.workers", 4));
    dl.zoom = static_cast<int>(cfg.get_int("download.zoom", 14));
    dl.image_size = static_cast<int>(cfg.get_int("download.image_size", 1024));
    dl.rps = cfg.get_double("download.requests_per_second", 10.0);
    dl.backoff_base_ms = static_cast<int>(cfg.get_int("download.backoff_base_ms", 1000));
    run_download(dl);

    // 2. metadata
    MetadataArgs md;
    md.images_csv = out_dir + "/download/images.csv";
    md.network = resolve(cfg.get_string("metadata.network", ""));
    md.out_dir = out_dir;
    md.resolution = static_cast<int>(cfg.get_int("metadata.resolution", 9));
    md.buffer_m = cfg.get_double("metadata.buffer_m", 50.0);
    md.snap_max_m = cfg.get_double("metadata.snap_max_m", 500.0);
    md.aggregate = cfg.get_string("metadata.aggregate", "hex");
    run_metadata(md);

    // 3. features
    FeaturesArgs ft;
    ft.meta_csv = out_dir + "/download/images.csv";
    ft.images_root = out_dir + "/download";
    ft.attributes = resolve(cfg.get_string("features.attributes", ""));
    ft.out = out_dir + "/features.csv";
    ft.workers = dl.workers;
    ft.embeddings = resolve(cfg.get_string("features.embeddings", ""));
    if (!ft.embeddings.empty()) ft.pca_out = out_dir + "/pca.csv";
    run_features(ft);

    // 4. filter
    FilterArgs fl;
    fl.meta_csv = out_dir + "/metadata.csv";
    fl.features_csv = out_dir + "/features.csv";
    fl.attributes = ft.attributes;
    fl.out = out_dir + "/suitability.csv";
    fl.config_path = config_path;
    run_filter(fl);

    // 5. cluster
    ClusterArgs cl;
    cl.meta_csv = out_dir + "/metadata.csv";
    cl.attributes = ft.attributes;
    cl.suitability = out_dir + "/suitability.csv";
    cl.out_dir = out_dir;
    cl.k = static_cast<int>(cfg.get_int("cluster.k", 5));
    cl.seed = static_cast<uint64_t>(cfg.get_int("cluster.seed", 42));
    cl.indicators = cfg.get_string_array("cluster.indicators");
    cl.restarts = static_cast<int>(cfg.get_int("cluster.restarts", 10));
    cl.elbow_min = static_cast<int>(cfg.get_int("cluster.elbow_min", 0));
    cl.elbow_max = static_cast<int>(cfg.get_int("cluster.elbow_max", 0));
    run_cluster(cl);

    // 6. transform demos: perspective view and point cloud of the first
    // panorama that has a depth fixture.
    const auto records = read_image_csv(out_dir + "/download/images.csv");
    const std::string depth_dir = resolve(cfg.get_string("transform.depth_dir", ""));
    const ImageRecord* pano = nullptr;
    for (const auto& r : records) {
        if (!r.is_pano || r.local_path.empty()) continue;
        if (!depth_dir.empty() &&
            !fs::exists(fs::path(depth_dir) / (r.image_id + ".depth.bin"))) {
            continue;
        }
        pano = &r;
        break;
    }
    if (pano) {
        TransformArgs tr;
        tr.input = out_dir + "/download/" + pano->local_path;
        tr.style = "perspective";
        tr.fov = cfg.get_double("transform.fov", 90.0);
        tr.width = static_cast<int>(cfg.get_int("transform.width", 640));
        tr.height = static_cast<int>(cfg.get_int("transform.height", 480));
        tr.out = out_dir + "/perspective.jpg";
        run_transform(tr);

        TransformArgs fe;
        fe.input = tr.input;
        fe.style = "fisheye";
        fe.projection = cfg.get_string("transform.fisheye_projection", "equidistant");
        fe.size = static_cast<int>(cfg.get_int("transform.fisheye_size", 256));
        fe.out = out_dir + "/fisheye.png";
        run_transform(fe);

        if (!depth_dir.empty()) {
            TransformArgs pc;
            pc.input = tr.input;
            pc.style = "pointcloud";
            pc.depth = (fs::path(depth_dir) / (pano->image_id + ".depth.bin")).string();
            pc.stride = static_cast<int>(cfg.get_int("transform.stride", 2));
            pc.max_range = cfg.get_double("transform.max_range", 50.0);
            pc.out = out_dir + "/cloud.ply";
            run_transform(pc);
        }
    } else {
        log_info("pipeline", "no panorama with depth fixture; transform step skipped");
    }

    // 7. viz: hex map (count by default) plus a histogram of blur scores and
    // an image grid sample.
    VizArgs vz;
    vz.kind = "map_hex";
    vz.meta_csv = out_dir + "/metadata.csv";
    vz.variable = cfg.get_string("viz.variable", "");
    vz.resolution = static_cast<int>(cfg.get_int("viz.resolution", md.resolution));
    vz.out = out_dir + "/map.svg";
    run_viz(vz);

    VizArgs hist;
    hist.kind = "hist";
    hist.data = out_dir + "/features.csv";
    hist.column = "blur_score";
    hist.bins = 16;
    hist.out = out_dir + "/blur_hist.svg";
    run_viz(hist);

    VizArgs grid;
    grid.kind = "image_grid";
    grid.meta_csv = out_dir + "/download/images.csv";
    grid.columns = static_cast<int>(cfg.get_int("viz.grid_columns", 5));
    grid.seed = static_cast<uint64_t>(cfg.get_int("viz.grid_seed", 7));
    grid.out = out_dir + "/grid.png";
    run_viz(grid);

    log_info("pipeline", "complete -> " + out_dir);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"street view imagery pipeline toolkit"};
    app.require_subcommand(1);
    app.add_flag_callback("-q,--quiet", [] { g_verbosity = 0; }, "suppress progress output");
    app.add_flag_callback("-v,--verbose", [] { g_verbosity = 2; }, "verbose progress output");

    DownloadArgs dl;
    auto* dl_cmd = app.add_subcommand("download", "discover and fetch imagery");
    dl_cmd->add_option("--region", dl.region, "region: csv/geojson file, bbox, point or place")
        ->required();
    dl_cmd->add_option("--provider", dl.provider, "provider name (http, mock)");
    dl_cmd->add_option("--base-url", dl.base_url, "provider base URL")->required();
    dl_cmd->add_option("--geocoder-url", dl.geocoder_url, "geocoder base URL");
    dl_cmd->add_option("--out", dl.out_dir, "output directory");
    dl_cmd->add_option("--checkpoint", dl.checkpoint, "checkpoint log path");
    dl_cmd->add_option("--workers", dl.workers, "parallel workers")->check(CLI::Range(1, 256));
    dl_cmd->add_option("--zoom", dl.zoom, "discovery tile zoom");
    dl_cmd->add_option("--size", dl.image_size, "requested image size");
    dl_cmd->add_option("--rps", dl.rps, "request rate limit per second");
    dl_cmd->add_option("--backoff-ms", dl.backoff_base_ms, "retry backoff base (ms)");
    dl_cmd->add_option("--filter", dl.filters, "metadata filter key=value (repeatable)");

    MetadataArgs md;
    auto* md_cmd = app.add_subcommand("metadata", "compute image and aggregate indicators");
    md_cmd->add_option("--images", md.images_csv, "images.csv from download")->required();
    md_cmd->add_option("--network", md.network, "street network GeoJSON");
    md_cmd->add_option("--out", md.out_dir, "output directory");
    md_cmd->add_option("--resolution", md.resolution, "H3 resolution");
    md_cmd->add_option("--buffer", md.buffer_m, "coverage buffer in meters");
    md_cmd->add_option("--snap-max", md.snap_max_m, "max snap distance in meters");
    md_cmd->add_option("--aggregate", md.aggregate, "hex | street | both | none");
    md_cmd->add_flag("--civil-twilight", md.civil_twilight,
                     "day/night boundary at -6 degrees");

    TransformArgs tr;
    auto* tr_cmd = app.add_subcommand("transform", "reproject panoramas");
    tr_cmd->add_option("--style", tr.style, "fisheye | perspective | pointcloud")->required();
    tr_cmd->add_option("--input", tr.input, "input panorama");
    tr_cmd->add_option("--input-dir", tr.input_dir, "batch: directory of panoramas");
    tr_cmd->add_option("--out", tr.out, "output file");
    tr_cmd->add_option("--out-dir", tr.out_dir, "batch: output directory");
    tr_cmd->add_option("--workers", tr.workers, "batch workers");
    tr_cmd->add_option("--projection", tr.projection,
                       "orthographic | equisolid | equidistant | stereographic");
    tr_cmd->add_option("--size", tr.size, "fisheye output size");
    tr_cmd->add_option("--theta-max", tr.theta_max, "fisheye zenith limit (deg)");
    tr_cmd->add_flag("--downward", tr.downward, "ground-view fisheye");
    tr_cmd->add_option("--fov", tr.fov, "horizontal field of view (deg)");
    tr_cmd->add_option("--yaw", tr.yaw, "yaw (deg)");
    tr_cmd->add_option("--pitch", tr.pitch, "pitch (deg)");
    tr_cmd->add_option("--width", tr.width, "perspective width");
    tr_cmd->add_option("--height", tr.height, "perspective height");
    tr_cmd->add_option("--depth", tr.depth, "depth map (.png relative or .bin)");
    tr_cmd->add_option("--stride", tr.stride, "point cloud pixel stride");
    tr_cmd->add_option("--max-range", tr.max_range, "relative depth max range (m)");
    tr_cmd->add_option("--max-depth", tr.max_depth, "drop points beyond depth (m)");

    FeaturesArgs ft;
    auto* ft_cmd = app.add_subcommand("features", "classical features and embeddings");
    ft_cmd->add_option("--meta", ft.meta_csv, "images.csv or metadata.csv");
    ft_cmd->add_option("--images-dir", ft.images_root, "image file root");
    ft_cmd->add_option("--attributes", ft.attributes, "attribute table CSV");
    ft_cmd->add_option("--out", ft.out, "output features CSV");
    ft_cmd->add_option("--append-meta", ft.append_meta,
                       "metadata CSV to receive the feature columns");
    ft_cmd->add_option("--embeddings", ft.embeddings, "embedding CSV (id + floats)");
    ft_cmd->add_option("--pca-out", ft.pca_out, "write 2D projection CSV");
    ft_cmd->add_option("--knn", ft.knn_query_id, "query image id for knn");
    ft_cmd->add_option("--k", ft.knn_k, "neighbors for knn");
    ft_cmd->add_option("--knn-out", ft.knn_out, "knn output CSV");
    ft_cmd->add_option("--workers", ft.workers, "parallel workers");

    FilterArgs fl;
    auto* fl_cmd = app.add_subcommand("filter", "evaluate image suitability");
    fl_cmd->add_option("--meta", fl.meta_csv, "metadata.csv")->required();
    fl_cmd->add_option("--features", fl.features_csv, "features.csv");
    fl_cmd->add_option("--attributes", fl.attributes, "attribute table CSV");
    fl_cmd->add_option("--out", fl.out, "suitability CSV");
    fl_cmd->add_option("--config", fl.config_path, "config with [filter] thresholds");

    ClusterArgs cl;
    auto* cl_cmd = app.add_subcommand("cluster", "standardize and k-means cluster cells");
    cl_cmd->add_option("--meta", cl.meta_csv, "metadata.csv")->required();
    cl_cmd->add_option("--attributes", cl.attributes, "attribute table CSV")->required();
    cl_cmd->add_option("--suitability", cl.suitability, "suitability.csv");
    cl_cmd->add_option("--out", cl.out_dir, "output directory");
    cl_cmd->add_option("--k", cl.k, "number of clusters");
    cl_cmd->add_option("--seed", cl.seed, "random seed");
    cl_cmd->add_option("--indicators", cl.indicators, "indicator columns (repeatable)");
    cl_cmd->add_option("--restarts", cl.restarts, "k-means restarts");
    cl_cmd->add_option("--elbow-min", cl.elbow_min, "elbow curve k range start");
    cl_cmd->add_option("--elbow-max", cl.elbow_max, "elbow curve k range end");

    VizArgs vz;
    auto* vz_cmd = app.add_subcommand("viz", "plots and maps with data sidecars");
    vz_cmd->add_option("--kind", vz.kind,
                       "hist | kde | map_point | map_hex | map_line | image_grid")
        ->required();
    vz_cmd->add_option("--data", vz.data, "input CSV for hist/kde/sorting");
    vz_cmd->add_option("--column", vz.column, "value column for hist/kde");
    vz_cmd->add_option("--meta", vz.meta_csv, "metadata.csv for maps/grids");
    vz_cmd->add_option("--network", vz.network, "street network GeoJSON (map_line)");
    vz_cmd->add_option("--variable", vz.variable, "value column (maps)");
    vz_cmd->add_option("--out", vz.out, "output file")->required();
    vz_cmd->add_option("--images-dir", vz.images_root, "image directory (image_grid)");
    vz_cmd->add_option("--sort-by", vz.sort_column, "sort column (image_grid)");
    vz_cmd->add_option("--bins", vz.bins, "histogram bins");
    vz_cmd->add_option("--bandwidth", vz.bandwidth, "kde bandwidth (0 = auto)");
    vz_cmd->add_option("--resolution", vz.resolution, "H3 resolution (map_hex)");
    vz_cmd->add_option("--classes", vz.classes,
                       "color by N quantile classes instead of the continuous scale");
    vz_cmd->add_option("--columns", vz.columns, "grid columns");
    vz_cmd->add_option("--seed", vz.seed, "grid shuffle seed");

    std::string pipeline_config;
    auto* pl_cmd = app.add_subcommand("pipeline", "run the full workflow from a config");
    pl_cmd->add_option("--config", pipeline_config, "pipeline config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        // --help and friends exit 0; anything else is a usage error.
        return code == 0 ? 0 : 2;
    }

    try {
        if (dl_cmd->parsed()) return run_download(dl);
        if (md_cmd->parsed()) return run_metadata(md);
        if (tr_cmd->parsed()) return run_transform(tr);
        if (ft_cmd->parsed()) return run_features(ft);
        if (fl_cmd->parsed()) return run_filter(fl);
        if (cl_cmd->parsed()) return run_cluster(cl);
        if (vz_cmd->parsed()) return run_viz(vz);
        if (pl_cmd->parsed()) return run_pipeline(pipeline_config);
    } catch (const UsageError& e) {
        std::cerr << "[error] " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "[error] " << e.what() << "\n";
        return 1;
    }
    return 0;
}
