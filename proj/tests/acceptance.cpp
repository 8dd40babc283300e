// Acceptance suite: exercises the full pipeline against its contracts and
// prints one PASS/FAIL line per criterion. Returns the number of failures.

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>
#include <csignal>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "svipipe/acquire.hpp"
#include "svipipe/analysis.hpp"
#include "svipipe/features.hpp"
#include "svipipe/h3.hpp"
#include "svipipe/metadata.hpp"
#include "svipipe/mock.hpp"
#include "svipipe/transform.hpp"

namespace fs = std::filesystem;
using namespace svipipe;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail = "") {
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << number << ": " << name;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << std::endl;
    if (!pass) ++g_failures;
}

struct CellVector {
    double lat;
    double lon;
    int res;
    uint64_t cell;
};

const CellVector kCellVectors[] = {
#include "support/h3_cell_vectors.inc"
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Runs a command; returns its exit code (-signal when killed).
int run_command(const std::vector<std::string>& argv, const std::string& cwd = "") {
    const pid_t pid = fork();
    if (pid == 0) {
        if (!cwd.empty() && chdir(cwd.c_str()) != 0) _exit(127);
        std::vector<char*> args;
        for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
        args.push_back(nullptr);
        execv(args[0], args.data());
        _exit(127);
    }
    int status = 0;
    waitpid(pid, &status, 0);
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    if (WIFSIGNALED(status)) return -WTERMSIG(status);
    return -1;
}

pid_t spawn_command(const std::vector<std::string>& argv) {
    const pid_t pid = fork();
    if (pid == 0) {
        std::vector<char*> args;
        for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
        args.push_back(nullptr);
        execv(args[0], args.data());
        _exit(127);
    }
    return pid;
}

size_t count_checkpoint_images(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    size_t n = 0;
    while (std::getline(in, line)) {
        if (line.rfind("img/", 0) == 0 && line.find("\tdone\t") != std::string::npos) ++n;
    }
    return n;
}

bool same_bytes(const fs::path& a, const fs::path& b) { return slurp(a) == slurp(b); }

// ---- criterion 1 ----

void criterion_projection_conformance() {
    const auto start = Clock::now();
    bool ok = true;
    std::string detail;

    std::mt19937_64 rng(100);
    std::uniform_real_distribution<double> u(1e-9, 1.0);
    const double theta_max = transform::kPi / 2.0;

    using transform::FisheyeProjection;
    for (const auto p : {FisheyeProjection::kOrthographic, FisheyeProjection::kEquisolid,
                         FisheyeProjection::kEquidistant, FisheyeProjection::kStereographic}) {
        for (int i = 0; i < 1000 && ok; ++i) {
            const double theta = u(rng) * theta_max;
            const double rho =
                transform::fisheye_radius(p, theta) / transform::fisheye_radius(p, theta_max);
            const double theta_rec =
                transform::fisheye_theta(p, rho * transform::fisheye_radius(p, theta_max));
            const double rho_rec =
                transform::fisheye_radius(p, theta_rec) / transform::fisheye_radius(p, theta_max);
            if (std::fabs(rho_rec - rho) >= 1e-9) {
                ok = false;
                detail = "fisheye round-trip error at theta " + std::to_string(theta);
            }
        }
    }

    transform::PerspectiveSpec spec;
    spec.width = 640;
    spec.height = 480;
    spec.fov_deg = 90.0;
    spec.yaw_deg = 33.0;
    spec.pitch_deg = -12.0;
    std::uniform_real_distribution<double> px(0.0, 640.0);
    std::uniform_real_distribution<double> py(0.0, 480.0);
    for (int i = 0; i < 1000 && ok; ++i) {
        const double x = px(rng);
        const double y = py(rng);
        const auto [lon, lat] = transform::perspective_ray(spec, x, y);
        const auto [bx, by] = transform::perspective_project(spec, lon, lat);
        if (std::hypot(bx - x, by - y) >= 1e-6) {
            ok = false;
            detail = "perspective round-trip error";
        }
    }

    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    if (secs >= 10.0) {
        ok = false;
        detail = "took " + std::to_string(secs) + " s";
    }
    report(1, "projection conformance (4 fisheye inverses, perspective round-trip)", ok,
           detail.empty() ? std::to_string(secs) + " s" : detail);
}

// ---- criterion 2 ----

void criterion_filter_profile_golden() {
    // The default profile, dumped key by key, against the golden constants.
    const analysis::SuitabilityThresholds t;
    std::ostringstream dump;
    dump << "complexity_min=" << t.complexity_min << "\n"
         << "blur_threshold=" << t.blur_threshold << "\n"
         << "speed_max_kmh=" << t.speed_max_kmh << "\n"
         << "excluded_quality=" << t.excluded_quality << "\n"
         << "required_view_direction=" << t.required_view_direction << "\n"
         << "required_platform=" << t.required_platform << "\n"
         << "exclude_nighttime=" << (t.exclude_nighttime ? "true" : "false") << "\n"
         << "na_is_pass=" << (t.na_is_pass ? "true" : "false") << "\n";

    const std::string golden =
        "complexity_min=1\n"
        "blur_threshold=100\n"
        "speed_max_kmh=200\n"
        "excluded_quality=very poor\n"
        "required_view_direction=front/back\n"
        "required_platform=driving surface\n"
        "exclude_nighttime=true\n"
        "na_is_pass=true\n";

    bool ok = dump.str() == golden;
    std::string detail = ok ? "" : "profile dump diverged from golden constants";

    // Conjunctive combination with NA-as-pass.
    csv::Table t2;
    t2.header = {"image_id", "quality", "speed_kmh"};
    t2.rows = {{"all_na", "", ""}, {"one_fail", "good", "250"}};
    const analysis::AttributeTable attrs(std::move(t2));
    if (!analysis::evaluate_suitability("all_na", attrs).is_suitable) {
        ok = false;
        detail = "NA row did not pass";
    }
    if (analysis::evaluate_suitability("one_fail", attrs).is_suitable) {
        ok = false;
        detail = "failing criterion did not veto";
    }
    report(2, "default filter profile encodes the published constants", ok, detail);
}

// ---- criterion 3 ----

void criterion_equation_oracles() {
    bool ok = true;
    std::string detail;

    const std::vector<double> a{1.0, 0.0};
    const std::vector<double> b{1.0, 1.0};
    if (std::fabs(features::cosine_distance(a, b) - (1.0 - 1.0 / std::sqrt(2.0))) > 1e-12) {
        ok = false;
        detail = "cosine distance";
    }

    img::GrayF impulse(5, 5, 0.f);
    impulse.at(2, 2) = 1.f;
    const img::GrayF lap = features::laplacian(impulse);
    const float kernel[3][3] = {{0, 1, 0}, {1, -4, 1}, {0, 1, 0}};
    for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
            if (lap.at(2 + dx, 2 + dy) != kernel[dy + 1][dx + 1]) {
                ok = false;
                detail = "laplacian impulse";
            }
        }
    }

    if (std::fabs(features::shannon_index({{"a", 0.5}, {"b", 0.5}}) - std::log(2.0)) > 1e-12) {
        ok = false;
        detail = "shannon index";
    }
    report(3, "equation-level oracles (cosine, laplacian kernel, shannon)", ok, detail);
}

// ---- criterion 4 ----

void criterion_h3_conformance() {
    size_t checked = 0;
    size_t failed = 0;
    std::map<int, int> by_res;
    for (const auto& v : kCellVectors) {
        ++checked;
        ++by_res[v.res];
        if (h3::latlng_to_cell(v.lat, v.lon, v.res) != v.cell) ++failed;
    }
    bool ok = failed == 0 && checked >= 100;
    for (const int res : {0, 5, 9, 15}) ok = ok && by_res[res] > 0;
    ok = ok &&
         h3::latlng_to_cell(37.7752702151959, -122.418307270836, 9) == 0x8928308280fffffULL;
    report(4, "H3 conformance on published reference vectors", ok,
           std::to_string(checked - failed) + "/" + std::to_string(checked) + " vectors");
}

// ---- criterion 5 ----

void criterion_metadata_invariants() {
    bool ok = true;
    std::string detail;

    // 1,000-record synthetic corpus across several cells and seasons.
    std::mt19937_64 rng(500);
    std::uniform_real_distribution<double> lat(1.25, 1.40);
    std::uniform_real_distribution<double> lon(103.7, 104.0);
    std::uniform_real_distribution<double> compass(0.0, 360.0);
    std::uniform_int_distribution<int64_t> t(1546300800000LL, 1735689600000LL);  // 2019-2025

    std::vector<ImageRecord> records;
    for (int i = 0; i < 1000; ++i) {
        ImageRecord r;
        r.image_id = "syn" + std::to_string(i);
        r.location = geo::GeoPoint(lat(rng), lon(rng));
        r.captured_at_ms = t(rng);
        r.compass_angle = compass(rng);
        r.sequence_id = "s" + std::to_string(i % 17);
        r.creator_id = "u" + std::to_string(i % 5);
        r.is_pano = i % 3 == 0;
        records.push_back(r);
    }

    const auto enriched = metadata::enrich(records, {}, {});
    const auto rows = metadata::aggregate_by_hex(enriched);
    int64_t total = 0;
    for (const auto& row : rows) {
        total += row.count;
        if (row.number_of_daytime + row.number_of_nighttime != row.count) {
            ok = false;
            detail = "day+night != count in cell " + row.unit_id;
        }
        if (row.number_of_spring + row.number_of_summer + row.number_of_autumn +
                row.number_of_winter !=
            row.count) {
            ok = false;
            detail = "season counters do not sum to count";
        }
        for (const int64_t category :
             {row.number_of_years, row.number_of_months, row.number_of_days,
              row.number_of_hours, row.number_of_days_of_week}) {
            if (category > row.count) {
                ok = false;
                detail = "category counter exceeds count";
            }
        }
    }
    if (total != 1000) {
        ok = false;
        detail = "aggregate rows lost records";
    }

    // Circular-mean rotation equivariance within 1e-9.
    std::vector<double> angles;
    for (int i = 0; i < 100; ++i) angles.push_back(compass(rng));
    const double base = metadata::circular_mean_deg(angles);
    for (const double delta : {7.0, 93.5, 271.25}) {
        std::vector<double> rotated;
        for (const double v : angles) rotated.push_back(std::fmod(v + delta, 360.0));
        double want = std::fmod(base + delta, 360.0);
        double got = metadata::circular_mean_deg(rotated);
        double diff = std::fabs(want - got);
        diff = std::min(diff, 360.0 - diff);
        if (diff >= 1e-9) {
            ok = false;
            detail = "circular mean not rotation-equivariant";
        }
    }

    const std::vector<double> wrap{350.0, 10.0};
    if (std::fabs(metadata::circular_mean_deg(wrap)) >= 1e-9) {
        ok = false;
        detail = "{350, 10} mean is not 0";
    }

    report(5, "metadata invariants on a 1,000-record synthetic corpus", ok, detail);
}

// ---- criterion 6 ----

void criterion_download_robustness(const std::string& bin) {
    bool ok = true;
    std::string detail;

    mock::MockProviderServer server;
    server.start();
    mock::FaultPlan plan;
    plan.fail_429_every = 7;  // keep 429s flowing the whole run
    plan.latency_ms = 20;     // slow the run down enough to observe a kill
    server.set_faults(plan);

    const fs::path root = fs::temp_directory_path() / "svipipe_accept_dl";
    fs::remove_all(root);
    fs::create_directories(root);

    const std::string region = "103.80,1.27,103.90,1.33";
    const auto download_cmd = [&](const std::string& out) {
        return std::vector<std::string>{
            bin,          "download",        "--region", region,
            "--provider", "mock",            "--base-url", server.base_url(),
            "--out",      out,               "--checkpoint", out + "/ck.log",
            "--workers",  "4",               "--rps", "200",
            "--backoff-ms", "5"};
    };

    // Reference run, uninterrupted; its in-flight count must respect the
    // worker budget.
    if (run_command(download_cmd((root / "ref").string())) != 0) {
        report(6, "download robustness (429s, kill, resume)", false, "reference run failed");
        return;
    }
    if (server.stats().max_concurrent > 4) {
        ok = false;
        detail = "max in-flight " + std::to_string(server.stats().max_concurrent) + " > 4";
    }
    server.reset_stats();

    // Interrupted run: SIGKILL once at least 5 images completed.
    const fs::path victim_out = root / "victim";
    const pid_t pid = spawn_command(download_cmd(victim_out.string()));
    const auto deadline = Clock::now() + std::chrono::seconds(60);
    bool killed = false;
    while (Clock::now() < deadline) {
        if (count_checkpoint_images(victim_out / "ck.log") >= 5) {
            kill(pid, SIGKILL);
            killed = true;
            break;
        }
        int status = 0;
        if (waitpid(pid, &status, WNOHANG) == pid) break;  // finished early
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    if (killed) {
        int status = 0;
        waitpid(pid, &status, 0);
    } else {
        detail = "run finished before the kill";
    }

    // Let the killed process's in-flight requests drain before resuming so
    // the concurrency gauge stays per-run.
    std::this_thread::sleep_for(std::chrono::milliseconds(300));
    server.reset_stats();

    // Resume after the kill; also proves rerun-after-interrupt completes.
    server.set_faults({});
    if (run_command(download_cmd(victim_out.string())) != 0) {
        ok = false;
        detail = "resume run failed";
    }

    // Identical output sets, byte for byte.
    const auto ref_records = read_image_csv((root / "ref/images.csv").string());
    const auto got_records = read_image_csv((victim_out / "images.csv").string());
    if (ref_records.size() != 50 || got_records.size() != 50) {
        ok = false;
        detail = "expected 50 records, got " + std::to_string(got_records.size());
    }
    if (!same_bytes(root / "ref/images.csv", victim_out / "images.csv")) {
        ok = false;
        detail = "images.csv differs after resume";
    }
    for (const auto& r : ref_records) {
        if (!same_bytes(root / "ref" / r.local_path, victim_out / r.local_path)) {
            ok = false;
            detail = "image bytes differ: " + r.image_id;
            break;
        }
    }

    // Concurrency stayed within the worker budget.
    if (server.stats().max_concurrent > 4) {
        ok = false;
        detail = "max in-flight " + std::to_string(server.stats().max_concurrent) + " > 4";
    }

    report(6, "download robustness (429s, kill, resume, worker budget)", ok, detail);
}

// ---- criterion 7 ----

void criterion_clustering_oracle() {
    bool ok = true;
    std::string detail;

    std::mt19937_64 rng(700);
    std::uniform_real_distribution<double> u(-5.0, 5.0);

    // Exhaustive oracle over every instance size up to 8 and k up to 3.
    for (size_t n = 2; n <= 8 && ok; ++n) {
        for (size_t k = 2; k <= std::min<size_t>(3, n) && ok; ++k) {
            analysis::FeatureMatrix m;
            m.columns = {"x", "y"};
            for (size_t i = 0; i < n; ++i) {
                m.row_ids.push_back(std::to_string(i));
                m.values.push_back(u(rng));
                m.values.push_back(u(rng));
            }

            double oracle = std::numeric_limits<double>::infinity();
            size_t combos = 1;
            for (size_t i = 0; i < n; ++i) combos *= k;
            std::vector<int> assign(n);
            for (size_t code = 0; code < combos; ++code) {
                size_t c = code;
                for (size_t i = 0; i < n; ++i) {
                    assign[i] = static_cast<int>(c % k);
                    c /= k;
                }
                std::vector<double> sums(k * 2, 0.0);
                std::vector<int> counts(k, 0);
                for (size_t i = 0; i < n; ++i) {
                    ++counts[assign[i]];
                    sums[assign[i] * 2] += m.at(i, 0);
                    sums[assign[i] * 2 + 1] += m.at(i, 1);
                }
                double inertia = 0.0;
                for (size_t i = 0; i < n; ++i) {
                    const int j = assign[i];
                    const double dx = m.at(i, 0) - sums[j * 2] / counts[j];
                    const double dy = m.at(i, 1) - sums[j * 2 + 1] / counts[j];
                    inertia += dx * dx + dy * dy;
                }
                oracle = std::min(oracle, inertia);
            }

            const auto model = analysis::kmeans_best(m, k, 4242, 10);
            if (std::fabs(model.inertia - oracle) > 1e-9) {
                ok = false;
                detail = "n=" + std::to_string(n) + " k=" + std::to_string(k) + " inertia " +
                         std::to_string(model.inertia) + " vs oracle " + std::to_string(oracle);
            }
        }
    }

    // Elbow inertia non-increasing.
    analysis::FeatureMatrix m;
    m.columns = {"x"};
    for (int i = 0; i < 12; ++i) {
        m.row_ids.push_back(std::to_string(i));
        m.values.push_back(u(rng));
    }
    const auto curve = analysis::elbow_curve(m, 1, 12, 1);
    for (size_t i = 1; i < curve.size(); ++i) {
        if (curve[i].second > curve[i - 1].second + 1e-12) {
            ok = false;
            detail = "elbow curve increased at k=" + std::to_string(curve[i].first);
        }
    }

    // Fixed-seed determinism across repeated runs.
    const auto a = analysis::kmeans_best(m, 3, 777, 10);
    const auto b = analysis::kmeans_best(m, 3, 777, 10);
    if (a.assignment != b.assignment || a.inertia != b.inertia) {
        ok = false;
        detail = "fixed seed was not deterministic";
    }

    report(7, "clustering matches the exhaustive oracle; elbow monotone; deterministic", ok,
           detail);
}

// ---- criteria 8 and 9 ----

void criterion_pipeline_smoke(const std::string& bin, const std::string& mkfixtures) {
    bool ok = true;
    std::string detail;
    const auto start = Clock::now();

    mock::MockProviderServer server;
    server.start();

    const fs::path root = fs::temp_directory_path() / "svipipe_accept_pipeline";
    fs::remove_all(root);
    fs::create_directories(root);

    // Materialize the bundled fixtures.
    if (run_command({mkfixtures, "--out", (root / "fixtures").string()}) != 0) {
        report(8, "end-to-end pipeline smoke", false, "mkfixtures failed");
        report(9, "point-cloud geometry", false, "pipeline unavailable");
        return;
    }

    // Pipeline config pointing at the live mock server.
    const std::string config_text =
        "[provider]\n"
        "name = \"mock\"\n"
        "base_url = \"" + server.base_url() + "\"\n"
        "[region]\n"
        "value = \"miniville\"\n"
        "[download]\n"
        "workers = 4\n"
        "requests_per_second = 500.0\n"
        "backoff_base_ms = 5\n"
        "[metadata]\n"
        "network = \"fixtures/network.geojson\"\n"
        "resolution = 9\n"
        "[features]\n"
        "attributes = \"fixtures/attributes.csv\"\n"
        "[cluster]\n"
        "k = 5\n"
        "seed = 42\n"
        "[transform]\n"
        "fov = 90.0\n"
        "width = 640\n"
        "height = 480\n"
        "depth_dir = \"fixtures/depth\"\n"
        "stride = 2\n"
        "[output]\n"
        "dir = \"out\"\n";

    std::ofstream(root / "pipeline.toml") << config_text;

    const int rc = run_command({bin, "pipeline", "--config", "pipeline.toml"}, root.string());
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    if (rc != 0) {
        report(8, "end-to-end pipeline smoke", false, "exit code " + std::to_string(rc));
        report(9, "point-cloud geometry", false, "pipeline unavailable");
        return;
    }
    if (secs >= 60.0) {
        ok = false;
        detail = "took " + std::to_string(secs) + " s";
    }

    const fs::path out = root / "out";
    for (const char* artifact : {"suitability.csv", "clusters.geojson", "map.svg",
                                 "perspective.jpg", "cloud.ply"}) {
        if (!fs::exists(out / artifact)) {
            ok = false;
            detail = std::string("missing artifact ") + artifact;
        }
    }

    // The perspective image spans exactly 90 degrees horizontally.
    if (ok) {
        const img::Image persp = img::load((out / "perspective.jpg").string());
        if (persp.width != 640 || persp.height != 480) {
            ok = false;
            detail = "perspective image has wrong dimensions";
        }
        transform::PerspectiveSpec spec;
        spec.fov_deg = 90.0;
        spec.width = 640;
        spec.height = 480;
        const auto [lon_l, lat_l] = transform::perspective_ray(spec, 0.0, 240.0);
        const auto [lon_r, lat_r] = transform::perspective_ray(spec, 640.0, 240.0);
        if (std::fabs((lon_r - lon_l) - 90.0) > 1e-9) {
            ok = false;
            detail = "horizontal span is not exactly the fov";
        }
    }

    // The suitability file covers the corpus and the clusters carry hexes.
    if (ok) {
        const csv::Table suit = csv::read_file((out / "suitability.csv").string());
        if (suit.rows.size() != 50) {
            ok = false;
            detail = "suitability.csv should have 50 rows";
        }
        const auto clusters = nlohmann::json::parse(slurp(out / "clusters.geojson"));
        if (!clusters.contains("features") || clusters["features"].empty()) {
            ok = false;
            detail = "clusters.geojson has no features";
        } else {
            const auto& f0 = clusters["features"][0];
            if (!f0["properties"].contains("cluster") ||
                f0["geometry"]["type"] != "Polygon") {
                ok = false;
                detail = "clusters.geojson features malformed";
            }
        }
    }

    // Determinism: a second run in a fresh directory is byte-identical.
    if (ok) {
        const fs::path root2 = fs::temp_directory_path() / "svipipe_accept_pipeline2";
        fs::remove_all(root2);
        fs::create_directories(root2);
        fs::copy(root / "fixtures", root2 / "fixtures", fs::copy_options::recursive);
        std::ofstream(root2 / "pipeline.toml") << config_text;
        if (run_command({bin, "pipeline", "--config", "pipeline.toml"}, root2.string()) != 0) {
            ok = false;
            detail = "second pipeline run failed";
        } else {
            for (const char* artifact :
                 {"download/images.csv", "metadata.csv", "features.csv", "suitability.csv",
                  "clusters.csv", "clusters.geojson", "map.svg", "map.geojson",
                  "perspective.jpg", "fisheye.png", "cloud.ply", "grid.png",
                  "blur_hist.svg"}) {
                if (!same_bytes(out / artifact, root2 / "out" / artifact)) {
                    ok = false;
                    detail = std::string("run-to-run difference in ") + artifact;
                    break;
                }
            }
        }
    }

    // Worker counts must not alter results: run again with 2 workers.
    if (ok) {
        const fs::path root3 = fs::temp_directory_path() / "svipipe_accept_pipeline3";
        fs::remove_all(root3);
        fs::create_directories(root3);
        fs::copy(root / "fixtures", root3 / "fixtures", fs::copy_options::recursive);
        std::string cfg2 = config_text;
        const std::string from = "workers = 4";
        cfg2.replace(cfg2.find(from), from.size(), "workers = 2");
        std::ofstream(root3 / "pipeline.toml") << cfg2;
        if (run_command({bin, "pipeline", "--config", "pipeline.toml"}, root3.string()) != 0) {
            ok = false;
            detail = "worker-count variant failed";
        } else {
            for (const char* artifact :
                 {"download/images.csv", "features.csv", "suitability.csv", "clusters.csv",
                  "clusters.geojson"}) {
                if (!same_bytes(out / artifact, root3 / "out" / artifact)) {
                    ok = false;
                    detail = std::string("worker count changed ") + artifact;
                    break;
                }
            }
        }
    }

    report(8, "end-to-end pipeline on the 50-image mini corpus", ok,
           detail.empty() ? std::to_string(secs) + " s" : detail);

    // Criterion 9: point norms equal the depth values (uniform sphere in
    // double precision, plus the emitted PLY against its depth fixture).
    bool ok9 = true;
    std::string detail9;
    {
        img::Image pano(128, 64, 3);
        transform::DepthMap depth;
        depth.width = 128;
        depth.height = 64;
        depth.absolute = true;
        depth.values.assign(128 * 64, 12.25f);
        const auto cloud = transform::to_pointcloud(pano, depth);
        for (const auto& p : cloud) {
            const double norm = std::sqrt(static_cast<double>(p.x) * p.x +
                                          static_cast<double>(p.y) * p.y +
                                          static_cast<double>(p.z) * p.z);
            if (std::fabs(norm - 12.25) / 12.25 >= 1e-6) {
                ok9 = false;
                detail9 = "uniform-depth sphere violated";
                break;
            }
        }
    }
    if (ok9 && fs::exists(out / "cloud.ply")) {
        const auto cloud = transform::read_ply((out / "cloud.ply").string());
        const auto depth = transform::load_depth_bin(
            (root / "fixtures/depth/img0001.depth.bin").string());
        // Stride 2 sampling order matches to_pointcloud's traversal.
        size_t idx = 0;
        for (int v = 0; v < depth.height && ok9; v += 2) {
            for (int u = 0; u < depth.width && ok9; u += 2) {
                const double want = depth.at(u, v);
                const auto& p = cloud.at(idx++);
                const double norm = std::sqrt(static_cast<double>(p.x) * p.x +
                                              static_cast<double>(p.y) * p.y +
                                              static_cast<double>(p.z) * p.z);
                if (std::fabs(norm - want) > 1e-3 * std::max(1.0, want)) {
                    ok9 = false;
                    detail9 = "PLY norm " + std::to_string(norm) + " vs depth " +
                              std::to_string(want);
                }
            }
        }
        if (ok9 && idx != cloud.size()) {
            ok9 = false;
            detail9 = "PLY point count mismatch";
        }
    } else if (ok9) {
        ok9 = false;
        detail9 = "cloud.ply missing";
    }
    report(9, "point-cloud norms equal the depth values", ok9, detail9);
}

}  // namespace

int main() {
    const std::string bin = SVIPIPE_BIN;
    const std::string mkfixtures = MKFIXTURES_BIN;

    criterion_projection_conformance();
    criterion_filter_profile_golden();
    criterion_equation_oracles();
    criterion_h3_conformance();
    criterion_metadata_invariants();
    criterion_download_robustness(bin);
    criterion_clustering_oracle();
    criterion_pipeline_smoke(bin, mkfixtures);

    std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED" : "FAILURES: ")
              << (g_failures == 0 ? "" : std::to_string(g_failures)) << std::endl;
    return g_failures;
}
