#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "svipipe/analysis.hpp"

using namespace svipipe;

namespace {

analysis::AttributeTable table_from_rows(
    const std::vector<std::string>& header,
    const std::vector<std::vector<std::string>>& rows) {
    csv::Table t;
    t.header = header;
    t.rows = rows;
    return analysis::AttributeTable(std::move(t));
}

analysis::FeatureMatrix matrix_from(const std::vector<std::vector<double>>& rows) {
    analysis::FeatureMatrix m;
    m.columns.resize(rows.empty() ? 0 : rows[0].size());
    for (size_t c = 0; c < m.columns.size(); ++c) m.columns[c] = "f" + std::to_string(c);
    for (size_t r = 0; r < rows.size(); ++r) {
        m.row_ids.push_back("row" + std::to_string(r));
        for (const double v : rows[r]) m.values.push_back(v);
    }
    return m;
}

// Exhaustive-search oracle: the optimal k-means inertia over all
// assignments of n points to k clusters.
double brute_force_inertia(const analysis::FeatureMatrix& m, size_t k) {
    const size_t n = m.rows();
    const size_t dim = m.cols();
    size_t combos = 1;
    for (size_t i = 0; i < n; ++i) combos *= k;

    double best = std::numeric_limits<double>::infinity();
    std::vector<int> assign(n);
    for (size_t code = 0; code < combos; ++code) {
        size_t c = code;
        for (size_t i = 0; i < n; ++i) {
            assign[i] = static_cast<int>(c % k);
            c /= k;
        }
        std::vector<double> sums(k * dim, 0.0);
        std::vector<int> counts(k, 0);
        for (size_t i = 0; i < n; ++i) {
            ++counts[assign[i]];
            for (size_t d = 0; d < dim; ++d) sums[assign[i] * dim + d] += m.at(i, d);
        }
        double inertia = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const int j = assign[i];
            for (size_t d = 0; d < dim; ++d) {
                const double centroid = sums[j * dim + d] / counts[j];
                const double diff = m.at(i, d) - centroid;
                inertia += diff * diff;
            }
        }
        best = std::min(best, inertia);
    }
    return best;
}

}  // namespace

TEST_CASE("suitability: the published default profile") {
    const analysis::SuitabilityThresholds defaults;
    CHECK(defaults.complexity_min == 1.0);
    CHECK(defaults.blur_threshold == 100.0);
    CHECK(defaults.speed_max_kmh == 200.0);
    CHECK(defaults.excluded_quality == "very poor");
    CHECK(defaults.required_view_direction == "front/back");
    CHECK(defaults.required_platform == "driving surface");
    CHECK(defaults.exclude_nighttime);
    CHECK(defaults.na_is_pass);
}

TEST_CASE("suitability verdicts") {
    const std::vector<std::string> header = {
        "image_id", "quality", "platform", "view_direction", "lighting",
        "blur_score", "shannon_index", "speed_kmh"};

    SECTION("every field missing passes everything") {
        const auto attrs = table_from_rows(header, {{"a", "", "", "", "", "", "", ""}});
        const auto rep = analysis::evaluate_suitability("a", attrs);
        CHECK(rep.is_suitable);
        CHECK(rep.quality == analysis::Verdict::kNotApplicable);
        CHECK(rep.speed == analysis::Verdict::kNotApplicable);
    }

    SECTION("an image missing from the table entirely is suitable") {
        const auto attrs = table_from_rows(header, {});
        CHECK(analysis::evaluate_suitability("ghost", attrs).is_suitable);
    }

    SECTION("speed above 200 km/h fails") {
        const auto attrs = table_from_rows(header, {{"a", "", "", "", "", "", "", "250"}});
        const auto rep = analysis::evaluate_suitability("a", attrs);
        CHECK(rep.speed == analysis::Verdict::kFail);
        CHECK_FALSE(rep.is_suitable);
    }

    SECTION("complexity 0.5 fails even when all else passes") {
        const auto attrs = table_from_rows(
            header,
            {{"a", "good", "driving surface", "front/back", "day", "500", "0.5", "60"}});
        const auto rep = analysis::evaluate_suitability("a", attrs);
        CHECK(rep.complexity == analysis::Verdict::kFail);
        CHECK(rep.quality == analysis::Verdict::kPass);
        CHECK_FALSE(rep.is_suitable);
    }

    SECTION("very poor quality fails; other labels pass") {
        auto attrs = table_from_rows(header, {{"a", "very poor", "", "", "", "", "", ""},
                                              {"b", "slightly poor", "", "", "", "", "", ""}});
        CHECK_FALSE(analysis::evaluate_suitability("a", attrs).is_suitable);
        CHECK(analysis::evaluate_suitability("b", attrs).is_suitable);
    }

    SECTION("blur: the standard convention removes low variance") {
        const auto attrs = table_from_rows(header, {{"a", "", "", "", "", "40", "", ""},
                                                    {"b", "", "", "", "", "160", "", ""}});
        CHECK_FALSE(analysis::evaluate_suitability("a", attrs).is_suitable);
        CHECK(analysis::evaluate_suitability("b", attrs).is_suitable);

        analysis::SuitabilityThresholds inverted;
        inverted.blur_remove_low_variance = false;  // the stated variant
        CHECK(analysis::evaluate_suitability("a", attrs, inverted).is_suitable);
        CHECK_FALSE(analysis::evaluate_suitability("b", attrs, inverted).is_suitable);
    }

    SECTION("night, side views and off-road platforms fail") {
        const auto attrs = table_from_rows(
            header, {{"n", "", "", "", "night", "", "", ""},
                     {"s", "", "", "side", "", "", "", ""},
                     {"w", "", "walking surface", "", "", "", "", ""}});
        CHECK_FALSE(analysis::evaluate_suitability("n", attrs).is_suitable);
        CHECK_FALSE(analysis::evaluate_suitability("s", attrs).is_suitable);
        CHECK_FALSE(analysis::evaluate_suitability("w", attrs).is_suitable);
    }

    SECTION("unknown vocabulary is an error naming the value") {
        const auto attrs = table_from_rows(header, {{"a", "meh", "", "", "", "", "", ""}});
        CHECK_THROWS_WITH(analysis::evaluate_suitability("a", attrs),
                          Catch::Matchers::ContainsSubstring("meh"));
    }

    SECTION("strict mode fails missing values") {
        const auto attrs = table_from_rows(header, {{"a", "", "", "", "", "", "", ""}});
        analysis::SuitabilityThresholds strict;
        strict.na_is_pass = false;
        CHECK_FALSE(analysis::evaluate_suitability("a", attrs, strict).is_suitable);
    }
}

TEST_CASE("suitability monotonicity: a new failure never rescues an image") {
    // Start from an all-pass row, flip each criterion to fail one at a time.
    const std::vector<std::string> header = {
        "image_id", "quality", "platform", "view_direction", "lighting",
        "blur_score", "shannon_index", "speed_kmh"};
    const std::vector<std::string> pass_row = {
        "a", "good", "driving surface", "front/back", "day", "500", "2.0", "60"};
    const std::vector<std::vector<std::string>> fail_variants = {
        {"a", "very poor", "driving surface", "front/back", "day", "500", "2.0", "60"},
        {"a", "good", "walking surface", "front/back", "day", "500", "2.0", "60"},
        {"a", "good", "driving surface", "side", "day", "500", "2.0", "60"},
        {"a", "good", "driving surface", "front/back", "night", "500", "2.0", "60"},
        {"a", "good", "driving surface", "front/back", "day", "10", "2.0", "60"},
        {"a", "good", "driving surface", "front/back", "day", "500", "0.2", "60"},
        {"a", "good", "driving surface", "front/back", "day", "500", "2.0", "300"},
    };

    CHECK(analysis::evaluate_suitability("a", table_from_rows(header, {pass_row})).is_suitable);
    for (const auto& row : fail_variants) {
        CHECK_FALSE(
            analysis::evaluate_suitability("a", table_from_rows(header, {row})).is_suitable);
    }
}

TEST_CASE("zscore standardization") {
    SECTION("the {1,2,3} column with population sigma") {
        auto m = analysis::zscore(matrix_from({{1.0}, {2.0}, {3.0}}));
        CHECK_THAT(m.at(0, 0), Catch::Matchers::WithinAbs(-1.224744871391589, 1e-12));
        CHECK_THAT(m.at(1, 0), Catch::Matchers::WithinAbs(0.0, 1e-12));
        CHECK_THAT(m.at(2, 0), Catch::Matchers::WithinAbs(1.224744871391589, 1e-12));
    }

    SECTION("constant columns map to zeros") {
        auto m = analysis::zscore(matrix_from({{5.0, 1.0}, {5.0, 2.0}, {5.0, 3.0}}));
        for (size_t r = 0; r < 3; ++r) CHECK(m.at(r, 0) == 0.0);
    }

    SECTION("column means vanish and idempotence holds") {
        std::mt19937_64 rng(41);
        std::uniform_real_distribution<double> u(-10.0, 10.0);
        std::vector<std::vector<double>> rows;
        for (int r = 0; r < 20; ++r) rows.push_back({u(rng), u(rng), u(rng)});

        const auto z = analysis::zscore(matrix_from(rows));
        for (size_t c = 0; c < z.cols(); ++c) {
            double mean = 0.0;
            for (size_t r = 0; r < z.rows(); ++r) mean += z.at(r, c);
            CHECK(std::fabs(mean / static_cast<double>(z.rows())) < 1e-12);
        }

        const auto zz = analysis::zscore(z);
        for (size_t i = 0; i < z.values.size(); ++i) {
            CHECK_THAT(zz.values[i], Catch::Matchers::WithinAbs(z.values[i], 1e-9));
        }
    }

    SECTION("needs two rows") {
        CHECK_THROWS_AS(analysis::zscore(matrix_from({{1.0}})), std::invalid_argument);
    }
}

TEST_CASE("kmeans basics") {
    SECTION("k equal to distinct rows gives zero inertia") {
        const auto m = matrix_from({{0.0, 0.0}, {5.0, 5.0}, {-3.0, 4.0}});
        const auto model = analysis::kmeans_best(m, 3, 7);
        CHECK_THAT(model.inertia, Catch::Matchers::WithinAbs(0.0, 1e-18));
        CHECK(model.assignment[0] != model.assignment[1]);
        CHECK(model.assignment[1] != model.assignment[2]);
    }

    SECTION("two tight blobs separate perfectly") {
        std::vector<std::vector<double>> rows;
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> jitter(-0.1, 0.1);
        for (int i = 0; i < 12; ++i) rows.push_back({jitter(rng), jitter(rng)});
        for (int i = 0; i < 12; ++i) rows.push_back({10.0 + jitter(rng), 10.0 + jitter(rng)});

        const auto model = analysis::kmeans_best(matrix_from(rows), 2, 3);
        for (int i = 1; i < 12; ++i) CHECK(model.assignment[i] == model.assignment[0]);
        for (int i = 13; i < 24; ++i) CHECK(model.assignment[i] == model.assignment[12]);
        CHECK(model.assignment[0] != model.assignment[12]);
    }

    SECTION("fixed seeds are deterministic") {
        std::vector<std::vector<double>> rows;
        std::mt19937_64 rng(19);
        std::uniform_real_distribution<double> u(-5.0, 5.0);
        for (int i = 0; i < 30; ++i) rows.push_back({u(rng), u(rng), u(rng)});
        const auto m = matrix_from(rows);

        const auto a = analysis::kmeans(m, 4, 1234);
        const auto b = analysis::kmeans(m, 4, 1234);
        CHECK(a.assignment == b.assignment);
        CHECK(a.inertia == b.inertia);

        const auto c = analysis::kmeans(m, 4, 77);
        CHECK(c.assignment.size() == a.assignment.size());
    }

    SECTION("k bounds") {
        const auto m = matrix_from({{0.0}, {1.0}});
        CHECK_THROWS_AS(analysis::kmeans(m, 3, 1), std::invalid_argument);
        CHECK_THROWS_AS(analysis::kmeans(m, 0, 1), std::invalid_argument);
    }
}

TEST_CASE("kmeans matches the exhaustive oracle on small instances") {
    std::mt19937_64 rng(2718);
    std::uniform_real_distribution<double> u(-4.0, 4.0);

    for (int trial = 0; trial < 20; ++trial) {
        const size_t n = 4 + trial % 5;  // 4..8 rows
        const size_t k = 2 + trial % 2;  // 2..3 clusters
        std::vector<std::vector<double>> rows;
        for (size_t i = 0; i < n; ++i) rows.push_back({u(rng), u(rng)});
        const auto m = matrix_from(rows);

        const double oracle = brute_force_inertia(m, k);
        const auto model = analysis::kmeans_best(m, k, 555, 10);
        CAPTURE(trial, n, k, oracle, model.inertia);
        CHECK_THAT(model.inertia, Catch::Matchers::WithinAbs(oracle, 1e-9));
    }
}

TEST_CASE("elbow inertia is non-increasing and hits zero at k = rows") {
    std::vector<std::vector<double>> rows;
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 10; ++i) rows.push_back({u(rng), u(rng)});
    const auto m = matrix_from(rows);

    const auto curve = analysis::elbow_curve(m, 1, 10, 99);
    REQUIRE(curve.size() == 10);
    for (size_t i = 1; i < curve.size(); ++i) {
        CHECK(curve[i].second <= curve[i - 1].second + 1e-12);
    }
    CHECK_THAT(curve.back().second, Catch::Matchers::WithinAbs(0.0, 1e-18));
}

TEST_CASE("aggregate_features averages suitable images per cell") {
    // Three images in two cells; one unsuitable image must be excluded.
    std::vector<ImageRecord> records;
    for (int i = 0; i < 3; ++i) {
        ImageRecord r;
        r.image_id = "img" + std::to_string(i);
        r.location = geo::GeoPoint(1.30 + 0.1 * (i == 2), 103.85);
        r.captured_at_ms = 1600000000000LL;
        r.compass_angle = 0.0;
        r.sequence_id = "s";
        r.creator_id = "u";
        records.push_back(r);
    }
    const auto enriched = metadata::enrich(records, {}, {});

    const auto attrs = table_from_rows({"image_id", "veg"},
                                       {{"img0", "0.2"}, {"img1", "0.4"}, {"img2", "0.9"}});
    const std::unordered_map<std::string, bool> suitable{
        {"img0", true}, {"img1", true}, {"img2", true}};

    const auto m = analysis::aggregate_features(enriched, attrs, {"veg"}, suitable);
    REQUIRE(m.rows() == 2);
    // Cells are sorted by hex id; find the one holding img0/img1.
    size_t pair_row = m.at(0, 0) != 0.9 ? 0 : 1;
    CHECK_THAT(m.at(pair_row, 0), Catch::Matchers::WithinAbs(0.3, 1e-12));

    // Excluding img1 changes the mean to img0's value alone.
    const std::unordered_map<std::string, bool> partial{
        {"img0", true}, {"img1", false}, {"img2", true}};
    const auto m2 = analysis::aggregate_features(enriched, attrs, {"veg"}, partial);
    REQUIRE(m2.rows() == 2);
    size_t row0 = m2.at(0, 0) != 0.9 ? 0 : 1;
    CHECK_THAT(m2.at(row0, 0), Catch::Matchers::WithinAbs(0.2, 1e-12));

    // A cell with zero suitable images disappears.
    const std::unordered_map<std::string, bool> none{
        {"img0", false}, {"img1", false}, {"img2", true}};
    CHECK(analysis::aggregate_features(enriched, attrs, {"veg"}, none).rows() == 1);
}

TEST_CASE("attribute table ingestion") {
    const auto attrs = table_from_rows({"image_id", "score", "label"},
                                       {{"a", "1.5", "x"}, {"b", "", "y"}});
    CHECK(attrs.get_number("a", "score") == 1.5);
    CHECK_FALSE(attrs.get_number("b", "score").has_value());
    CHECK_FALSE(attrs.get("c", "score").has_value());
    CHECK_FALSE(attrs.get("a", "missing_column").has_value());
    CHECK(attrs.get("b", "label") == "y");
    CHECK_THROWS(attrs.get_number("a", "label"));

    csv::Table dup;
    dup.header = {"image_id", "v"};
    dup.rows = {{"a", "1"}, {"a", "2"}};
    CHECK_THROWS(analysis::AttributeTable(std::move(dup)));
}
