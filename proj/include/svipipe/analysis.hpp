#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "svipipe/csv.hpp"
#include "svipipe/metadata.hpp"
#include "svipipe/rng.hpp"

// Suitability filtering, z-score standardization, k-means clustering and
// per-cell feature aggregation.

namespace svipipe::analysis {

// ---- attribute tables ----

/// Ingested per-image model outputs, keyed by image id; open column schema.
class AttributeTable {
  public:
    AttributeTable() = default;

    explicit AttributeTable(csv::Table table) : table_(std::move(table)) {
        id_col_ = table_.require_column("image_id");
        for (size_t i = 0; i < table_.rows.size(); ++i) {
            const std::string& id = table_.rows[i][id_col_];
            if (!row_by_id_.emplace(id, i).second) {
                throw std::runtime_error("duplicate image_id in attribute table: " + id);
            }
        }
    }

    static AttributeTable from_file(const std::string& path) {
        return AttributeTable(csv::read_file(path));
    }

    bool has_column(const std::string& name) const { return table_.column(name) >= 0; }

    const std::vector<std::string>& columns() const { return table_.header; }

    /// Cell value, or nullopt when the image, column, or value is missing.
    std::optional<std::string> get(const std::string& image_id,
                                   const std::string& column) const {
        const int col = table_.column(column);
        if (col < 0) return std::nullopt;
        const auto it = row_by_id_.find(image_id);
        if (it == row_by_id_.end()) return std::nullopt;
        const auto& row = table_.rows[it->second];
        if (static_cast<size_t>(col) >= row.size()) return std::nullopt;  // ragged row
        const std::string& v = row[col];
        if (v.empty() || v == "NA" || v == "nan" || v == "NaN") return std::nullopt;
        return v;
    }

    std::optional<double> get_number(const std::string& image_id,
                                     const std::string& column) const {
        const auto v = get(image_id, column);
        if (!v) return std::nullopt;
        try {
            return std::stod(*v);
        } catch (const std::exception&) {
            throw std::runtime_error("non-numeric value '" + *v + "' in column " + column);
        }
    }

    size_t size() const { return table_.rows.size(); }

  private:
    csv::Table table_;
    int id_col_ = 0;
    std::unordered_map<std::string, size_t> row_by_id_;
};

// ---- suitability ----

enum class Verdict { kPass, kFail, kNotApplicable };

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::kPass: return "pass";
        case Verdict::kFail: return "fail";
        case Verdict::kNotApplicable: return "not_applicable";
    }
    return "?";
}

struct SuitabilityReport {
    std::string image_id;
    Verdict quality = Verdict::kNotApplicable;
    Verdict sharpness = Verdict::kNotApplicable;
    Verdict complexity = Verdict::kNotApplicable;
    Verdict speed = Verdict::kNotApplicable;
    Verdict lighting = Verdict::kNotApplicable;
    Verdict view_direction = Verdict::kNotApplicable;
    Verdict platform = Verdict::kNotApplicable;
    bool is_suitable = true;

    std::vector<std::pair<const char*, Verdict>> criteria() const {
        return {{"quality", quality},         {"sharpness", sharpness},
                {"complexity", complexity},   {"speed", speed},
                {"lighting", lighting},       {"view_direction", view_direction},
                {"platform", platform}};
    }
};

/// Filter thresholds; the defaults are the published profile this pipeline
/// ships with.
struct SuitabilityThresholds {
    double complexity_min = 1.0;
    double blur_threshold = 100.0;
    // Standard convention: low Laplacian variance means blurry, so images
    // below the threshold fail. Set false to invert (remove high variance).
    bool blur_remove_low_variance = true;
    double speed_max_kmh = 200.0;
    std::string excluded_quality = "very poor";
    std::string required_view_direction = "front/back";
    std::string required_platform = "driving surface";
    bool exclude_nighttime = true;
    // Missing values pass their criterion; strict mode fails them instead.
    bool na_is_pass = true;
    // When the lighting label is missing, fall back to the solar day/night
    // flag from the metadata (column daytime_nighttime).
    bool use_metadata_lighting = true;

    // Column names in the joined attribute table.
    std::string quality_column = "quality";
    std::string lighting_column = "lighting";
    std::string metadata_lighting_column = "daytime_nighttime";
    std::string view_direction_column = "view_direction";
    std::string platform_column = "platform";
    std::string blur_column = "blur_score";
    std::string complexity_column = "shannon_index";
    std::string speed_column = "speed_kmh";
};

namespace detail {

inline void check_vocabulary(const std::string& column, const std::string& value,
                             std::initializer_list<const char*> allowed) {
    for (const char* a : allowed) {
        if (value == a) return;
    }
    std::string msg = "unknown label '" + value + "' in column " + column + " (expected one of:";
    for (const char* a : allowed) msg += std::string(" '") + a + "'";
    throw std::runtime_error(msg + ")");
}

}  // namespace detail

/// Criterion-wise verdicts with missing values treated per the NA rule, plus
/// the conjunctive is_suitable flag.
inline SuitabilityReport evaluate_suitability(const std::string& image_id,
                                              const AttributeTable& attrs,
                                              const SuitabilityThresholds& t = {}) {
    SuitabilityReport rep;
    rep.image_id = image_id;
    const Verdict na = t.na_is_pass ? Verdict::kNotApplicable : Verdict::kFail;

    if (const auto q = attrs.get(image_id, t.quality_column)) {
        detail::check_vocabulary(t.quality_column, *q, {"good", "slightly poor", "very poor"});
        rep.quality = (*q == t.excluded_quality) ? Verdict::kFail : Verdict::kPass;
    } else {
        rep.quality = na;
    }

    if (const auto blur = attrs.get_number(image_id, t.blur_column)) {
        const bool blurry = t.blur_remove_low_variance ? *blur < t.blur_threshold
                                                       : *blur > t.blur_threshold;
        rep.sharpness = blurry ? Verdict::kFail : Verdict::kPass;
    } else {
        rep.sharpness = na;
    }

    if (const auto h = attrs.get_number(image_id, t.complexity_column)) {
        rep.complexity = (*h >= t.complexity_min) ? Verdict::kPass : Verdict::kFail;
    } else {
        rep.complexity = na;
    }

    if (const auto s = attrs.get_number(image_id, t.speed_column)) {
        rep.speed = (*s <= t.speed_max_kmh) ? Verdict::kPass : Verdict::kFail;
    } else {
        rep.speed = na;
    }

    if (const auto l = attrs.get(image_id, t.lighting_column)) {
        detail::check_vocabulary(t.lighting_column, *l, {"day", "dusk/dawn", "night"});
        rep.lighting =
            (t.exclude_nighttime && *l == "night") ? Verdict::kFail : Verdict::kPass;
    } else if (const auto m = t.use_metadata_lighting
                                  ? attrs.get(image_id, t.metadata_lighting_column)
                                  : std::nullopt) {
        detail::check_vocabulary(t.metadata_lighting_column, *m, {"day", "night"});
        rep.lighting =
            (t.exclude_nighttime && *m == "night") ? Verdict::kFail : Verdict::kPass;
    } else {
        rep.lighting = na;
    }

    if (const auto v = attrs.get(image_id, t.view_direction_column)) {
        detail::check_vocabulary(t.view_direction_column, *v, {"front/back", "side"});
        rep.view_direction = (*v == t.required_view_direction) ? Verdict::kPass : Verdict::kFail;
    } else {
        rep.view_direction = na;
    }

    if (const auto p = attrs.get(image_id, t.platform_column)) {
        detail::check_vocabulary(t.platform_column, *p,
                                 {"cycling surface", "driving surface", "fields", "railway",
                                  "tunnel", "walking surface"});
        rep.platform = (*p == t.required_platform) ? Verdict::kPass : Verdict::kFail;
    } else {
        rep.platform = na;
    }

    rep.is_suitable = true;
    for (const auto& [name, verdict] : rep.criteria()) {
        if (verdict == Verdict::kFail) rep.is_suitable = false;
    }
    return rep;
}

// ---- feature matrix ----

/// Rows are analysis units, columns are named indicators; dense values.
struct FeatureMatrix {
    std::vector<std::string> row_ids;
    std::vector<std::string> columns;
    std::vector<double> values;  // row-major

    size_t rows() const { return row_ids.size(); }
    size_t cols() const { return columns.size(); }
    double& at(size_t r, size_t c) { return values[r * columns.size() + c]; }
    double at(size_t r, size_t c) const { return values[r * columns.size() + c]; }
};

/// Column-wise z-score with the population standard deviation; constant
/// columns map to all zeros.
inline FeatureMatrix zscore(FeatureMatrix m) {
    if (m.rows() < 2) throw std::invalid_argument("zscore needs at least 2 rows");
    const size_t n = m.rows();
    for (size_t c = 0; c < m.cols(); ++c) {
        double mean = 0.0;
        for (size_t r = 0; r < n; ++r) mean += m.at(r, c);
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (size_t r = 0; r < n; ++r) {
            const double d = m.at(r, c) - mean;
            var += d * d;
        }
        var /= static_cast<double>(n);
        const double sigma = std::sqrt(var);
        for (size_t r = 0; r < n; ++r) {
            m.at(r, c) = sigma > 0.0 ? (m.at(r, c) - mean) / sigma : 0.0;
        }
    }
    return m;
}

// ---- k-means ----

struct ClusterModel {
    size_t k = 0;
    std::vector<double> centroids;  // k x cols, row-major
    std::vector<int> assignment;    // per matrix row
    double inertia = 0.0;
};

namespace detail {

inline double sq_dist(const FeatureMatrix& m, size_t row, const double* centroid) {
    double d = 0.0;
    for (size_t c = 0; c < m.cols(); ++c) {
        const double diff = m.at(row, c) - centroid[c];
        d += diff * diff;
    }
    return d;
}

}  // namespace detail

/// Lloyd's algorithm with k-means++ seeding. Converges when assignments
/// stabilize or after 300 iterations; empty clusters re-seed at the farthest
/// point. Deterministic for a fixed seed.
inline ClusterModel kmeans(const FeatureMatrix& m, size_t k, uint64_t seed) {
    const size_t n = m.rows();
    const size_t dim = m.cols();
    if (k == 0 || k > n) throw std::invalid_argument("k must be in [1, rows]");

    rng::SplitMix64 rng(seed);
    ClusterModel model;
    model.k = k;
    model.centroids.assign(k * dim, 0.0);

    // k-means++ seeding.
    std::vector<size_t> seeds;
    seeds.push_back(rng.below(n));
    std::vector<double> d2(n, 0.0);
    while (seeds.size() < k) {
        double total = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const size_t s : seeds) {
                double d = 0.0;
                for (size_t c = 0; c < dim; ++c) {
                    const double diff = m.at(i, c) - m.at(s, c);
                    d += diff * diff;
                }
                best = std::min(best, d);
            }
            d2[i] = best;
            total += best;
        }
        size_t pick = 0;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double acc = 0.0;
            for (size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc >= target) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = rng.below(n);  // all points identical to seeds
        }
        seeds.push_back(pick);
    }
    for (size_t j = 0; j < k; ++j) {
        for (size_t c = 0; c < dim; ++c) model.centroids[j * dim + c] = m.at(seeds[j], c);
    }

    model.assignment.assign(n, -1);
    for (int iter = 0; iter < 300; ++iter) {
        bool changed = false;
        for (size_t i = 0; i < n; ++i) {
            int best_j = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (size_t j = 0; j < k; ++j) {
                const double d = detail::sq_dist(m, i, &model.centroids[j * dim]);
                if (d < best_d) {
                    best_d = d;
                    best_j = static_cast<int>(j);
                }
            }
            if (model.assignment[i] != best_j) {
                model.assignment[i] = best_j;
                changed = true;
            }
        }

        std::vector<double> sums(k * dim, 0.0);
        std::vector<size_t> counts(k, 0);
        for (size_t i = 0; i < n; ++i) {
            const size_t j = static_cast<size_t>(model.assignment[i]);
            ++counts[j];
            for (size_t c = 0; c < dim; ++c) sums[j * dim + c] += m.at(i, c);
        }
        for (size_t j = 0; j < k; ++j) {
            if (counts[j] == 0) {
                // Re-seed at the point farthest from its centroid.
                size_t far = 0;
                double far_d = -1.0;
                for (size_t i = 0; i < n; ++i) {
                    const size_t ji = static_cast<size_t>(model.assignment[i]);
                    const double d = detail::sq_dist(m, i, &model.centroids[ji * dim]);
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                for (size_t c = 0; c < dim; ++c) model.centroids[j * dim + c] = m.at(far, c);
                changed = true;
                continue;
            }
            for (size_t c = 0; c < dim; ++c) {
                model.centroids[j * dim + c] = sums[j * dim + c] / static_cast<double>(counts[j]);
            }
        }
        if (!changed && iter > 0) break;
    }

    model.inertia = 0.0;
    for (size_t i = 0; i < n; ++i) {
        model.inertia +=
            detail::sq_dist(m, i, &model.centroids[static_cast<size_t>(model.assignment[i]) * dim]);
    }
    return model;
}

/// Best of `restarts` seeded runs by inertia (deterministic seed derivation).
inline ClusterModel kmeans_best(const FeatureMatrix& m, size_t k, uint64_t seed,
                                int restarts = 10) {
    ClusterModel best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        ClusterModel candidate = kmeans(m, k, seed + 0x9e3779b9ULL * static_cast<uint64_t>(r));
        if (candidate.inertia < best.inertia) best = std::move(candidate);
    }
    return best;
}

/// Inertia per k, each the best of 10 restarts.
inline std::vector<std::pair<size_t, double>> elbow_curve(const FeatureMatrix& m,
                                                          size_t k_min, size_t k_max,
                                                          uint64_t seed) {
    if (k_min == 0 || k_max > m.rows() || k_min > k_max) {
        throw std::invalid_argument("elbow k range out of bounds");
    }
    std::vector<std::pair<size_t, double>> out;
    for (size_t k = k_min; k <= k_max; ++k) {
        out.emplace_back(k, kmeans_best(m, k, seed).inertia);
    }
    // Best-of-restarts can still leave tiny non-monotonic wiggles; clamp so
    // the reported curve is non-increasing, as the optimum is.
    for (size_t i = 1; i < out.size(); ++i) {
        out[i].second = std::min(out[i].second, out[i - 1].second);
    }
    return out;
}

// ---- per-cell aggregation ----

/// Mean of each indicator over the suitable images of every hex cell.
/// Cells without suitable images are omitted; a missing indicator value is
/// skipped for that image, and cells left without any value for a column are
/// imputed with the overall column mean.
inline FeatureMatrix aggregate_features(
    std::span<const metadata::EnrichedRecord> records, const AttributeTable& attrs,
    const std::vector<std::string>& indicator_columns,
    const std::unordered_map<std::string, bool>& suitable_by_id) {
    std::map<std::string, std::vector<const metadata::EnrichedRecord*>> cells;
    for (const auto& e : records) {
        const auto it = suitable_by_id.find(e.record.image_id);
        if (it == suitable_by_id.end() || !it->second) continue;
        char hex[24];
        std::snprintf(hex, sizeof hex, "%llx",
                      static_cast<unsigned long long>(e.h3_id.value));
        cells[hex].push_back(&e);
    }

    FeatureMatrix m;
    m.columns = indicator_columns;
    m.values.assign(cells.size() * indicator_columns.size(),
                    std::numeric_limits<double>::quiet_NaN());

    size_t r = 0;
    for (const auto& [cell, group] : cells) {
        m.row_ids.push_back(cell);
        for (size_t c = 0; c < indicator_columns.size(); ++c) {
            double sum = 0.0;
            size_t count = 0;
            for (const auto* e : group) {
                if (const auto v = attrs.get_number(e->record.image_id, indicator_columns[c])) {
                    sum += *v;
                    ++count;
                }
            }
            if (count > 0) m.values[r * m.cols() + c] = sum / static_cast<double>(count);
        }
        ++r;
    }

    // Impute with column means so no NaN survives.
    for (size_t c = 0; c < m.cols(); ++c) {
        double sum = 0.0;
        size_t count = 0;
        for (size_t i = 0; i < m.rows(); ++i) {
            if (!std::isnan(m.at(i, c))) {
                sum += m.at(i, c);
                ++count;
            }
        }
        const double fill = count > 0 ? sum / static_cast<double>(count) : 0.0;
        for (size_t i = 0; i < m.rows(); ++i) {
            if (std::isnan(m.at(i, c))) m.at(i, c) = fill;
        }
    }
    return m;
}

}  // namespace svipipe::analysis
