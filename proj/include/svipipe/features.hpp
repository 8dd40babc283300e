#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "svipipe/csv.hpp"
#include "svipipe/image.hpp"

// Classical image features: edge maps, blur scoring, blob detection, HSL
// statistics, Shannon complexity over segment ratios, and embedding-vector
// utilities (cosine distance, knn, 2D projection).

namespace svipipe::features {

// ---- convolution and edge maps ----

enum class EdgeMethod { kCanny, kSobelX, kSobelY, kLaplacian };

inline EdgeMethod edge_method_from_name(const std::string& name) {
    if (name == "canny") return EdgeMethod::kCanny;
    if (name == "sobel_x") return EdgeMethod::kSobelX;
    if (name == "sobel_y") return EdgeMethod::kSobelY;
    if (name == "laplacian") return EdgeMethod::kLaplacian;
    throw std::invalid_argument("unknown edge method: " + name);
}

namespace detail {

// Reflect index into [0, n): -1 -> 0, -2 -> 1, n -> n-1. This border rule
// makes the Laplacian response sum to zero exactly.
inline int reflect(int i, int n) {
    while (i < 0 || i >= n) i = i < 0 ? -i - 1 : 2 * n - 1 - i;
    return i;
}

}  // namespace detail

/// 3x3 correlation with reflect padding.
inline img::GrayF correlate3(const img::GrayF& src, const float k[3][3]) {
    img::GrayF out(src.width, src.height);
    for (int y = 0; y < src.height; ++y) {
        for (int x = 0; x < src.width; ++x) {
            float acc = 0.f;
            for (int dy = -1; dy <= 1; ++dy) {
                const int sy = detail::reflect(y + dy, src.height);
                for (int dx = -1; dx <= 1; ++dx) {
                    const int sx = detail::reflect(x + dx, src.width);
                    acc += k[dy + 1][dx + 1] * src.at(sx, sy);
                }
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

inline img::GrayF sobel_x(const img::GrayF& src) {
    static constexpr float k[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
    return correlate3(src, k);
}

inline img::GrayF sobel_y(const img::GrayF& src) {
    static constexpr float k[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
    return correlate3(src, k);
}

// Discrete Laplacian, kernel [[0,1,0],[1,-4,1],[0,1,0]].
inline img::GrayF laplacian(const img::GrayF& src) {
    static constexpr float k[3][3] = {{0, 1, 0}, {1, -4, 1}, {0, 1, 0}};
    return correlate3(src, k);
}

struct CannyParams {
    double sigma = 1.4;
    double low_threshold = 50.0;
    double high_threshold = 150.0;
};

/// Canny edge map: Gaussian blur, Sobel gradient, non-maximum suppression and
/// hysteresis. Returns a binary map (0 or 255). Thresholds apply to the raw
/// L2 gradient magnitude.
inline img::GrayF canny(const img::GrayF& src, const CannyParams& params = {}) {
    const int w = src.width;
    const int h = src.height;

    // Separable Gaussian blur.
    const int radius = std::max(1, static_cast<int>(std::lround(3.0 * params.sigma)));
    std::vector<float> kernel(2 * radius + 1);
    float sum = 0.f;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] =
            std::exp(static_cast<float>(-(i * i) / (2.0 * params.sigma * params.sigma)));
        sum += kernel[i + radius];
    }
    for (auto& v : kernel) v /= sum;

    img::GrayF tmp(w, h), blurred(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            float acc = 0.f;
            for (int i = -radius; i <= radius; ++i) {
                acc += kernel[i + radius] * src.at(detail::reflect(x + i, w), y);
            }
            tmp.at(x, y) = acc;
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            float acc = 0.f;
            for (int i = -radius; i <= radius; ++i) {
                acc += kernel[i + radius] * tmp.at(x, detail::reflect(y + i, h));
            }
            blurred.at(x, y) = acc;
        }
    }

    const img::GrayF gx = sobel_x(blurred);
    const img::GrayF gy = sobel_y(blurred);

    img::GrayF mag(w, h);
    for (size_t i = 0; i < mag.v.size(); ++i) mag.v[i] = std::hypot(gx.v[i], gy.v[i]);

    // Non-maximum suppression along the quantized gradient direction.
    img::GrayF thin(w, h);
    static constexpr int dirs[4][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const float m = mag.at(x, y);
            if (m == 0.f) continue;
            double angle = std::atan2(gy.at(x, y), gx.at(x, y));
            if (angle < 0) angle += 3.14159265358979323846;
            const int sector =
                static_cast<int>(angle / (3.14159265358979323846 / 4.0) + 0.5) % 4;
            const int nx = dirs[sector][0];
            const int ny = dirs[sector][1];
            const float m1 = mag.at(detail::reflect(x + nx, w), detail::reflect(y + ny, h));
            const float m2 = mag.at(detail::reflect(x - nx, w), detail::reflect(y - ny, h));
            if (m >= m1 && m >= m2) thin.at(x, y) = m;
        }
    }

    // Hysteresis: strong seeds grow into connected weak pixels.
    img::GrayF out(w, h);
    std::vector<std::pair<int, int>> stack;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (thin.at(x, y) >= params.high_threshold && out.at(x, y) == 0.f) {
                out.at(x, y) = 255.f;
                stack.emplace_back(x, y);
                while (!stack.empty()) {
                    const auto [cx, cy] = stack.back();
                    stack.pop_back();
                    for (int dy = -1; dy <= 1; ++dy) {
                        for (int dx = -1; dx <= 1; ++dx) {
                            const int px = cx + dx;
                            const int py = cy + dy;
                            if (px < 0 || px >= w || py < 0 || py >= h) continue;
                            if (out.at(px, py) == 0.f &&
                                thin.at(px, py) >= params.low_threshold) {
                                out.at(px, py) = 255.f;
                                stack.emplace_back(px, py);
                            }
                        }
                    }
                }
            }
        }
    }
    return out;
}

/// Signed convolution response for the requested method; canny yields a
/// binary 0/255 map.
inline img::GrayF edge_map(const img::GrayF& image, EdgeMethod method) {
    if (image.width < 3 || image.height < 3) {
        throw std::invalid_argument("image too small for edge detection (min 3x3)");
    }
    switch (method) {
        case EdgeMethod::kSobelX: return sobel_x(image);
        case EdgeMethod::kSobelY: return sobel_y(image);
        case EdgeMethod::kLaplacian: return laplacian(image);
        case EdgeMethod::kCanny: return canny(image);
    }
    throw std::logic_error("unreachable");
}

/// Variance of the Laplacian response; higher means sharper.
inline double blur_score(const img::GrayF& image) {
    const img::GrayF lap = laplacian(image);
    double mean = 0.0;
    for (const float v : lap.v) mean += v;
    mean /= static_cast<double>(lap.v.size());
    double var = 0.0;
    for (const float v : lap.v) var += (v - mean) * (v - mean);
    return var / static_cast<double>(lap.v.size());
}

// ---- blob detection ----

struct Blob {
    double centroid_x = 0.0;
    double centroid_y = 0.0;
    int64_t area = 0;
};

/// Connected bright regions (8-connectivity) above `threshold` with area of
/// at least `min_area`, in scan order of their first pixel.
inline std::vector<Blob> blob_detect(const img::GrayF& image, int64_t min_area = 1,
                                     float threshold = 128.f) {
    const int w = image.width;
    const int h = image.height;
    std::vector<uint8_t> visited(static_cast<size_t>(w) * h, 0);
    std::vector<Blob> blobs;
    std::vector<std::pair<int, int>> stack;

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const size_t idx = static_cast<size_t>(y) * w + x;
            if (visited[idx] || image.at(x, y) < threshold) continue;

            double sum_x = 0.0, sum_y = 0.0;
            int64_t area = 0;
            visited[idx] = 1;
            stack.emplace_back(x, y);
            while (!stack.empty()) {
                const auto [cx, cy] = stack.back();
                stack.pop_back();
                sum_x += cx;
                sum_y += cy;
                ++area;
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int px = cx + dx;
                        const int py = cy + dy;
                        if (px < 0 || px >= w || py < 0 || py >= h) continue;
                        const size_t pidx = static_cast<size_t>(py) * w + px;
                        if (!visited[pidx] && image.at(px, py) >= threshold) {
                            visited[pidx] = 1;
                            stack.emplace_back(px, py);
                        }
                    }
                }
            }
            if (area >= min_area) {
                blobs.push_back({sum_x / area, sum_y / area, area});
            }
        }
    }
    return blobs;
}

// ---- HSL statistics ----

struct HslStats {
    double mean_hue_deg = 0.0;       // circular mean, [0, 360)
    double hue_resultant = 0.0;      // mean resultant length, 0 = ill-conditioned
    double mean_saturation = 0.0;    // [0, 1]
    double mean_lightness = 0.0;     // [0, 1]
};

/// Per-channel HSL means; hue is averaged circularly with its resultant
/// length reported (near zero means the mean hue is meaningless). Achromatic
/// pixels contribute hue 0.
inline HslStats hsl_stats(const img::Image& image) {
    if (image.channels != 3) throw std::invalid_argument("hsl_stats expects an RGB image");

    double sum_sin = 0.0, sum_cos = 0.0, sum_s = 0.0, sum_l = 0.0;
    const size_t n = static_cast<size_t>(image.width) * image.height;
    for (size_t i = 0; i < n; ++i) {
        const double r = image.data[3 * i] / 255.0;
        const double g = image.data[3 * i + 1] / 255.0;
        const double b = image.data[3 * i + 2] / 255.0;
        const double maxc = std::max({r, g, b});
        const double minc = std::min({r, g, b});
        const double l = (maxc + minc) / 2.0;
        const double c = maxc - minc;

        double hue = 0.0;
        double sat = 0.0;
        if (c > 0.0) {
            if (maxc == r) hue = std::fmod((g - b) / c, 6.0);
            else if (maxc == g) hue = (b - r) / c + 2.0;
            else hue = (r - g) / c + 4.0;
            hue *= 60.0;
            if (hue < 0.0) hue += 360.0;
            sat = c / (1.0 - std::fabs(2.0 * l - 1.0));
        }

        const double hue_rad = hue * 3.14159265358979323846 / 180.0;
        sum_sin += std::sin(hue_rad);
        sum_cos += std::cos(hue_rad);
        sum_s += sat;
        sum_l += l;
    }

    HslStats out;
    double mean = std::atan2(sum_sin, sum_cos) * 180.0 / 3.14159265358979323846;
    if (mean < 0.0) mean += 360.0;
    out.mean_hue_deg = mean;
    out.hue_resultant = std::hypot(sum_sin, sum_cos) / static_cast<double>(n);
    out.mean_saturation = sum_s / static_cast<double>(n);
    out.mean_lightness = sum_l / static_cast<double>(n);
    return out;
}

// ---- Shannon index ----

/// Natural-log Shannon entropy over normalized ratios; zero entries
/// contribute nothing. Errors when every ratio is zero.
inline double shannon_index(const std::map<std::string, double>& ratios) {
    double total = 0.0;
    for (const auto& [label, p] : ratios) {
        if (p < 0.0) throw std::invalid_argument("negative segment ratio: " + label);
        total += p;
    }
    if (total <= 0.0) throw std::invalid_argument("all segment ratios are zero");

    double h = 0.0;
    for (const auto& [label, p] : ratios) {
        if (p <= 0.0) continue;
        const double q = p / total;
        h -= q * std::log(q);
    }
    return h;
}

// ---- embedding utilities ----

/// 1 - A.B / (|A| x |B|). In [0, 1] for entrywise non-negative vectors, up to
/// 2 in general.
inline double cosine_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("embedding dimension mismatch");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) {
        throw std::invalid_argument("cosine distance undefined for zero vectors");
    }
    return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
}

struct Embedding {
    std::string id;
    std::vector<double> values;
};

struct Neighbor {
    std::string id;
    double distance = 0.0;
};

/// Exact k nearest by cosine distance, ascending; equal distances order by id.
inline std::vector<Neighbor> knn_query(std::span<const double> query,
                                       std::span<const Embedding> corpus, size_t k) {
    if (corpus.empty()) throw std::invalid_argument("empty embedding corpus");
    if (k > corpus.size()) throw std::invalid_argument("k exceeds corpus size");

    std::vector<Neighbor> all;
    all.reserve(corpus.size());
    for (const auto& e : corpus) {
        all.push_back({e.id, cosine_distance(query, e.values)});
    }
    std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        return a.id < b.id;
    });
    all.resize(k);
    return all;
}

struct Pca2d {
    std::vector<std::array<double, 2>> coords;  // one per input vector
    std::array<double, 2> explained_variance{};
    bool rank_deficient = false;  // second axis zeroed
};

namespace detail {

// Jacobi eigensolver for a symmetric matrix (row-major n x n). Returns
// eigenvalues and eigenvectors in matching column order.
inline void jacobi_eigen(std::vector<double>& a, int n, std::vector<double>& eigvals,
                         std::vector<double>& eigvecs) {
    eigvecs.assign(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) eigvecs[static_cast<size_t>(i) * n + i] = 1.0;

    auto at = [&](std::vector<double>& m, int r, int c) -> double& {
        return m[static_cast<size_t>(r) * n + c];
    };

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) off += at(a, p, q) * at(a, p, q);
        }
        if (off < 1e-24) break;

        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(a, p, q);
                if (std::fabs(apq) < 1e-300) continue;
                const double theta = (at(a, q, q) - at(a, p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int i = 0; i < n; ++i) {
                    const double aip = at(a, i, p);
                    const double aiq = at(a, i, q);
                    at(a, i, p) = c * aip - s * aiq;
                    at(a, i, q) = s * aip + c * aiq;
                }
                for (int i = 0; i < n; ++i) {
                    const double api = at(a, p, i);
                    const double aqi = at(a, q, i);
                    at(a, p, i) = c * api - s * aqi;
                    at(a, q, i) = s * api + c * aqi;
                }
                for (int i = 0; i < n; ++i) {
                    const double vip = at(eigvecs, i, p);
                    const double viq = at(eigvecs, i, q);
                    at(eigvecs, i, p) = c * vip - s * viq;
                    at(eigvecs, i, q) = s * vip + c * viq;
                }
            }
        }
    }

    eigvals.resize(n);
    for (int i = 0; i < n; ++i) eigvals[i] = a[static_cast<size_t>(i) * n + i];
}

}  // namespace detail

/// Projection onto the top-2 principal components of the mean-centered
/// corpus. Components are sign-fixed so the largest-magnitude loading is
/// positive. Rank-deficient corpora get a zeroed second axis.
inline Pca2d pca_2d(std::span<const Embedding> corpus) {
    const size_t n = corpus.size();
    if (n < 3) throw std::invalid_argument("pca_2d needs at least 3 vectors");
    const size_t dim = corpus.front().values.size();
    if (dim < 2) throw std::invalid_argument("pca_2d needs dimension >= 2");
    for (const auto& e : corpus) {
        if (e.values.size() != dim) throw std::invalid_argument("inconsistent dimensions");
    }

    std::vector<double> mean(dim, 0.0);
    for (const auto& e : corpus) {
        for (size_t d = 0; d < dim; ++d) mean[d] += e.values[d];
    }
    for (auto& m : mean) m /= static_cast<double>(n);

    // Centered data, row-major n x dim.
    std::vector<double> x(n * dim);
    for (size_t i = 0; i < n; ++i) {
        for (size_t d = 0; d < dim; ++d) x[i * dim + d] = corpus[i].values[d] - mean[d];
    }

    // Eigen-decompose the smaller of X^T X (dim x dim) and X X^T (n x n).
    const bool use_gram = n < dim;
    const size_t m = use_gram ? n : dim;
    std::vector<double> a(m * m, 0.0);
    if (use_gram) {
        for (size_t i = 0; i < n; ++i) {
            for (size_t j = i; j < n; ++j) {
                double dot = 0.0;
                for (size_t d = 0; d < dim; ++d) dot += x[i * dim + d] * x[j * dim + d];
                a[i * m + j] = a[j * m + i] = dot;
            }
        }
    } else {
        for (size_t d1 = 0; d1 < dim; ++d1) {
            for (size_t d2 = d1; d2 < dim; ++d2) {
                double dot = 0.0;
                for (size_t i = 0; i < n; ++i) dot += x[i * dim + d1] * x[i * dim + d2];
                a[d1 * m + d2] = a[d2 * m + d1] = dot;
            }
        }
    }

    std::vector<double> eigvals, eigvecs;
    detail::jacobi_eigen(a, static_cast<int>(m), eigvals, eigvecs);

    // Two largest eigenvalues.
    std::vector<size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t i, size_t j) { return eigvals[i] > eigvals[j]; });

    Pca2d out;
    out.coords.assign(n, {0.0, 0.0});

    for (int comp = 0; comp < 2; ++comp) {
        const size_t col = order[comp];
        const double lambda = std::max(eigvals[col], 0.0);
        if (lambda < 1e-12) {
            out.rank_deficient = true;
            continue;  // axis stays zeroed
        }

        // Principal axis in D-space.
        std::vector<double> axis(dim, 0.0);
        if (use_gram) {
            // axis = X^T u / ||.|| where u is the Gram eigenvector.
            for (size_t i = 0; i < n; ++i) {
                const double u = eigvecs[i * m + col];
                for (size_t d = 0; d < dim; ++d) axis[d] += x[i * dim + d] * u;
            }
        } else {
            for (size_t d = 0; d < dim; ++d) axis[d] = eigvecs[d * m + col];
        }
        double norm = 0.0;
        for (const double v : axis) norm += v * v;
        norm = std::sqrt(norm);
        if (norm == 0.0) {
            out.rank_deficient = true;
            continue;
        }
        for (auto& v : axis) v /= norm;

        // Deterministic sign: largest-magnitude loading is positive.
        size_t arg = 0;
        for (size_t d = 1; d < dim; ++d) {
            if (std::fabs(axis[d]) > std::fabs(axis[arg])) arg = d;
        }
        if (axis[arg] < 0.0) {
            for (auto& v : axis) v = -v;
        }

        for (size_t i = 0; i < n; ++i) {
            double proj = 0.0;
            for (size_t d = 0; d < dim; ++d) proj += x[i * dim + d] * axis[d];
            out.coords[i][comp] = proj;
        }
        out.explained_variance[comp] = lambda / static_cast<double>(n);
    }
    return out;
}

// ---- embedding ingestion ----

/// CSV layout: first column is the id, remaining columns are the vector.
inline std::vector<Embedding> read_embeddings_csv(const std::string& path) {
    const csv::Table t = csv::read_file(path);
    if (t.header.size() < 2) throw std::runtime_error("embedding CSV needs id + values");
    std::vector<Embedding> out;
    out.reserve(t.rows.size());
    for (const auto& row : t.rows) {
        Embedding e;
        e.id = row.at(0);
        e.values.reserve(row.size() - 1);
        for (size_t i = 1; i < row.size(); ++i) e.values.push_back(std::stod(row[i]));
        out.push_back(std::move(e));
    }
    return out;
}

/// Raw float32 rows with a JSON sidecar `{"dim": D, "count": N}`; ids are the
/// row indices unless the sidecar carries an "ids" array.
inline std::vector<Embedding> read_embeddings_bin(const std::string& bin_path,
                                                  const std::string& sidecar_path) {
    std::ifstream side(sidecar_path);
    if (!side) throw std::runtime_error("cannot open embedding sidecar: " + sidecar_path);
    nlohmann::json meta;
    side >> meta;
    const size_t dim = meta.at("dim").get<size_t>();
    const size_t count = meta.at("count").get<size_t>();

    std::ifstream in(bin_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open embedding file: " + bin_path);
    std::vector<float> raw(dim * count);
    in.read(reinterpret_cast<char*>(raw.data()),
            static_cast<std::streamsize>(raw.size() * sizeof(float)));
    if (!in) throw std::runtime_error("truncated embedding file: " + bin_path);

    std::vector<std::string> ids;
    if (meta.contains("ids")) ids = meta["ids"].get<std::vector<std::string>>();

    std::vector<Embedding> out;
    out.reserve(count);
    for (size_t i = 0; i < count; ++i) {
        Embedding e;
        e.id = i < ids.size() ? ids[i] : std::to_string(i);
        e.values.assign(raw.begin() + static_cast<ptrdiff_t>(i * dim),
                        raw.begin() + static_cast<ptrdiff_t>((i + 1) * dim));
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace svipipe::features
