#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "svipipe/analysis.hpp"
#include "svipipe/geojson.hpp"
#include "svipipe/image.hpp"
#include "svipipe/metadata.hpp"
#include "svipipe/rng.hpp"

// File-emitting plots: histograms, kernel-density curves, point/line/hex
// maps (SVG + data sidecar) and raster image grids. Every artifact has a
// sidecar from which it can be reproduced.

namespace svipipe::viz {

// ---- color ----

/// Perceptually uniform 256-step ramp (viridis anchor points, lerped).
inline std::array<uint8_t, 3> colormap(double t) {
    static constexpr double anchors[][3] = {
        {0.267004, 0.004874, 0.329415}, {0.282623, 0.140926, 0.457517},
        {0.253935, 0.265254, 0.529983}, {0.206756, 0.371758, 0.553117},
        {0.163625, 0.471133, 0.558148}, {0.127568, 0.566949, 0.550556},
        {0.134692, 0.658636, 0.517649}, {0.266941, 0.748751, 0.440573},
        {0.477504, 0.821444, 0.318195}, {0.741388, 0.873449, 0.149561},
        {0.993248, 0.906157, 0.143936}};
    t = std::clamp(t, 0.0, 1.0);
    const double pos = t * 10.0;
    const int i = std::min(static_cast<int>(pos), 9);
    const double f = pos - i;
    std::array<uint8_t, 3> rgb{};
    for (int c = 0; c < 3; ++c) {
        const double v = anchors[i][c] * (1.0 - f) + anchors[i + 1][c] * f;
        rgb[c] = static_cast<uint8_t>(std::lround(v * 255.0));
    }
    return rgb;
}

inline std::string color_hex(const std::array<uint8_t, 3>& rgb) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
    return buf;
}

// ---- SVG scaffolding ----

class Svg {
  public:
    Svg(double width, double height) : width_(width), height_(height) {
        body_ << std::fixed << std::setprecision(2);
    }

    void rect(double x, double y, double w, double h, const std::string& fill,
              const std::string& stroke = "none") {
        body_ << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w << "\" height=\""
              << h << "\" fill=\"" << fill << "\" stroke=\"" << stroke << "\"/>\n";
    }

    void circle(double cx, double cy, double r, const std::string& fill) {
        body_ << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << r << "\" fill=\""
              << fill << "\"/>\n";
    }

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double width = 1.0) {
        body_ << "<line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2 << "\" y2=\""
              << y2 << "\" stroke=\"" << stroke << "\" stroke-width=\"" << width << "\"/>\n";
    }

    void poly(std::span<const std::pair<double, double>> pts, const std::string& fill,
              const std::string& stroke, double stroke_width = 1.0, bool close = true) {
        body_ << (close ? "<polygon" : "<polyline") << " points=\"";
        for (const auto& [x, y] : pts) body_ << x << ',' << y << ' ';
        body_ << "\" fill=\"" << fill << "\" stroke=\"" << stroke << "\" stroke-width=\""
              << stroke_width << "\"/>\n";
    }

    void text(double x, double y, const std::string& s, int size = 11,
              const std::string& anchor = "start") {
        body_ << "<text x=\"" << x << "\" y=\"" << y << "\" font-size=\"" << size
              << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor << "\">" << escape(s)
              << "</text>\n";
    }

    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write SVG: " + path);
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_
            << "\" height=\"" << height_ << "\" viewBox=\"0 0 " << width_ << ' ' << height_
            << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
            << body_.str() << "</svg>\n";
    }

  private:
    static std::string escape(const std::string& s) {
        std::string out;
        for (const char c : s) {
            switch (c) {
                case '<': out += "&lt;"; break;
                case '>': out += "&gt;"; break;
                case '&': out += "&amp;"; break;
                default: out += c;
            }
        }
        return out;
    }

    double width_;
    double height_;
    std::ostringstream body_;
};

/// Vertical color-scale legend with min/max labels.
inline void draw_legend(Svg& svg, double x, double y, double h, double vmin, double vmax) {
    constexpr int kSteps = 64;
    const double step_h = h / kSteps;
    for (int i = 0; i < kSteps; ++i) {
        const double t = 1.0 - static_cast<double>(i) / (kSteps - 1);
        svg.rect(x, y + i * step_h, 14, step_h + 0.5, color_hex(colormap(t)));
    }
    std::ostringstream top, bottom;
    top << std::setprecision(4) << vmax;
    bottom << std::setprecision(4) << vmin;
    svg.text(x + 18, y + 10, top.str());
    svg.text(x + 18, y + h, bottom.str());
}

// ---- histogram ----

struct Histogram {
    std::vector<double> edges;    // nbins + 1
    std::vector<int64_t> counts;  // nbins
};

/// Uniform bins over [min, max]; bins are left-closed right-open except the
/// last, which is closed. A constant sample occupies a single unit-wide bin.
inline Histogram compute_histogram(std::span<const double> values, int nbins) {
    if (values.empty()) throw std::invalid_argument("histogram of empty input");
    if (nbins < 1) throw std::invalid_argument("need at least one bin");

    double lo = *std::min_element(values.begin(), values.end());
    double hi = *std::max_element(values.begin(), values.end());
    if (lo == hi) hi = lo + 1.0;

    Histogram h;
    h.edges.resize(nbins + 1);
    for (int i = 0; i <= nbins; ++i) {
        h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / nbins;
    }
    h.counts.assign(nbins, 0);
    for (const double v : values) {
        int bin = static_cast<int>((v - lo) / (hi - lo) * nbins);
        bin = std::clamp(bin, 0, nbins - 1);
        ++h.counts[bin];
    }
    return h;
}

inline void render_histogram(std::span<const double> values, int nbins,
                             const std::string& svg_path, const std::string& csv_path,
                             const std::string& label = "") {
    const Histogram h = compute_histogram(values, nbins);

    csv::Table side;
    side.header = {"bin_start", "bin_end", "count"};
    for (size_t i = 0; i < h.counts.size(); ++i) {
        side.rows.push_back({std::to_string(h.edges[i]), std::to_string(h.edges[i + 1]),
                             std::to_string(h.counts[i])});
    }
    csv::write_file(csv_path, side);

    constexpr double kW = 640, kH = 400, kMargin = 48;
    Svg svg(kW, kH);
    const int64_t max_count = *std::max_element(h.counts.begin(), h.counts.end());
    const double plot_w = kW - 2 * kMargin;
    const double plot_h = kH - 2 * kMargin;
    const double bar_w = plot_w / static_cast<double>(h.counts.size());

    for (size_t i = 0; i < h.counts.size(); ++i) {
        const double frac =
            max_count > 0 ? static_cast<double>(h.counts[i]) / static_cast<double>(max_count)
                          : 0.0;
        const double bh = frac * plot_h;
        svg.rect(kMargin + i * bar_w, kMargin + plot_h - bh, bar_w * 0.92, bh,
                 color_hex(colormap(0.35)), "#333333");
    }
    svg.line(kMargin, kMargin + plot_h, kMargin + plot_w, kMargin + plot_h, "#000000");
    svg.line(kMargin, kMargin, kMargin, kMargin + plot_h, "#000000");

    std::ostringstream lo, hi, top;
    lo << std::setprecision(5) << h.edges.front();
    hi << std::setprecision(5) << h.edges.back();
    top << max_count;
    svg.text(kMargin, kH - kMargin / 3, lo.str());
    svg.text(kMargin + plot_w, kH - kMargin / 3, hi.str(), 11, "end");
    svg.text(kMargin - 4, kMargin + 4, top.str(), 11, "end");
    if (!label.empty()) svg.text(kW / 2, kMargin / 2, label, 13, "middle");
    svg.save(svg_path);
}

// ---- kernel density ----

struct Kde {
    std::vector<double> xs;       // 256 sample positions
    std::vector<double> density;  // matching densities
    double bandwidth = 0.0;
    bool bandwidth_fallback = false;
};

/// Gaussian-kernel density on 256 points spanning [min-3h, max+3h].
/// `bandwidth` <= 0 selects Silverman's rule; zero-variance input falls back
/// to a fixed small bandwidth.
inline Kde compute_kde(std::span<const double> values, double bandwidth = 0.0) {
    if (values.size() < 2) throw std::invalid_argument("kde needs at least 2 values");

    const size_t n = values.size();
    const double lo = *std::min_element(values.begin(), values.end());
    const double hi = *std::max_element(values.begin(), values.end());

    Kde k;
    if (bandwidth > 0.0) {
        k.bandwidth = bandwidth;
    } else {
        double mean = 0.0;
        for (const double v : values) mean += v;
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (const double v : values) var += (v - mean) * (v - mean);
        var /= static_cast<double>(n - 1);
        const double sigma = std::sqrt(var);

        std::vector<double> sorted(values.begin(), values.end());
        std::sort(sorted.begin(), sorted.end());
        const double q1 = sorted[static_cast<size_t>(0.25 * (n - 1))];
        const double q3 = sorted[static_cast<size_t>(0.75 * (n - 1))];
        const double iqr = q3 - q1;

        double spread = sigma;
        if (iqr > 0.0) spread = std::min(spread, iqr / 1.34);
        if (spread <= 0.0) {
            k.bandwidth = 0.1;  // degenerate sample
            k.bandwidth_fallback = true;
        } else {
            k.bandwidth = 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
        }
    }

    constexpr int kSamples = 256;
    const double x0 = lo - 3.0 * k.bandwidth;
    const double x1 = hi + 3.0 * k.bandwidth;
    k.xs.resize(kSamples);
    k.density.resize(kSamples);
    const double norm = 1.0 / (static_cast<double>(n) * k.bandwidth * std::sqrt(2.0 * 3.14159265358979323846));
    for (int i = 0; i < kSamples; ++i) {
        const double x = x0 + (x1 - x0) * static_cast<double>(i) / (kSamples - 1);
        double acc = 0.0;
        for (const double v : values) {
            const double u = (x - v) / k.bandwidth;
            acc += std::exp(-0.5 * u * u);
        }
        k.xs[i] = x;
        k.density[i] = acc * norm;
    }
    return k;
}

inline void render_kde(std::span<const double> values, double bandwidth,
                       const std::string& svg_path, const std::string& csv_path,
                       const std::string& label = "") {
    const Kde k = compute_kde(values, bandwidth);

    csv::Table side;
    side.header = {"x", "density"};
    for (size_t i = 0; i < k.xs.size(); ++i) {
        char xs[32], ds[32];
        std::snprintf(xs, sizeof xs, "%.9g", k.xs[i]);
        std::snprintf(ds, sizeof ds, "%.9g", k.density[i]);
        side.rows.push_back({xs, ds});
    }
    csv::write_file(csv_path, side);

    constexpr double kW = 640, kH = 400, kMargin = 48;
    Svg svg(kW, kH);
    const double dmax = *std::max_element(k.density.begin(), k.density.end());
    const double plot_w = kW - 2 * kMargin;
    const double plot_h = kH - 2 * kMargin;

    std::vector<std::pair<double, double>> pts;
    pts.reserve(k.xs.size());
    for (size_t i = 0; i < k.xs.size(); ++i) {
        const double px =
            kMargin + (k.xs[i] - k.xs.front()) / (k.xs.back() - k.xs.front()) * plot_w;
        const double py =
            kMargin + plot_h - (dmax > 0 ? k.density[i] / dmax : 0.0) * plot_h;
        pts.emplace_back(px, py);
    }
    svg.poly(pts, "none", color_hex(colormap(0.35)), 1.6, false);
    svg.line(kMargin, kMargin + plot_h, kMargin + plot_w, kMargin + plot_h, "#000000");
    svg.line(kMargin, kMargin, kMargin, kMargin + plot_h, "#000000");
    if (!label.empty()) svg.text(kW / 2, kMargin / 2, label, 13, "middle");
    svg.save(svg_path);
}

// ---- maps ----

struct MapExtent {
    double min_lat = 0, min_lon = 0, max_lat = 0, max_lon = 0;

    void expand(double lat, double lon) {
        min_lat = std::min(min_lat, lat);
        max_lat = std::max(max_lat, lat);
        min_lon = std::min(min_lon, lon);
        max_lon = std::max(max_lon, lon);
    }
};

namespace detail {

// Equirectangular projection of the data extent into an SVG viewport.
struct MapProjection {
    double min_lat, min_lon, max_lat, max_lon;
    double width, height, margin;

    static MapProjection fit(const MapExtent& e, double width, double margin) {
        MapProjection p;
        p.min_lat = e.min_lat;
        p.min_lon = e.min_lon;
        p.max_lat = e.max_lat;
        p.max_lon = e.max_lon;
        const double dlat = std::max(e.max_lat - e.min_lat, 1e-6);
        const double dlon = std::max(e.max_lon - e.min_lon, 1e-6);
        const double mid_lat = (e.min_lat + e.max_lat) / 2.0;
        const double aspect =
            (dlat / (dlon * std::cos(mid_lat * 3.14159265358979323846 / 180.0)));
        p.width = width;
        p.height = std::clamp(width * aspect, width * 0.25, width * 2.0);
        p.margin = margin;
        return p;
    }

    std::pair<double, double> to_px(double lat, double lon) const {
        const double dlat = std::max(max_lat - min_lat, 1e-6);
        const double dlon = std::max(max_lon - min_lon, 1e-6);
        const double x = margin + (lon - min_lon) / dlon * (width - 2 * margin);
        const double y = margin + (max_lat - lat) / dlat * (height - 2 * margin);
        return {x, y};
    }

    double total_width() const { return width + 110; }  // room for the legend
};

}  // namespace detail

enum class MapKind { kPoint, kLine, kHex };

struct MapSpec {
    MapKind kind = MapKind::kPoint;
    std::string variable;  // empty = count (line/hex) or plain markers (point)
    double width = 720;
    std::string title;
};

struct MapLayer {
    // One entry per drawable: points carry a single coordinate, lines or hex
    // cells carry their geometry.
    struct Item {
        std::vector<std::pair<double, double>> latlon;  // geometry
        std::optional<double> value;
        std::string id;
    };
    std::vector<Item> items;
    bool closed = false;  // polygons vs polylines
};

/// Renders items colored by value on a linear scale with a legend, and writes
/// the companion GeoJSON carrying the plotted values.
inline void render_map_layer(const MapLayer& layer, const MapSpec& spec,
                             const std::string& svg_path, const std::string& geojson_path) {
    if (layer.items.empty()) throw std::invalid_argument("map has no geometry");

    MapExtent extent;
    extent.min_lat = extent.max_lat = layer.items.front().latlon.front().first;
    extent.min_lon = extent.max_lon = layer.items.front().latlon.front().second;
    for (const auto& item : layer.items) {
        for (const auto& [lat, lon] : item.latlon) extent.expand(lat, lon);
    }

    double vmin = 0.0, vmax = 0.0;
    bool has_values = false;
    for (const auto& item : layer.items) {
        if (item.value) {
            if (!has_values) {
                vmin = vmax = *item.value;
                has_values = true;
            } else {
                vmin = std::min(vmin, *item.value);
                vmax = std::max(vmax, *item.value);
            }
        }
    }

    const auto proj = detail::MapProjection::fit(extent, spec.width, 24.0);
    Svg svg(proj.total_width(), proj.height);

    auto value_color = [&](const std::optional<double>& v) {
        if (!v || !has_values) return color_hex(colormap(0.35));
        const double t = vmax > vmin ? (*v - vmin) / (vmax - vmin) : 0.5;
        return color_hex(colormap(t));
    };

    std::vector<nlohmann::json> features;
    for (const auto& item : layer.items) {
        std::vector<std::pair<double, double>> px;
        px.reserve(item.latlon.size());
        for (const auto& [lat, lon] : item.latlon) px.push_back(proj.to_px(lat, lon));

        nlohmann::json props{{"id", item.id}};
        if (item.value) props["value"] = *item.value;

        if (item.latlon.size() == 1) {
            svg.circle(px[0].first, px[0].second, 3.0, value_color(item.value));
            features.push_back(geojson::point_feature(
                geo::GeoPoint(item.latlon[0].first, item.latlon[0].second), props));
        } else if (layer.closed) {
            svg.poly(px, value_color(item.value), "#444444", 0.5, true);
            std::vector<geo::GeoPoint> ring;
            for (const auto& [lat, lon] : item.latlon) ring.emplace_back(lat, lon);
            features.push_back(geojson::polygon_feature(ring, props));
        } else {
            svg.poly(px, "none", value_color(item.value), 2.0, false);
            std::vector<geo::GeoPoint> line;
            for (const auto& [lat, lon] : item.latlon) line.emplace_back(lat, lon);
            features.push_back(geojson::line_feature(line, props));
        }
    }

    if (has_values) draw_legend(svg, proj.width + 10, 24, proj.height - 60, vmin, vmax);
    if (!spec.title.empty()) svg.text(proj.width / 2, 16, spec.title, 13, "middle");
    svg.save(svg_path);

    std::ofstream out(geojson_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write GeoJSON: " + geojson_path);
    out << geojson::feature_collection(std::move(features)).dump(2) << "\n";
}

/// Point map of raw record locations, optionally colored by a value per id.
inline void render_point_map(std::span<const ImageRecord> records,
                             const std::map<std::string, double>& values, const MapSpec& spec,
                             const std::string& svg_path, const std::string& geojson_path) {
    MapLayer layer;
    for (const auto& r : records) {
        MapLayer::Item item;
        item.id = r.image_id;
        item.latlon = {{r.location.lat, r.location.lon}};
        if (!spec.variable.empty()) {
            const auto it = values.find(r.image_id);
            if (it != values.end()) item.value = it->second;
        }
        layer.items.push_back(std::move(item));
    }
    render_map_layer(layer, spec, svg_path, geojson_path);
}

/// Hex map: one polygon per H3 cell keyed by hex string, colored by value.
inline void render_hex_map(const std::map<std::string, double>& cell_values,
                           const MapSpec& spec, const std::string& svg_path,
                           const std::string& geojson_path) {
    MapLayer layer;
    layer.closed = true;
    for (const auto& [hex, value] : cell_values) {
        MapLayer::Item item;
        item.id = hex;
        item.value = value;
        const uint64_t cell = std::stoull(hex, nullptr, 16);
        for (const auto& [lat, lon] : h3::cell_to_boundary(cell)) {
            item.latlon.emplace_back(lat, lon);
        }
        layer.items.push_back(std::move(item));
    }
    render_map_layer(layer, spec, svg_path, geojson_path);
}

/// Line map: one polyline per street segment, colored by value.
inline void render_line_map(std::span<const geo::StreetSegment> segments,
                            const std::map<std::string, double>& segment_values,
                            const MapSpec& spec, const std::string& svg_path,
                            const std::string& geojson_path) {
    MapLayer layer;
    for (const auto& seg : segments) {
        const auto it = segment_values.find(seg.id);
        if (it == segment_values.end()) continue;
        MapLayer::Item item;
        item.id = seg.id;
        item.value = it->second;
        for (const auto& p : seg.polyline) item.latlon.emplace_back(p.lat, p.lon);
        layer.items.push_back(std::move(item));
    }
    render_map_layer(layer, spec, svg_path, geojson_path);
}

// ---- image grid ----

struct ImageGridSpec {
    int columns = 4;
    int cell_width = 256;
    int cell_height = 192;
    uint64_t seed = 0;  // shuffle seed when unsorted
};

struct ImageGridResult {
    img::Image composite;
    std::vector<std::string> order;     // tile paths in final order
    std::vector<std::string> skipped;   // unreadable inputs
};

/// Tiles images row-major into a composite. With `sort_scores` the tiles are
/// ordered by ascending score; otherwise a seeded shuffle decides. Unreadable
/// images are skipped with a note.
inline ImageGridResult image_grid(std::span<const std::string> paths,
                                  const ImageGridSpec& spec,
                                  const std::map<std::string, double>* sort_scores = nullptr) {
    if (paths.empty()) throw std::invalid_argument("image grid needs at least one image");
    if (spec.columns < 1) throw std::invalid_argument("columns must be >= 1");

    ImageGridResult result;
    std::vector<std::pair<std::string, img::Image>> tiles;
    for (const auto& path : paths) {
        try {
            tiles.emplace_back(path, img::load(path));
        } catch (const std::exception&) {
            result.skipped.push_back(path);
        }
    }
    if (tiles.empty()) throw std::runtime_error("no readable images for the grid");

    if (sort_scores) {
        std::stable_sort(tiles.begin(), tiles.end(), [&](const auto& a, const auto& b) {
            const auto ia = sort_scores->find(a.first);
            const auto ib = sort_scores->find(b.first);
            const double va = ia == sort_scores->end() ? 0.0 : ia->second;
            const double vb = ib == sort_scores->end() ? 0.0 : ib->second;
            if (va != vb) return va < vb;
            return a.first < b.first;
        });
    } else {
        // Fisher-Yates with a platform-independent generator.
        rng::SplitMix64 rng(spec.seed);
        for (size_t i = tiles.size(); i > 1; --i) {
            const size_t j = rng.below(i);
            std::swap(tiles[i - 1], tiles[j]);
        }
    }

    const int n = static_cast<int>(tiles.size());
    const int rows = (n + spec.columns - 1) / spec.columns;
    result.composite =
        img::Image(spec.columns * spec.cell_width, rows * spec.cell_height, 3);

    for (int i = 0; i < n; ++i) {
        const img::Image resized = img::resize(
            tiles[i].second.channels == 3 ? tiles[i].second : [&] {
                img::Image rgb(tiles[i].second.width, tiles[i].second.height, 3);
                for (int y = 0; y < rgb.height; ++y) {
                    for (int x = 0; x < rgb.width; ++x) {
                        const uint8_t v = tiles[i].second.pixel(x, y)[0];
                        rgb.pixel(x, y)[0] = rgb.pixel(x, y)[1] = rgb.pixel(x, y)[2] = v;
                    }
                }
                return rgb;
            }(),
            spec.cell_width, spec.cell_height);

        const int gx = (i % spec.columns) * spec.cell_width;
        const int gy = (i / spec.columns) * spec.cell_height;
        for (int y = 0; y < spec.cell_height; ++y) {
            std::copy_n(resized.pixel(0, y), static_cast<size_t>(spec.cell_width) * 3,
                        result.composite.pixel(gx, gy + y));
        }
        result.order.push_back(tiles[i].first);
    }
    return result;
}

}  // namespace svipipe::viz
