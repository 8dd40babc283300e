#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "svipipe/image.hpp"

// Reprojection of equirectangular panoramas into fisheye and perspective
// views, and panorama + depth into colored point clouds.
//
// Panorama pixel mapping: (u, v) <-> lon = (u+0.5)/W*360 - 180,
// lat = 90 - (v+0.5)/H*180, with W = 2H.
//
// Point-cloud axes: x toward lon 0, y toward lon +90, z up.

namespace svipipe::transform {

inline constexpr double kPi = 3.14159265358979323846;

inline void require_equirectangular(const img::Image& pano) {
    if (pano.width != 2 * pano.height) {
        throw std::invalid_argument("not equirectangular: width must equal 2 x height");
    }
}

/// Bilinear sample with horizontal wrap at the +-180 seam and vertical clamp
/// at the poles. Angles in degrees.
inline void sample_pano(const img::Image& pano, double lon_deg, double lat_deg,
                        uint8_t* out) {
    const double u = (lon_deg + 180.0) / 360.0 * pano.width - 0.5;
    const double v = (90.0 - lat_deg) / 180.0 * pano.height - 0.5;

    const double fu = std::floor(u);
    const double fv = std::floor(v);
    const double wu = u - fu;
    const double wv = v - fv;

    auto wrap_x = [&](int x) {
        x %= pano.width;
        return x < 0 ? x + pano.width : x;
    };
    auto clamp_y = [&](int y) { return std::clamp(y, 0, pano.height - 1); };

    const int x0 = wrap_x(static_cast<int>(fu));
    const int x1 = wrap_x(static_cast<int>(fu) + 1);
    const int y0 = clamp_y(static_cast<int>(fv));
    const int y1 = clamp_y(static_cast<int>(fv) + 1);

    for (int c = 0; c < pano.channels; ++c) {
        const double val = pano.pixel(x0, y0)[c] * (1 - wu) * (1 - wv) +
                           pano.pixel(x1, y0)[c] * wu * (1 - wv) +
                           pano.pixel(x0, y1)[c] * (1 - wu) * wv +
                           pano.pixel(x1, y1)[c] * wu * wv;
        out[c] = static_cast<uint8_t>(std::lround(std::clamp(val, 0.0, 255.0)));
    }
}

/// Nearest-neighbor variant for label images.
inline void sample_pano_nearest(const img::Image& pano, double lon_deg, double lat_deg,
                                uint8_t* out) {
    int x = static_cast<int>(std::lround((lon_deg + 180.0) / 360.0 * pano.width - 0.5));
    int y = static_cast<int>(std::lround((90.0 - lat_deg) / 180.0 * pano.height - 0.5));
    x %= pano.width;
    if (x < 0) x += pano.width;
    y = std::clamp(y, 0, pano.height - 1);
    for (int c = 0; c < pano.channels; ++c) out[c] = pano.pixel(x, y)[c];
}

// ---- fisheye ----

enum class FisheyeProjection { kOrthographic, kEquisolid, kEquidistant, kStereographic };

inline FisheyeProjection fisheye_projection_from_name(const std::string& name) {
    if (name == "orthographic") return FisheyeProjection::kOrthographic;
    if (name == "equisolid") return FisheyeProjection::kEquisolid;
    if (name == "equidistant") return FisheyeProjection::kEquidistant;
    if (name == "stereographic") return FisheyeProjection::kStereographic;
    throw std::invalid_argument("unknown fisheye projection: " + name);
}

/// Radial function r(theta) of each projection (focal length 1).
inline double fisheye_radius(FisheyeProjection p, double theta_rad) {
    switch (p) {
        case FisheyeProjection::kOrthographic: return std::sin(theta_rad);
        case FisheyeProjection::kEquisolid: return 2.0 * std::sin(theta_rad / 2.0);
        case FisheyeProjection::kEquidistant: return theta_rad;
        case FisheyeProjection::kStereographic: return 2.0 * std::tan(theta_rad / 2.0);
    }
    return 0.0;
}

/// Inverse of fisheye_radius.
inline double fisheye_theta(FisheyeProjection p, double r) {
    switch (p) {
        case FisheyeProjection::kOrthographic: return std::asin(std::clamp(r, -1.0, 1.0));
        case FisheyeProjection::kEquisolid:
            return 2.0 * std::asin(std::clamp(r / 2.0, -1.0, 1.0));
        case FisheyeProjection::kEquidistant: return r;
        case FisheyeProjection::kStereographic: return 2.0 * std::atan(r / 2.0);
    }
    return 0.0;
}

struct FisheyeSpec {
    FisheyeProjection projection = FisheyeProjection::kEquidistant;
    int size = 512;                 // output is size x size
    double theta_max_deg = 90.0;    // zenith-angle limit at the image rim
    bool downward = false;          // ground view instead of sky view
    bool nearest = false;           // nearest-neighbor resampling

    void validate() const {
        if (size < 2) throw std::invalid_argument("fisheye size must be >= 2");
        if (theta_max_deg <= 0.0 || theta_max_deg > 90.0) {
            throw std::invalid_argument("theta_max must be in (0, 90]");
        }
    }
};

/// Hemispheric fisheye view of a panorama. Sky view by default (zenith at the
/// center, image rim at theta_max); pixels outside the rim are black. North
/// is at the top of the output and azimuth grows clockwise.
inline img::Image to_fisheye(const img::Image& pano, const FisheyeSpec& spec) {
    require_equirectangular(pano);
    spec.validate();

    const double theta_max = spec.theta_max_deg * kPi / 180.0;
    const double rim = fisheye_radius(spec.projection, theta_max);
    const double half = spec.size / 2.0;

    img::Image out(spec.size, spec.size, pano.channels);
    for (int y = 0; y < spec.size; ++y) {
        for (int x = 0; x < spec.size; ++x) {
            const double dx = (x + 0.5) - half;
            const double dy = (y + 0.5) - half;
            const double rho = std::hypot(dx, dy) / half;
            if (rho > 1.0) continue;  // outside the rim, stays black

            const double theta = fisheye_theta(spec.projection, rho * rim);
            const double azimuth_deg = std::atan2(dx, -dy) * 180.0 / kPi;

            double lat_deg = 90.0 - theta * 180.0 / kPi;
            double lon_deg = azimuth_deg;
            if (spec.downward) lat_deg = -lat_deg;

            if (spec.nearest) {
                sample_pano_nearest(pano, lon_deg, lat_deg, out.pixel(x, y));
            } else {
                sample_pano(pano, lon_deg, lat_deg, out.pixel(x, y));
            }
        }
    }
    return out;
}

// ---- perspective ----

struct PerspectiveSpec {
    double yaw_deg = 0.0;    // 0 = lon 0, grows toward +lon (east)
    double pitch_deg = 0.0;  // positive looks up, range [-90, 90]
    double fov_deg = 90.0;   // horizontal field of view, (0, 180)
    int width = 640;
    int height = 480;
    bool nearest = false;

    void validate() const {
        if (fov_deg <= 0.0 || fov_deg >= 180.0) {
            throw std::invalid_argument("fov must be strictly inside (0, 180)");
        }
        if (pitch_deg < -90.0 || pitch_deg > 90.0) {
            throw std::invalid_argument("pitch must be in [-90, 90]");
        }
        if (width < 1 || height < 1) throw std::invalid_argument("bad output size");
    }

    /// Pinhole focal length in pixels; the full image width spans exactly fov.
    double focal_px() const { return (width / 2.0) / std::tan(fov_deg * kPi / 360.0); }
};

/// Direction (lon, lat) of a point on the output image plane. Coordinates are
/// continuous pixels: (0,0) is the top-left image corner, the center of pixel
/// (i,j) is (i+0.5, j+0.5).
inline std::pair<double, double> perspective_ray(const PerspectiveSpec& spec, double px,
                                                 double py) {
    const double f = spec.focal_px();
    const double cx = spec.width / 2.0;
    const double cy = spec.height / 2.0;

    // Camera frame: +z forward, +x right, +y up.
    double dx = px - cx;
    double dy = -(py - cy);
    double dz = f;
    const double norm = std::sqrt(dx * dx + dy * dy + dz * dz);
    dx /= norm;
    dy /= norm;
    dz /= norm;

    // Pitch about the x axis (positive looks up).
    const double p = spec.pitch_deg * kPi / 180.0;
    const double y2 = dy * std::cos(p) + dz * std::sin(p);
    const double z2 = -dy * std::sin(p) + dz * std::cos(p);

    const double lon = spec.yaw_deg + std::atan2(dx, z2) * 180.0 / kPi;
    const double lat = std::asin(std::clamp(y2, -1.0, 1.0)) * 180.0 / kPi;
    return {lon, lat};
}

/// Inverse of perspective_ray: pixel coordinates of a direction, relative to
/// the same camera. Directions behind the camera yield unusable results.
inline std::pair<double, double> perspective_project(const PerspectiveSpec& spec,
                                                     double lon_deg, double lat_deg) {
    const double lon = (lon_deg - spec.yaw_deg) * kPi / 180.0;
    const double lat = lat_deg * kPi / 180.0;

    double dx = std::cos(lat) * std::sin(lon);
    double dy = std::sin(lat);
    double dz = std::cos(lat) * std::cos(lon);

    // Undo the pitch rotation.
    const double p = -spec.pitch_deg * kPi / 180.0;
    const double y2 = dy * std::cos(p) + dz * std::sin(p);
    const double z2 = -dy * std::sin(p) + dz * std::cos(p);

    const double f = spec.focal_px();
    return {spec.width / 2.0 + f * dx / z2, spec.height / 2.0 - f * y2 / z2};
}

/// Pinhole crop of a panorama in the given direction.
inline img::Image to_perspective(const img::Image& pano, const PerspectiveSpec& spec) {
    require_equirectangular(pano);
    spec.validate();

    img::Image out(spec.width, spec.height, pano.channels);
    for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
            const auto [lon, lat] = perspective_ray(spec, x + 0.5, y + 0.5);
            if (spec.nearest) {
                sample_pano_nearest(pano, lon, lat, out.pixel(x, y));
            } else {
                sample_pano(pano, lon, lat, out.pixel(x, y));
            }
        }
    }
    return out;
}

/// Horizontal rotation by whole pixels (yaw-equivariance helper).
inline img::Image rotate_pano(const img::Image& pano, int shift_px) {
    img::Image out(pano.width, pano.height, pano.channels);
    for (int y = 0; y < pano.height; ++y) {
        for (int x = 0; x < pano.width; ++x) {
            int src = (x + shift_px) % pano.width;
            if (src < 0) src += pano.width;
            std::copy_n(pano.pixel(src, y), pano.channels, out.pixel(x, y));
        }
    }
    return out;
}

// ---- depth maps and point clouds ----

/// Per-pixel radius grid aligned with a panorama. Absolute maps carry meters;
/// relative maps carry [0, 255] values that scale to a maximum range.
struct DepthMap {
    int width = 0;
    int height = 0;
    bool absolute = true;
    std::vector<float> values;

    float at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }

    /// Radius in meters; relative maps scale linearly to max_range_m.
    float radius_m(int x, int y, double max_range_m) const {
        const float v = at(x, y);
        return absolute ? v : static_cast<float>(v / 255.0 * max_range_m);
    }
};

/// Single-channel PNG: relative depth in [0, 255].
inline DepthMap load_depth_png(const std::string& path) {
    const img::Image im = img::load_png(path);
    DepthMap d;
    d.width = im.width;
    d.height = im.height;
    d.absolute = false;
    d.values.resize(static_cast<size_t>(im.width) * im.height);
    const img::GrayF g = img::to_gray(im);
    for (size_t i = 0; i < d.values.size(); ++i) d.values[i] = g.v[i];
    return d;
}

// Binary float32 grid, 16-byte header: W:u32 H:u32 mode:u32 reserved:u32,
// little-endian; mode 1 = absolute meters, 0 = relative [0, 255].
inline DepthMap load_depth_bin(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open depth file: " + path);
    uint32_t header[4];
    in.read(reinterpret_cast<char*>(header), sizeof header);
    if (!in) throw std::runtime_error("truncated depth header: " + path);

    DepthMap d;
    d.width = static_cast<int>(header[0]);
    d.height = static_cast<int>(header[1]);
    d.absolute = header[2] == 1;
    if (d.width <= 0 || d.height <= 0 || d.width > 1 << 20 || d.height > 1 << 20) {
        throw std::runtime_error("implausible depth dimensions: " + path);
    }
    d.values.resize(static_cast<size_t>(d.width) * d.height);
    in.read(reinterpret_cast<char*>(d.values.data()),
            static_cast<std::streamsize>(d.values.size() * sizeof(float)));
    if (!in) throw std::runtime_error("truncated depth data: " + path);
    for (const float v : d.values) {
        if (!(v >= 0.f) || !std::isfinite(v)) {
            throw std::runtime_error("negative or non-finite depth value: " + path);
        }
    }
    return d;
}

inline void save_depth_bin(const std::string& path, const DepthMap& d) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write depth file: " + path);
    const uint32_t header[4] = {static_cast<uint32_t>(d.width), static_cast<uint32_t>(d.height),
                                d.absolute ? 1u : 0u, 0u};
    out.write(reinterpret_cast<const char*>(header), sizeof header);
    out.write(reinterpret_cast<const char*>(d.values.data()),
              static_cast<std::streamsize>(d.values.size() * sizeof(float)));
}

inline DepthMap load_depth(const std::string& path) {
    if (img::has_suffix(path, ".png")) return load_depth_png(path);
    return load_depth_bin(path);
}

struct CloudPoint {
    float x = 0.f;
    float y = 0.f;
    float z = 0.f;
    uint8_t r = 0;
    uint8_t g = 0;
    uint8_t b = 0;
};

using PointCloud = std::vector<CloudPoint>;

struct PointCloudOptions {
    int stride = 1;
    double max_range_m = 50.0;   // scaling for relative depth
    double max_depth_m = 1e9;    // points beyond this are dropped
};

/// Lifts panorama + depth into a colored point cloud: direction (lon, lat)
/// per pixel, radius from the depth map, x = r cos(lat) cos(lon),
/// y = r cos(lat) sin(lon), z = r sin(lat).
inline PointCloud to_pointcloud(const img::Image& pano, const DepthMap& depth,
                                const PointCloudOptions& opt = {}) {
    if (pano.width != depth.width || pano.height != depth.height) {
        throw std::invalid_argument("panorama and depth dimensions differ");
    }
    if (opt.stride < 1) throw std::invalid_argument("stride must be >= 1");

    PointCloud cloud;
    cloud.reserve((pano.width / opt.stride + 1) * (pano.height / opt.stride + 1));
    for (int v = 0; v < pano.height; v += opt.stride) {
        const double lat = (90.0 - (v + 0.5) / pano.height * 180.0) * kPi / 180.0;
        for (int u = 0; u < pano.width; u += opt.stride) {
            const double lon = ((u + 0.5) / pano.width * 360.0 - 180.0) * kPi / 180.0;
            const double r = depth.radius_m(u, v, opt.max_range_m);
            if (!(r <= opt.max_depth_m)) continue;

            CloudPoint p;
            p.x = static_cast<float>(r * std::cos(lat) * std::cos(lon));
            p.y = static_cast<float>(r * std::cos(lat) * std::sin(lon));
            p.z = static_cast<float>(r * std::sin(lat));
            const uint8_t* px = pano.pixel(u, v);
            if (pano.channels == 3) {
                p.r = px[0];
                p.g = px[1];
                p.b = px[2];
            } else {
                p.r = p.g = p.b = px[0];
            }
            cloud.push_back(p);
        }
    }
    return cloud;
}

/// ASCII PLY with x/y/z floats and red/green/blue uchars.
inline void write_ply(const PointCloud& cloud, const std::string& path) {
    if (cloud.empty()) throw std::invalid_argument("refusing to write an empty point cloud");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write PLY: " + path);

    out << "ply\nformat ascii 1.0\n";
    out << "element vertex " << cloud.size() << "\n";
    out << "property float x\nproperty float y\nproperty float z\n";
    out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    out << "end_header\n";

    char line[96];
    for (const auto& p : cloud) {
        std::snprintf(line, sizeof line, "%.6f %.6f %.6f %d %d %d\n", p.x, p.y, p.z, p.r, p.g,
                      p.b);
        out << line;
    }
    if (!out) throw std::runtime_error("short write: " + path);
}

/// Parses an ASCII PLY produced by write_ply (test and tooling aid).
inline PointCloud read_ply(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open PLY: " + path);
    std::string line;
    size_t count = 0;
    while (std::getline(in, line)) {
        if (line.rfind("element vertex", 0) == 0) count = std::stoull(line.substr(15));
        if (line == "end_header") break;
    }
    PointCloud cloud;
    cloud.reserve(count);
    for (size_t i = 0; i < count; ++i) {
        CloudPoint p;
        int r, g, b;
        if (!(in >> p.x >> p.y >> p.z >> r >> g >> b)) {
            throw std::runtime_error("truncated PLY: " + path);
        }
        p.r = static_cast<uint8_t>(r);
        p.g = static_cast<uint8_t>(g);
        p.b = static_cast<uint8_t>(b);
        cloud.push_back(p);
    }
    return cloud;
}

}  // namespace svipipe::transform
