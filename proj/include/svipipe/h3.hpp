#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "svipipe/h3_tables.hpp"

// H3 hexagonal hierarchical index (https://h3geo.org), self-contained port of
// the published cell-indexing algorithm. Covers the subset needed here:
// point -> cell, cell -> center/boundary, parent, validity. Conformance with
// the reference implementation is locked down by the frozen vectors in the
// test suite.

namespace svipipe::h3 {

inline constexpr int kMaxResolution = 15;

namespace detail {

using namespace svipipe::h3detail;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kEpsilon = 1e-16;
// Scaling factor from hex2d res-0 unit length to gnomonic unit length.
inline constexpr double kRes0UGnomonic = 0.381966011250105;
inline constexpr double kInvRes0UGnomonic = 2.618033988749896;
// Rotation angle between class II and class III resolution axes: asin(sqrt(3/28)).
inline constexpr double kAp7RotRads = 0.3334731722518321;
inline constexpr double kSqrt3_2 = 0.8660254037844386;
inline constexpr double kRSin60 = 1.1547005383792515;

inline constexpr uint64_t kDefaultCellIndex = 0x8001fffffffffffULL;
inline constexpr int kResolutionOffset = 52;
inline constexpr uint64_t kResolutionMask = 0xFULL << kResolutionOffset;
inline constexpr int kBaseCellOffset = 45;
inline constexpr uint64_t kBaseCellMask = 0x7FULL << kBaseCellOffset;
inline constexpr int kModeOffset = 59;
inline constexpr uint64_t kModeMask = 0xFULL << kModeOffset;

// Directions: 0 center, 1 K, 2 J, 3 JK, 4 I, 5 IK, 6 IJ.
enum Dir : uint8_t { kCenter = 0, kK = 1, kJ = 2, kJK = 3, kI = 4, kIK = 5, kIJ = 6 };

inline constexpr int direction_offset(int res) { return (kMaxResolution - res) * 3; }

inline constexpr uint8_t get_direction(uint64_t bits, int res) {
    return static_cast<uint8_t>((bits >> direction_offset(res)) & 0x7);
}

inline constexpr uint64_t set_direction(uint64_t bits, int res, uint8_t dir) {
    const int off = direction_offset(res);
    return (bits & ~(0x7ULL << off)) | (static_cast<uint64_t>(dir) << off);
}

inline constexpr int get_resolution_bits(uint64_t bits) {
    return static_cast<int>((bits & kResolutionMask) >> kResolutionOffset);
}

inline constexpr uint64_t set_resolution_bits(uint64_t bits, int res) {
    return (bits & ~kResolutionMask) | (static_cast<uint64_t>(res) << kResolutionOffset);
}

inline constexpr int get_base_cell_bits(uint64_t bits) {
    return static_cast<int>((bits & kBaseCellMask) >> kBaseCellOffset);
}

inline constexpr uint64_t set_base_cell_bits(uint64_t bits, int cell) {
    return (bits & ~kBaseCellMask) | (static_cast<uint64_t>(cell) << kBaseCellOffset);
}

inline constexpr uint64_t set_unused(uint64_t bits, int res) {
    const uint64_t unused = (1ULL << direction_offset(res)) - 1;
    return bits | unused;
}

inline constexpr bool is_class3(int res) { return res % 2 == 1; }

// Direction rotated by `count` 60-degree steps.
inline uint8_t dir_rotate60(uint8_t dir, int count, bool ccw) {
    static constexpr uint8_t kCcwSeq[6] = {kK, kIK, kI, kIJ, kJ, kJK};
    static constexpr uint8_t kCwSeq[6] = {kK, kJK, kJ, kIJ, kI, kIK};
    if (count == 0 || dir == kCenter) return dir;
    int offset = 0;
    switch (dir) {
        case kK: offset = 0; break;
        case kJ: offset = ccw ? 4 : 2; break;
        case kJK: offset = ccw ? 5 : 1; break;
        case kI: offset = ccw ? 2 : 4; break;
        case kIK: offset = ccw ? 1 : 5; break;
        case kIJ: offset = 3; break;
        default: return dir;
    }
    const int index = (count + offset) % 6;
    return ccw ? kCcwSeq[index] : kCwSeq[index];
}

// First non-center direction digit of the index, 0 when all digits are center.
inline uint8_t first_axe(uint64_t bits) {
    const int res = get_resolution_bits(bits);
    for (int r = 1; r <= res; ++r) {
        const uint8_t d = get_direction(bits, r);
        if (d != kCenter) return d;
    }
    return 0;
}

inline uint64_t rotate60(uint64_t bits, int count, bool ccw) {
    const int res = get_resolution_bits(bits);
    for (int r = 1; r <= res; ++r) {
        bits = set_direction(bits, r, dir_rotate60(get_direction(bits, r), count, ccw));
    }
    return bits;
}

// Pentagonal rotation skips over the deleted K subsequence.
inline uint64_t pentagon_rotate60_ccw(uint64_t bits) {
    const int res = get_resolution_bits(bits);
    if (res == 0) return bits;
    const int count = (first_axe(bits) == kJK) ? 2 : 1;
    for (int r = 1; r <= res; ++r) {
        bits = set_direction(bits, r, dir_rotate60(get_direction(bits, r), count, true));
    }
    return bits;
}

struct CoordIJK {
    int32_t i = 0;
    int32_t j = 0;
    int32_t k = 0;

    friend CoordIJK operator+(CoordIJK a, CoordIJK b) {
        return {a.i + b.i, a.j + b.j, a.k + b.k};
    }
    friend CoordIJK operator-(CoordIJK a, CoordIJK b) {
        return {a.i - b.i, a.j - b.j, a.k - b.k};
    }
    friend bool operator==(CoordIJK a, CoordIJK b) {
        return a.i == b.i && a.j == b.j && a.k == b.k;
    }

    CoordIJK scaled(int32_t f) const { return {i * f, j * f, k * f}; }

    CoordIJK normalized() const {
        const int32_t m = std::min(i, std::min(j, k));
        return {i - m, j - m, k - m};
    }
};

inline CoordIJK dir_coordinate(uint8_t dir) {
    return {static_cast<int32_t>((dir >> 2) & 1), static_cast<int32_t>((dir >> 1) & 1),
            static_cast<int32_t>(dir & 1)};
}

// Direction for a unit IJK vector; throws on non-unit input.
inline uint8_t dir_from_unit_ijk(CoordIJK c) {
    c = c.normalized();
    if (((c.i | c.j | c.k) & ~1) != 0) throw std::logic_error("non-unit IJK vector");
    return static_cast<uint8_t>(c.i << 2 | c.j << 1 | c.k);
}

inline CoordIJK up_aperture7(CoordIJK c, bool ccw) {
    const int32_t i = c.i - c.k;
    const int32_t j = c.j - c.k;
    double di, dj;
    if (ccw) {
        di = (3.0 * i - j) / 7.0;
        dj = (i + 2.0 * j) / 7.0;
    } else {
        di = (2.0 * i + j) / 7.0;
        dj = (3.0 * j - i) / 7.0;
    }
    return CoordIJK{static_cast<int32_t>(std::lround(di)), static_cast<int32_t>(std::lround(dj)), 0}
        .normalized();
}

inline CoordIJK down_aperture7(CoordIJK c, bool ccw) {
    const CoordIJK iv = ccw ? CoordIJK{3, 0, 1} : CoordIJK{3, 1, 0};
    const CoordIJK jv = ccw ? CoordIJK{1, 3, 0} : CoordIJK{0, 3, 1};
    const CoordIJK kv = ccw ? CoordIJK{0, 1, 3} : CoordIJK{1, 0, 3};
    return (iv.scaled(c.i) + jv.scaled(c.j) + kv.scaled(c.k)).normalized();
}

inline CoordIJK down_aperture3(CoordIJK c, bool ccw) {
    const CoordIJK iv = ccw ? CoordIJK{2, 0, 1} : CoordIJK{2, 1, 0};
    const CoordIJK jv = ccw ? CoordIJK{1, 2, 0} : CoordIJK{0, 2, 1};
    const CoordIJK kv = ccw ? CoordIJK{0, 1, 2} : CoordIJK{1, 0, 2};
    return (iv.scaled(c.i) + jv.scaled(c.j) + kv.scaled(c.k)).normalized();
}

inline CoordIJK ijk_rotate60(CoordIJK c, bool ccw) {
    const CoordIJK iv = ccw ? CoordIJK{1, 1, 0} : CoordIJK{1, 0, 1};
    const CoordIJK jv = ccw ? CoordIJK{0, 1, 1} : CoordIJK{1, 1, 0};
    const CoordIJK kv = ccw ? CoordIJK{1, 0, 1} : CoordIJK{0, 1, 1};
    return (iv.scaled(c.i) + jv.scaled(c.j) + kv.scaled(c.k)).normalized();
}

struct Vec2d {
    double x = 0.0;
    double y = 0.0;

    double magnitude() const { return std::hypot(x, y); }
};

inline Vec2d ijk_to_hex2d(CoordIJK c) {
    const double i = c.i - c.k;
    const double j = c.j - c.k;
    return {i - 0.5 * j, j * kSqrt3_2};
}

// Containing hex for a 2D cartesian point (from DGGRID).
inline CoordIJK hex2d_to_ijk(Vec2d v) {
    const double a1 = std::fabs(v.x);
    const double a2 = std::fabs(v.y);

    const double x2 = a2 * kRSin60;
    const double x1 = a1 + x2 / 2.0;

    const auto m1 = static_cast<int32_t>(x1);
    const auto m2 = static_cast<int32_t>(x2);

    const double r1 = x1 - m1;
    const double r2 = x2 - m2;

    int32_t i, j;
    if (r1 < 0.5) {
        if (r1 < 1.0 / 3.0) {
            i = m1;
            j = m2 + (r2 >= (1.0 + r1) / 2.0 ? 1 : 0);
        } else {
            i = m1 + ((1.0 - r1) <= r2 && r2 < (2.0 * r1) ? 1 : 0);
            j = m2 + (r2 >= (1.0 - r1) ? 1 : 0);
        }
    } else if (r1 < 2.0 / 3.0) {
        j = m2 + (r2 >= (1.0 - r1) ? 1 : 0);
        i = m1 + ((2.0 * r1 - 1.0) >= r2 || r2 >= (1.0 - r1) ? 1 : 0);
    } else {
        i = m1 + 1;
        j = m2 + (r2 >= (r1 / 2.0) ? 1 : 0);
    }

    // Fold across the axes for negative inputs.
    if (v.x < 0.0) {
        const int32_t offset = j % 2;
        const int32_t axis_i = (j + offset) / 2;
        const int32_t diff = i - axis_i;
        i -= 2 * diff + offset;
    }
    if (v.y < 0.0) {
        i -= (2 * j + 1) / 2;
        j = -j;
    }

    return CoordIJK{i, j, 0}.normalized();
}

inline Vec2d line_intersection(Vec2d p0, Vec2d p1, Vec2d q0, Vec2d q1) {
    const Vec2d s1{p1.x - p0.x, p1.y - p0.y};
    const Vec2d s2{q1.x - q0.x, q1.y - q0.y};
    const double t =
        (s2.x * (p0.y - q0.y) - s2.y * (p0.x - q0.x)) / (-s2.x * s1.y + s1.x * s2.y);
    return {p0.x + t * s1.x, p0.y + t * s1.y};
}

using GeoRadians = svipipe::h3detail::GeoRad;

inline double positive_angle(double a) {
    if (a < 0.0) a += kTwoPi;
    else if (a >= kTwoPi) a -= kTwoPi;
    return a;
}

inline double geo_azimuth(const GeoRadians& from, const GeoRadians& to) {
    return std::atan2(std::cos(to.lat) * std::sin(to.lng - from.lng),
                      std::cos(from.lat) * std::sin(to.lat) -
                          std::sin(from.lat) * std::cos(to.lat) * std::cos(to.lng - from.lng));
}

// Point at the given azimuth and angular distance from origin.
inline GeoRadians geo_coord_at(const GeoRadians& origin, double azimuth, double distance) {
    if (distance < kEpsilon) return {origin.lat, origin.lng};
    azimuth = positive_angle(azimuth);
    const bool due_north_south =
        std::fabs(azimuth) < kEpsilon || std::fabs(azimuth - kPi) < kEpsilon;

    double lat;
    if (due_north_south) {
        lat = azimuth < kEpsilon ? origin.lat + distance : origin.lat - distance;
    } else {
        double s = std::sin(origin.lat) * std::cos(distance) +
                   std::cos(origin.lat) * std::sin(distance) * std::cos(azimuth);
        s = std::clamp(s, -1.0, 1.0);
        lat = std::asin(s);
    }

    if (std::fabs(lat - kPi / 2.0) < kEpsilon) return {kPi / 2.0, 0.0};
    if (std::fabs(lat + kPi / 2.0) < kEpsilon) return {-kPi / 2.0, 0.0};

    double lng;
    if (due_north_south) {
        lng = origin.lng;
    } else {
        const double sinlng =
            std::clamp(std::sin(azimuth) * std::sin(distance) / std::cos(lat), -1.0, 1.0);
        const double coslng = (std::cos(distance) - std::sin(origin.lat) * std::sin(lat)) /
                              std::cos(origin.lat) / std::cos(lat);
        lng = origin.lng + std::atan2(sinlng, coslng);
    }
    while (lng > kPi) lng -= kTwoPi;
    while (lng < -kPi) lng += kTwoPi;
    return {lat, lng};
}

struct FaceIJK {
    int face = 0;
    CoordIJK coord;
};

// Closest icosahedron face and squared 3D chord distance to its center.
inline std::pair<int, double> closest_face(const GeoRadians& g) {
    const double cl = std::cos(g.lat);
    const double x = std::cos(g.lng) * cl;
    const double y = std::sin(g.lng) * cl;
    const double z = std::sin(g.lat);

    int face = 0;
    double best = 5.0;
    for (int f = 0; f < 20; ++f) {
        const auto& c = kFaceCenterPoint[f];
        const double dx = x - c.x;
        const double dy = y - c.y;
        const double dz = z - c.z;
        const double d = dx * dx + dy * dy + dz * dz;
        if (d < best) {
            best = d;
            face = f;
        }
    }
    return {face, best};
}

// Gnomonic projection of a point onto a face-local 2D system at `res`.
inline Vec2d geo_to_hex2d(const GeoRadians& g, int res, int face, double sqd) {
    // cos(r) = 1 - 2 sin^2(r/2) = 1 - sqd/2
    double r = std::acos(1.0 - sqd / 2.0);
    if (r < kEpsilon) return {0.0, 0.0};

    r = std::tan(r) * kInvRes0UGnomonic * kSqrt7Powers[res];

    double theta = kFaceAxesAzRadsCII[face][0] - geo_azimuth(kFaceCenterGeo[face], g);
    if (is_class3(res)) theta -= kAp7RotRads;

    return {r * std::cos(theta), r * std::sin(theta)};
}

// Inverse: face-local 2D point back to the sphere. `res` may be 16 for
// substrate grids one step below resolution 15.
inline GeoRadians hex2d_to_geo(Vec2d v, int face, int res, bool substrate) {
    double r = v.magnitude();
    if (r < kEpsilon) {
        return {kFaceCenterGeo[face].lat, kFaceCenterGeo[face].lng};
    }

    r *= kInvSqrt7Powers[res];
    if (substrate) r /= 3.0;
    r = std::atan(r * kRes0UGnomonic);

    double theta = std::atan2(v.y, v.x);
    if (!substrate && is_class3(res)) theta = positive_angle(theta + kAp7RotRads);
    theta = positive_angle(kFaceAxesAzRadsCII[face][0] - theta);

    return geo_coord_at(kFaceCenterGeo[face], theta, r);
}

enum class Overage { kNone, kFaceEdge, kNewFace };

// Moves a FaceIJK address onto the proper face when the coordinates spill
// past the face boundary. `class2_res` may be 16.
inline Overage adjust_overage_class2(FaceIJK& fijk, int class2_res, bool is_pent4,
                                     bool substrate) {
    const int factor = substrate ? 3 : 1;
    const int32_t max_dim = kMaxDimByCIIres[class2_res] * factor;
    const int32_t dimension = fijk.coord.i + fijk.coord.j + fijk.coord.k;

    if (substrate && dimension == max_dim) return Overage::kFaceEdge;
    if (dimension <= max_dim) return Overage::kNone;

    FaceOrientIJK orient{};
    if (fijk.coord.k > 0) {
        if (fijk.coord.j > 0) {
            orient = kFaceNeighbors[fijk.face][3];  // JK quadrant
        } else {
            // Adjust for the pentagonal missing sequence.
            if (is_pent4) {
                const CoordIJK origin{max_dim, 0, 0};
                fijk.coord = ijk_rotate60(fijk.coord - origin, false) + origin;
            }
            orient = kFaceNeighbors[fijk.face][2];  // KI quadrant
        }
    } else {
        orient = kFaceNeighbors[fijk.face][1];  // IJ quadrant
    }
    fijk.face = orient.face;

    for (int r = 0; r < orient.ccw_rot60; ++r) fijk.coord = ijk_rotate60(fijk.coord, true);

    const int32_t unit_scale = kUnitScaleByCIIres[class2_res] * factor;
    const CoordIJK trans =
        CoordIJK{orient.translate_i, orient.translate_j, orient.translate_k}.scaled(unit_scale);
    fijk.coord = (fijk.coord + trans).normalized();

    if (substrate && fijk.coord.i + fijk.coord.j + fijk.coord.k == max_dim) {
        return Overage::kFaceEdge;
    }
    return Overage::kNewFace;
}

inline bool base_cell_is_cw_offset(int base_cell, int face) {
    const auto& d = kBaseCellData[base_cell];
    return d.cw_offset_faces[0] == face || d.cw_offset_faces[1] == face;
}

// Sets the direction digits from finest resolution up; returns the remaining
// base-cell-level IJK coordinates.
inline CoordIJK directions_bits_from_ijk(CoordIJK ijk, uint64_t& bits, int res) {
    for (int r = res; r >= 1; --r) {
        const CoordIJK last = ijk;
        CoordIJK last_center;
        if (is_class3(r)) {
            ijk = up_aperture7(ijk, true);
            last_center = down_aperture7(ijk, true);
        } else {
            ijk = up_aperture7(ijk, false);
            last_center = down_aperture7(ijk, false);
        }
        const uint8_t dir = dir_from_unit_ijk(last - last_center);
        bits = set_direction(bits, r, dir);
    }
    return ijk;
}

inline uint64_t faceijk_to_cell(FaceIJK fijk, int res) {
    uint64_t bits = set_resolution_bits(kDefaultCellIndex, res);

    if (res > 0) fijk.coord = directions_bits_from_ijk(fijk.coord, bits, res);

    if (fijk.coord.i > 2 || fijk.coord.j > 2 || fijk.coord.k > 2 || fijk.coord.i < 0 ||
        fijk.coord.j < 0 || fijk.coord.k < 0) {
        throw std::logic_error("base cell coordinates out of range");
    }
    const auto rotation =
        kFaceIjkBaseCells[fijk.face][fijk.coord.i][fijk.coord.j][fijk.coord.k];
    bits = set_base_cell_bits(bits, rotation.base_cell);

    if (res == 0) return bits;

    if (kBaseCellData[rotation.base_cell].is_pentagon) {
        // Force rotation out of the missing K-axis subsequence.
        if (first_axe(bits) == kK) {
            const bool cw = base_cell_is_cw_offset(rotation.base_cell, fijk.face);
            bits = rotate60(bits, 1, !cw);
        }
        for (int r = 0; r < rotation.ccw_rot60; ++r) bits = pentagon_rotate60_ccw(bits);
    } else {
        bits = rotate60(bits, rotation.ccw_rot60, true);
    }
    return bits;
}

// A cell is pentagonal iff its base cell is a pentagon and every direction
// digit is the center (the pentagon sits at the center of its base cell).
inline bool cell_is_pentagon(uint64_t bits) {
    return kBaseCellData[get_base_cell_bits(bits)].is_pentagon && first_axe(bits) == 0;
}

// Home FaceIJK of the cell plus whether an overage onto another face is
// possible.
inline std::pair<FaceIJK, bool> faceijk_from_bits(uint64_t bits, int res, int base_cell) {
    const auto& data = kBaseCellData[base_cell];
    FaceIJK fijk{data.home_face, {data.home_i, data.home_j, data.home_k}};
    const bool possible_overage =
        data.is_pentagon || res != 0 || !(fijk.coord == CoordIJK{0, 0, 0});

    for (int r = 1; r <= res; ++r) {
        fijk.coord = down_aperture7(fijk.coord, is_class3(r));
        fijk.coord = (fijk.coord + dir_coordinate(get_direction(bits, r))).normalized();
    }
    return {fijk, possible_overage};
}

inline FaceIJK cell_to_faceijk(uint64_t cell) {
    uint64_t bits = cell;
    const int base_cell = get_base_cell_bits(bits);
    const int res = get_resolution_bits(bits);
    const bool pentagon = kBaseCellData[base_cell].is_pentagon;

    // Adjust for the pentagonal missing sequence.
    if (pentagon && first_axe(bits) == kIK) bits = rotate60(bits, 1, false);

    auto [fijk, possible_overage] = faceijk_from_bits(bits, res, base_cell);
    if (!possible_overage) return fijk;

    const CoordIJK original = fijk.coord;

    int class2_res = res;
    if (is_class3(res)) {
        fijk.coord = down_aperture7(fijk.coord, false);
        class2_res = res + 1;
    }

    const bool is_pent4 = pentagon && first_axe(bits) == kI;

    if (adjust_overage_class2(fijk, class2_res, is_pent4, false) != Overage::kNone) {
        if (pentagon) {
            while (adjust_overage_class2(fijk, class2_res, false, false) != Overage::kNone) {
            }
        }
        if (class2_res != res) fijk.coord = up_aperture7(fijk.coord, false);
    } else if (class2_res != res) {
        fijk.coord = original;
    }
    return fijk;
}

// Cell vertices as substrate FaceIJK addresses; returns the substrate class II
// resolution (possibly 16).
inline int cell_vertices(FaceIJK& center, int res, FaceIJK* verts, int count) {
    // Vertices of an origin-centered cell in a substrate grid, CCW from the
    // i-axis. Aperture sequence 33r for class II, 33r7r for class III.
    static constexpr CoordIJK kVertsCII[6] = {{2, 1, 0}, {1, 2, 0}, {0, 2, 1},
                                              {0, 1, 2}, {1, 0, 2}, {2, 0, 1}};
    static constexpr CoordIJK kVertsCIII[6] = {{5, 4, 0}, {1, 5, 0}, {0, 5, 4},
                                               {0, 1, 5}, {4, 0, 5}, {5, 0, 1}};

    center.coord = down_aperture3(center.coord, true);
    center.coord = down_aperture3(center.coord, false);

    const CoordIJK* table = kVertsCII;
    int adjusted_res = res;
    if (is_class3(res)) {
        center.coord = down_aperture7(center.coord, false);
        adjusted_res = res + 1;
        table = kVertsCIII;
    }

    for (int v = 0; v < count; ++v) {
        verts[v].face = center.face;
        verts[v].coord = (center.coord + table[v]).normalized();
    }
    return adjusted_res;
}

inline bool vec2d_almost_eq(Vec2d a, Vec2d b) {
    constexpr double kEps = 1.1920928955078125e-07;  // f32 epsilon
    return std::fabs(a.x - b.x) <= kEps && std::fabs(a.y - b.y) <= kEps;
}

inline void hexagon_boundary(const FaceIJK& cell_fijk, int res,
                             std::vector<GeoRadians>& boundary) {
    FaceIJK center = cell_fijk;
    FaceIJK verts[6];
    const int adjusted_res = cell_vertices(center, res, verts, 6);

    int last_face = -1;
    Overage last_overage = Overage::kNone;
    // One extra iteration to catch a distortion vertex on the last edge.
    for (int vert = 0; vert < 7; ++vert) {
        const int v = vert % 6;
        FaceIJK fijk = verts[v];
        const Overage overage = adjust_overage_class2(fijk, adjusted_res, false, true);

        // Class III cell edges may cross icosahedron edges; each crossing adds
        // a distortion vertex at the intersection.
        if (is_class3(res) && vert > 0 && fijk.face != last_face &&
            last_overage != Overage::kFaceEdge) {
            const int last_v = (v + 5) % 6;
            const Vec2d orig2d0 = ijk_to_hex2d(verts[last_v].coord);
            const Vec2d orig2d1 = ijk_to_hex2d(verts[v].coord);

            const double max_dim = kMaxDimByCIIres[adjusted_res];
            const Vec2d v0{3.0 * max_dim, 0.0};
            const Vec2d v1{-1.5 * max_dim, 3.0 * kSqrt3_2 * max_dim};
            const Vec2d v2{-1.5 * max_dim, -3.0 * kSqrt3_2 * max_dim};

            const int face2 = (last_face == center.face) ? fijk.face : last_face;
            Vec2d edge0, edge1;
            switch (kAdjacentFaceDir[center.face][face2]) {
                case 1: edge0 = v0; edge1 = v1; break;  // IJ
                case 3: edge0 = v1; edge1 = v2; break;  // JK
                case 2: edge0 = v2; edge1 = v0; break;  // KI
                default: throw std::logic_error("invalid adjacent face direction");
            }

            const Vec2d inter = line_intersection(orig2d0, orig2d1, edge0, edge1);
            const bool at_vertex =
                vec2d_almost_eq(orig2d0, inter) || vec2d_almost_eq(orig2d1, inter);
            if (!at_vertex) {
                boundary.push_back(hex2d_to_geo(inter, center.face, adjusted_res, true));
            }
        }

        if (vert < 6) {
            boundary.push_back(
                hex2d_to_geo(ijk_to_hex2d(fijk.coord), fijk.face, adjusted_res, true));
        }

        last_face = fijk.face;
        last_overage = overage;
    }
}

inline void pentagon_boundary(const FaceIJK& cell_fijk, int res,
                              std::vector<GeoRadians>& boundary) {
    FaceIJK center = cell_fijk;
    FaceIJK verts[5];
    const int adjusted_res = cell_vertices(center, res, verts, 5);

    FaceIJK last_fijk{};
    for (int vert = 0; vert < 6; ++vert) {
        FaceIJK fijk = verts[vert % 5];
        while (adjust_overage_class2(fijk, adjusted_res, false, true) == Overage::kNewFace) {
        }

        // All class III pentagon edges cross icosahedron edges.
        if (is_class3(res) && vert > 0) {
            FaceIJK tmp = fijk;
            const Vec2d orig2d0 = ijk_to_hex2d(last_fijk.coord);

            const int to_last_dir = kAdjacentFaceDir[tmp.face][last_fijk.face];
            const auto& orient = kFaceNeighbors[tmp.face][to_last_dir];

            tmp.face = orient.face;
            for (int r = 0; r < orient.ccw_rot60; ++r) tmp.coord = ijk_rotate60(tmp.coord, true);
            const CoordIJK trans =
                CoordIJK{orient.translate_i, orient.translate_j, orient.translate_k}.scaled(
                    kUnitScaleByCIIres[adjusted_res] * 3);
            tmp.coord = (tmp.coord + trans).normalized();

            const Vec2d orig2d1 = ijk_to_hex2d(tmp.coord);

            const double max_dim = kMaxDimByCIIres[adjusted_res];
            const Vec2d v0{3.0 * max_dim, 0.0};
            const Vec2d v1{-1.5 * max_dim, 3.0 * kSqrt3_2 * max_dim};
            const Vec2d v2{-1.5 * max_dim, -3.0 * kSqrt3_2 * max_dim};

            Vec2d edge0, edge1;
            switch (kAdjacentFaceDir[tmp.face][fijk.face]) {
                case 1: edge0 = v0; edge1 = v1; break;
                case 3: edge0 = v1; edge1 = v2; break;
                case 2: edge0 = v2; edge1 = v0; break;
                default: throw std::logic_error("invalid adjacent face direction");
            }

            const Vec2d inter = line_intersection(orig2d0, orig2d1, edge0, edge1);
            boundary.push_back(hex2d_to_geo(inter, tmp.face, adjusted_res, true));
        }

        if (vert < 5) {
            boundary.push_back(
                hex2d_to_geo(ijk_to_hex2d(fijk.coord), fijk.face, adjusted_res, true));
        }
        last_fijk = fijk;
    }
}

}  // namespace detail

/// Index of the cell containing (lat, lon) degrees at the given resolution.
inline uint64_t latlng_to_cell(double lat_deg, double lon_deg, int resolution) {
    if (resolution < 0 || resolution > kMaxResolution) {
        throw std::out_of_range("H3 resolution must be in [0, 15]");
    }
    if (!std::isfinite(lat_deg) || !std::isfinite(lon_deg)) {
        throw std::invalid_argument("non-finite coordinate");
    }
    const detail::GeoRadians g{lat_deg * detail::kPi / 180.0, lon_deg * detail::kPi / 180.0};
    const auto [face, sqd] = detail::closest_face(g);
    const detail::Vec2d v = detail::geo_to_hex2d(g, resolution, face, sqd);
    const detail::FaceIJK fijk{face, detail::hex2d_to_ijk(v)};
    return detail::faceijk_to_cell(fijk, resolution);
}

inline int resolution(uint64_t cell) { return detail::get_resolution_bits(cell); }

inline bool is_pentagon(uint64_t cell) { return detail::cell_is_pentagon(cell); }

/// Structural validity per the H3 index layout rules.
inline bool is_valid_cell(uint64_t cell) {
    if ((cell >> 56) & 0b10000111ULL) return false;           // reserved bits
    if (((cell & detail::kModeMask) >> detail::kModeOffset) != 1) return false;
    if (detail::get_base_cell_bits(cell) > 121) return false;

    const int res = detail::get_resolution_bits(cell);
    for (int r = 1; r <= res; ++r) {
        if (detail::get_direction(cell, r) == 7) return false;
    }
    for (int r = res + 1; r <= kMaxResolution; ++r) {
        if (detail::get_direction(cell, r) != 7) return false;
    }
    if (detail::cell_is_pentagon(cell) && res > 0 &&
        detail::first_axe(cell) == detail::kK) {
        return false;  // deleted K subsequence
    }
    return true;
}

/// Parent cell at a coarser resolution.
inline uint64_t cell_to_parent(uint64_t cell, int parent_resolution) {
    const int res = detail::get_resolution_bits(cell);
    if (parent_resolution < 0 || parent_resolution > res) {
        throw std::out_of_range("parent resolution out of range");
    }
    const uint64_t bits = detail::set_resolution_bits(cell, parent_resolution);
    return detail::set_unused(bits, parent_resolution);
}

/// Cell center as (lat, lon) degrees.
inline std::pair<double, double> cell_to_latlng(uint64_t cell) {
    const detail::FaceIJK fijk = detail::cell_to_faceijk(cell);
    const detail::GeoRadians g = detail::hex2d_to_geo(
        detail::ijk_to_hex2d(fijk.coord), fijk.face, detail::get_resolution_bits(cell), false);
    return {g.lat * 180.0 / detail::kPi, g.lng * 180.0 / detail::kPi};
}

/// Cell boundary as (lat, lon) degree pairs, counter-clockwise. Class III
/// cells may carry extra distortion vertices where they cross icosahedron
/// edges (5-7 hexagon vertices, 5-10 for pentagons).
inline std::vector<std::pair<double, double>> cell_to_boundary(uint64_t cell) {
    std::vector<detail::GeoRadians> raw;
    const detail::FaceIJK fijk = detail::cell_to_faceijk(cell);
    const int res = detail::get_resolution_bits(cell);
    if (detail::cell_is_pentagon(cell)) {
        detail::pentagon_boundary(fijk, res, raw);
    } else {
        detail::hexagon_boundary(fijk, res, raw);
    }
    std::vector<std::pair<double, double>> out;
    out.reserve(raw.size());
    for (const auto& g : raw) {
        out.emplace_back(g.lat * 180.0 / detail::kPi, g.lng * 180.0 / detail::kPi);
    }
    return out;
}

}  // namespace svipipe::h3
