#pragma once

#include <cmath>
#include <cstdint>

#include "svipipe/geo.hpp"

// Solar position via the NOAA solar-calculator approximation. Accurate to a
// small fraction of a degree for years 1900-2100, which is plenty for a
// day/night split. No atmospheric refraction correction.

namespace svipipe::solar {

namespace detail {

inline double sind(double deg) { return std::sin(geo::deg2rad(deg)); }
inline double cosd(double deg) { return std::cos(geo::deg2rad(deg)); }
inline double tand(double deg) { return std::tan(geo::deg2rad(deg)); }

}  // namespace detail

/// Solar elevation angle in degrees for a UTC instant (unix milliseconds) at
/// the given location. Positive above the horizon.
inline double elevation_deg(const geo::GeoPoint& p, int64_t unix_ms) {
    using namespace detail;

    const double jd = static_cast<double>(unix_ms) / 86'400'000.0 + 2440587.5;
    const double jc = (jd - 2451545.0) / 36525.0;

    double mean_long = std::fmod(280.46646 + jc * (36000.76983 + 0.0003032 * jc), 360.0);
    if (mean_long < 0.0) mean_long += 360.0;
    const double mean_anom = 357.52911 + jc * (35999.05029 - 0.0001537 * jc);
    const double eccent = 0.016708634 - jc * (0.000042037 + 0.0000001267 * jc);

    const double eq_center = sind(mean_anom) * (1.914602 - jc * (0.004817 + 0.000014 * jc)) +
                             sind(2.0 * mean_anom) * (0.019993 - 0.000101 * jc) +
                             sind(3.0 * mean_anom) * 0.000289;

    const double true_long = mean_long + eq_center;
    const double apparent_long =
        true_long - 0.00569 - 0.00478 * sind(125.04 - 1934.136 * jc);

    const double mean_obliq =
        23.0 + (26.0 + (21.448 - jc * (46.815 + jc * (0.00059 - jc * 0.001813))) / 60.0) / 60.0;
    const double obliq = mean_obliq + 0.00256 * cosd(125.04 - 1934.136 * jc);

    const double declination = geo::rad2deg(std::asin(sind(obliq) * sind(apparent_long)));

    const double var_y = tand(obliq / 2.0) * tand(obliq / 2.0);
    const double eq_time_min =
        4.0 * geo::rad2deg(var_y * sind(2.0 * mean_long) - 2.0 * eccent * sind(mean_anom) +
                           4.0 * eccent * var_y * sind(mean_anom) * cosd(2.0 * mean_long) -
                           0.5 * var_y * var_y * sind(4.0 * mean_long) -
                           1.25 * eccent * eccent * sind(2.0 * mean_anom));

    const double minutes_utc =
        std::fmod(static_cast<double>(unix_ms) / 60'000.0, 1440.0);
    double true_solar_min = std::fmod(minutes_utc + eq_time_min + 4.0 * p.lon, 1440.0);
    if (true_solar_min < 0.0) true_solar_min += 1440.0;

    double hour_angle = true_solar_min / 4.0 - 180.0;
    if (hour_angle < -180.0) hour_angle += 360.0;

    const double cos_zenith = sind(p.lat) * sind(declination) +
                              cosd(p.lat) * cosd(declination) * cosd(hour_angle);
    const double zenith = geo::rad2deg(std::acos(std::clamp(cos_zenith, -1.0, 1.0)));
    return 90.0 - zenith;
}

/// Day/night split. The default boundary is sunrise/sunset (elevation 0);
/// `civil_twilight` moves it to -6 degrees.
inline bool is_daytime(const geo::GeoPoint& p, int64_t unix_ms, bool civil_twilight = false) {
    const double threshold = civil_twilight ? -6.0 : 0.0;
    return elevation_deg(p, unix_ms) > threshold;
}

}  // namespace svipipe::solar
