#include "spatcode/encoding.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spatcode {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kHalfPi = 0.5 * std::numbers::pi;

void check_scale(TemporalScale scale) {
    if (!(scale.radians_per_second > 0.0) || !std::isfinite(scale.radians_per_second)) {
        throw std::invalid_argument("temporal scale must be finite and positive, got " +
                                    std::to_string(scale.radians_per_second));
    }
}

void check_timestamp(Timestamp t) {
    if (!std::isfinite(t)) {
        throw std::invalid_argument("timestamp must be finite");
    }
}

void check_coordinate(const GeoCoordinate& coord) {
    if (!std::isfinite(coord.latitude) || !std::isfinite(coord.longitude)) {
        throw std::invalid_argument("coordinate must be finite");
    }
    if (coord.latitude < -kHalfPi || coord.latitude > kHalfPi) {
        throw std::invalid_argument("latitude " + std::to_string(coord.latitude) +
                                    " outside [-pi/2, pi/2]");
    }
    if (coord.longitude < -std::numbers::pi || coord.longitude >= std::numbers::pi) {
        throw std::invalid_argument("longitude " + std::to_string(coord.longitude) +
                                    " outside [-pi, pi)");
    }
}

void check_precision(const PrecisionSpec& spec) {
    if (!(spec.cosine_resolution > 0.0) || !(spec.cosine_resolution < 1.0)) {
        throw std::invalid_argument("cosine resolution must lie in (0, 1)");
    }
}

}  // namespace

double reduce_phase(double radians) {
    double reduced = std::fmod(radians, kTwoPi);
    if (reduced < 0.0) {
        reduced += kTwoPi;
    }
    // fmod can round a tiny negative up to exactly 2*pi after the correction.
    if (reduced >= kTwoPi) {
        reduced -= kTwoPi;
    }
    return reduced;
}

TimeEncoding encode_time(Timestamp t, TemporalScale scale) {
    check_timestamp(t);
    check_scale(scale);
    // Reduce before the trig calls: for large |alpha * t| the direct argument
    // would lose the low-order phase bits that carry all the information.
    const double phase = reduce_phase(scale.radians_per_second * t);
    return TimeEncoding{std::cos(phase), std::sin(phase)};
}

double time_similarity(Timestamp a, Timestamp b, TemporalScale scale) {
    check_timestamp(a);
    check_timestamp(b);
    check_scale(scale);
    return std::cos(reduce_phase(scale.radians_per_second * (a - b)));
}

GeoEncoding encode_geo(const GeoCoordinate& coord) {
    check_coordinate(coord);
    const double cos_lat = std::cos(coord.latitude);
    return GeoEncoding{
        cos_lat * std::cos(coord.longitude),
        cos_lat * std::sin(coord.longitude),
        std::sin(coord.latitude),
    };
}

double geo_similarity(const GeoCoordinate& a, const GeoCoordinate& b) {
    return encode_geo(a).dot(encode_geo(b));
}

TemporalScale scale_for_resolution(const PrecisionSpec& spec) {
    check_precision(spec);
    if (!(spec.min_interval_seconds > 0.0)) {
        throw std::invalid_argument("minimum interval must be positive");
    }
    return TemporalScale{std::sqrt(2.0 * spec.cosine_resolution) / spec.min_interval_seconds};
}

double horizon_for_scale(TemporalScale scale) {
    check_scale(scale);
    return std::numbers::pi / scale.radians_per_second;
}

double min_distinguishable_distance(const PrecisionSpec& spec) {
    check_precision(spec);
    if (!(spec.earth_radius_km > 0.0)) {
        throw std::invalid_argument("earth radius must be positive");
    }
    return std::sqrt(2.0 * spec.cosine_resolution) * spec.earth_radius_km;
}

}  // namespace spatcode
