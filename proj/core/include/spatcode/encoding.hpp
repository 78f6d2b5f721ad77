#pragma once

#include <numbers>

namespace spatcode {

// Seconds on the stream clock.  Absolute origin is arbitrary; only
// differences enter any similarity.
using Timestamp = double;

// Angular rate of the temporal encoder, in radians per second.
struct TemporalScale {
    double radians_per_second = 0.0;
};

// A point on the unit circle: (cos(alpha * t), sin(alpha * t)).
//
// The inner product of two such points is cos(alpha * (t1 - t2)); it depends
// only on the lag and decreases monotonically while |alpha * lag| stays
// below pi, which is what makes the encoding usable as a recency score.
struct TimeEncoding {
    double x = 1.0;
    double y = 0.0;

    double dot(const TimeEncoding& other) const { return x * other.x + y * other.y; }
};

// Geographic position in radians.  Latitude in [-pi/2, pi/2], longitude in
// [-pi, pi).
struct GeoCoordinate {
    double latitude = 0.0;
    double longitude = 0.0;
};

// A point on the unit sphere.  The inner product of two encodings equals the
// cosine of the central angle between the underlying coordinates, so nearby
// places score near 1 regardless of where on the globe they sit.
struct GeoEncoding {
    double x = 1.0;
    double y = 0.0;
    double z = 0.0;

    double dot(const GeoEncoding& other) const {
        return x * other.x + y * other.y + z * other.z;
    }
};

// Resolution budget that ties the encoder scales to physical units.
//
// `cosine_resolution` is the smallest similarity drop the downstream scorer
// is expected to resolve; `min_interval_seconds` is the smallest lag that
// must produce at least that drop.
struct PrecisionSpec {
    double cosine_resolution = 1e-6;
    double min_interval_seconds = 0.0;
    double earth_radius_km = 6371.0;
};

// Reduces an angle to [0, 2*pi).
double reduce_phase(double radians);

// E_t(t) = (cos(alpha * t), sin(alpha * t)).  Throws std::invalid_argument
// for a non-finite timestamp or a non-positive scale.
TimeEncoding encode_time(Timestamp t, TemporalScale scale);

// cos(alpha * (a - b)); equals encode_time(a).dot(encode_time(b)) up to
// floating-point round-off.
double time_similarity(Timestamp a, Timestamp b, TemporalScale scale);

// E_g(lat, lon) = (cos(lat)cos(lon), cos(lat)sin(lon), sin(lat)).  Throws
// std::invalid_argument when the coordinate leaves its valid range.
GeoEncoding encode_geo(const GeoCoordinate& coord);

// Cosine of the central angle between two coordinates; equals the dot
// product of their encodings.
double geo_similarity(const GeoCoordinate& a, const GeoCoordinate& b);

// Smallest angular rate at which a lag of `min_interval_seconds` still costs
// at least `cosine_resolution` of similarity, via the small-angle bound
// 1 - cos(x) >= x^2 / 2 - x^4 / 24:
//
//     alpha = sqrt(2 * eps) / dt_min.
TemporalScale scale_for_resolution(const PrecisionSpec& spec);

// Lag at which the similarity stops being monotone for a given scale:
// pi / alpha seconds.  Records further apart than this can no longer be
// ordered by the temporal score alone.
double horizon_for_scale(TemporalScale scale);

// Great-circle distance (km) below which two points become indistinguishable
// under the spherical encoder at the given cosine resolution:
//
//     d = sqrt(2 * eps) * R_earth.
double min_distinguishable_distance(const PrecisionSpec& spec);

}  // namespace spatcode
