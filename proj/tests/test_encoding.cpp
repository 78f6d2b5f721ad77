#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "spatcode/encoding.hpp"
#include "spatcode/rng.hpp"

namespace {

using namespace spatcode;

// Independent great-circle reference: the haversine formula.  It computes the
// central angle without ever forming the 3-d embeddings, so agreement with
// the encoder is a real cross-check rather than the same algebra twice.
double haversine_cos(const GeoCoordinate& a, const GeoCoordinate& b) {
    const double sin_dlat = std::sin((b.latitude - a.latitude) / 2.0);
    const double sin_dlon = std::sin((b.longitude - a.longitude) / 2.0);
    const double h = sin_dlat * sin_dlat +
                     std::cos(a.latitude) * std::cos(b.latitude) * sin_dlon * sin_dlon;
    const double central = 2.0 * std::asin(std::min(1.0, std::sqrt(h)));
    return std::cos(central);
}

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST_SUITE("encoding") {

TEST_CASE("resolution rule pins the documented scales") {
    // A drop of 1e-6 in similarity must be visible across four hours.
    const PrecisionSpec four_hours{1e-6, 14'400.0, 6371.0};
    const TemporalScale alpha = scale_for_resolution(four_hours);
    CHECK(alpha.radians_per_second == doctest::Approx(9.8209e-8).epsilon(1e-4));
    CHECK(horizon_for_scale(alpha) == doctest::Approx(3.1989e7).epsilon(1e-4));
    CHECK(horizon_for_scale(alpha) / 86'400.0 == doctest::Approx(370.0).epsilon(2e-3));
    CHECK(min_distinguishable_distance(four_hours) == doctest::Approx(9.01).epsilon(2e-3));

    // Machine-precision budget, one-second interval.
    const PrecisionSpec machine{1e-15, 1.0, 6371.0};
    const TemporalScale fine = scale_for_resolution(machine);
    CHECK(horizon_for_scale(fine) / 86'400.0 == doctest::Approx(813.05).epsilon(1e-3));
    // 0.285 metres on the sphere.
    CHECK(min_distinguishable_distance(machine) * 1000.0 ==
          doctest::Approx(0.2849).epsilon(1e-3));
}

TEST_CASE("thirty-day buckets give the quarter-turn phase at 45 days") {
    const TemporalScale native{kPi / (6.0 * 2'592'000.0)};
    CHECK(native.radians_per_second == doctest::Approx(2.0201e-7).epsilon(1e-4));

    const TimeEncoding enc = encode_time(3'888'000.0, native);  // 45 days
    CHECK(std::abs(enc.x - std::numbers::sqrt2 / 2.0) <= 1e-12);
    CHECK(std::abs(enc.y - std::numbers::sqrt2 / 2.0) <= 1e-12);
}

TEST_CASE("phase reduction lands in [0, 2pi) everywhere") {
    const double two_pi = 2.0 * kPi;
    CHECK(reduce_phase(0.0) == 0.0);
    CHECK(reduce_phase(two_pi) == 0.0);
    CHECK(reduce_phase(3.0 * kPi) == doctest::Approx(kPi));
    CHECK(reduce_phase(-kPi / 2.0) == doctest::Approx(1.5 * kPi));
    for (double x : {-1e18, -12.3, -1e-9, -1e-300, 0.5, 7.0, 1e12, 1e300}) {
        const double reduced = reduce_phase(x);
        CHECK(reduced >= 0.0);
        CHECK(reduced < two_pi);
    }
}

TEST_CASE("temporal inner products equal the lag cosine") {
    const TemporalScale alpha = scale_for_resolution({1e-6, 14'400.0, 6371.0});
    Rng rng(20240801);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const Timestamp a = rng.uniform(0.0, 3.2e7);
        const Timestamp b = rng.uniform(0.0, 3.2e7);
        const TimeEncoding ea = encode_time(a, alpha);
        const TimeEncoding eb = encode_time(b, alpha);
        const double via_encodings = ea.dot(eb);
        worst = std::max(worst,
                         std::abs(via_encodings - std::cos(alpha.radians_per_second * (a - b))));
        CHECK(std::abs(via_encodings - time_similarity(a, b, alpha)) <= 1e-12);
        CHECK(std::abs(std::hypot(ea.x, ea.y) - 1.0) <= 1e-12);
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("similarity decays monotonically within the horizon") {
    const TemporalScale alpha = scale_for_resolution({1e-6, 14'400.0, 6371.0});
    const double horizon = horizon_for_scale(alpha);
    const Timestamp anchor = 1.0e6;
    double previous = 2.0;
    for (int step = 0; step <= 30; ++step) {
        const double lag = static_cast<double>(step) / 30.0 * 0.999 * horizon;
        const double s = time_similarity(anchor + lag, anchor, alpha);
        CHECK(s < previous);
        previous = s;
    }
    // Past the horizon the cosine folds back up: order is lost out there.
    CHECK(time_similarity(anchor + 1.6 * horizon, anchor, alpha) >
          time_similarity(anchor + 1.0 * horizon, anchor, alpha));
}

TEST_CASE("spherical encodings agree with the haversine reference") {
    Rng rng(987654321);
    for (int i = 0; i < 1000; ++i) {
        const GeoCoordinate a{rng.uniform(-kPi / 2.0, kPi / 2.0), rng.uniform(-kPi, kPi)};
        const GeoCoordinate b{rng.uniform(-kPi / 2.0, kPi / 2.0), rng.uniform(-kPi, kPi)};
        const GeoEncoding ea = encode_geo(a);
        const GeoEncoding eb = encode_geo(b);
        CHECK(std::abs(ea.dot(eb) - haversine_cos(a, b)) <= 1e-12);
        CHECK(std::abs(geo_similarity(a, b) - ea.dot(eb)) <= 1e-15);
        CHECK(std::abs(std::sqrt(ea.x * ea.x + ea.y * ea.y + ea.z * ea.z) - 1.0) <= 1e-12);
    }
}

TEST_CASE("cardinal directions encode to the unit axes") {
    const GeoEncoding equator = encode_geo({0.0, 0.0});
    CHECK(std::abs(equator.x - 1.0) <= 1e-12);
    CHECK(std::abs(equator.y) <= 1e-12);
    CHECK(std::abs(equator.z) <= 1e-12);

    const GeoEncoding east = encode_geo({0.0, kPi / 2.0});
    CHECK(std::abs(east.y - 1.0) <= 1e-12);

    const GeoEncoding north = encode_geo({kPi / 2.0, 0.0});
    CHECK(std::abs(north.z - 1.0) <= 1e-12);

    // Nearby points score just below 1; antipodes score -1.
    const GeoCoordinate here{0.51, 2.07};
    const GeoCoordinate close_by{0.51, 2.0701};
    CHECK(geo_similarity(here, close_by) > 0.99999);
    CHECK(geo_similarity(here, close_by) < 1.0);
    CHECK(geo_similarity({0.0, 0.0}, {0.0, -kPi}) == doctest::Approx(-1.0));
}

TEST_CASE("invalid encoder inputs are rejected") {
    const TemporalScale alpha{1e-7};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();

    CHECK_THROWS_AS(encode_time(nan, alpha), std::invalid_argument);
    CHECK_THROWS_AS(encode_time(inf, alpha), std::invalid_argument);
    CHECK_THROWS_AS(encode_time(0.0, TemporalScale{0.0}), std::invalid_argument);
    CHECK_THROWS_AS(encode_time(0.0, TemporalScale{-1.0}), std::invalid_argument);
    CHECK_THROWS_AS(time_similarity(0.0, nan, alpha), std::invalid_argument);

    CHECK_THROWS_AS(encode_geo({1.6, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(encode_geo({-1.6, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(encode_geo({0.0, kPi}), std::invalid_argument);  // [-pi, pi): pi excluded
    CHECK_THROWS_AS(encode_geo({0.0, 4.0}), std::invalid_argument);
    CHECK_THROWS_AS(encode_geo({nan, 0.0}), std::invalid_argument);
    CHECK_NOTHROW(encode_geo({kPi / 2.0, 0.0}));
    CHECK_NOTHROW(encode_geo({0.0, -kPi}));

    CHECK_THROWS_AS(scale_for_resolution({1e-6, 0.0, 6371.0}), std::invalid_argument);
    CHECK_THROWS_AS(scale_for_resolution({0.0, 10.0, 6371.0}), std::invalid_argument);
    CHECK_THROWS_AS(scale_for_resolution({1.5, 10.0, 6371.0}), std::invalid_argument);
    CHECK_THROWS_AS(horizon_for_scale(TemporalScale{0.0}), std::invalid_argument);
    CHECK_THROWS_AS(min_distinguishable_distance({1e-6, 1.0, 0.0}), std::invalid_argument);
}

}  // TEST_SUITE("encoding")
