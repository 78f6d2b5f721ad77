#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "spatcode/retrieval.hpp"
#include "spatcode/rng.hpp"
#include "spatcode/vecmath.hpp"

namespace {

using namespace spatcode;

constexpr double kUnit = 1'000.0;

struct SmallEngine {
    ModalitySchema schema{std::vector<int>{6}};
    WindowConfig window_config{};
    SlidingWindow window;
    HnswIndex index;
    std::vector<StreamRecord> records;  // everything ever streamed, id order

    SmallEngine()
        : window_config{kUnit, 6, 0.0, false},
          window(window_config, schema),
          index(make_ann()) {
        Rng rng(60601);
        RecordId next_id = 0;
        for (std::int64_t unit = 0; unit <= 9; ++unit) {
            window.advance(static_cast<double>(unit) * kUnit, index);
            for (int j = 0; j < 15; ++j) {
                StreamRecord record;
                record.id = next_id++;
                record.time = static_cast<double>(unit) * kUnit + 60.0 * j;
                std::vector<double> content(6);
                for (double& x : content) x = rng.normal01();
                normalize_in_place(content);
                record.content.push_back(std::move(content));
                record.location = {rng.uniform(-1.2, 1.2), rng.uniform(-3.0, 3.0)};
                records.push_back(record);
                REQUIRE(window.ingest(record, index).has_value());
            }
        }
    }

    static AnnConfig make_ann() {
        AnnConfig config;
        config.dim = 11;  // 6 content + 2 time + 3 geo
        config.max_neighbors = 8;
        config.ef_construction = 80;
        config.default_ef_search = 50;
        config.fragmentation_threshold = 0.0;
        config.seed = 13;
        return config;
    }

    // Records still inside the horizon (units 4..9 after the stream above).
    std::vector<StreamRecord> live_records() const {
        return {records.begin() + 60, records.end()};
    }

    QueryProfile make_profile(Rng& rng) const {
        QueryProfile profile;
        std::vector<double> cue(6);
        for (double& x : cue) x = rng.normal01();
        normalize_in_place(cue);
        profile.content_cues = {{0, cue}};
        profile.time_cue = 8'500.0;
        profile.location_cue = {rng.uniform(-1.2, 1.2), rng.uniform(-3.0, 3.0)};
        profile.weights = WeightVector{{1.0, 0.8, 0.5}};
        profile.k = 10;
        profile.ef_search = 200;  // wider than the whole graph: exhaustive
        return profile;
    }
};

}  // namespace

TEST_SUITE("retrieval") {

TEST_CASE("graph retrieval at full beam equals the exact live scan") {
    SmallEngine engine;
    REQUIRE(engine.window.live_count() == 90);
    Rng rng(11011);

    for (int trial = 0; trial < 5; ++trial) {
        const QueryProfile profile = engine.make_profile(rng);
        const QueryResponse got =
            query(profile, engine.window, engine.index, engine.schema);
        const auto want = exact_topk(profile, engine.live_records(), engine.schema,
                                     engine.window.scale());
        REQUIRE(got.results.size() == want.size());
        for (std::size_t i = 0; i < want.size(); ++i) {
            CHECK(got.results[i].id == want[i].id);
            CHECK(got.results[i].score == want[i].score);
        }
        CHECK(got.stats.distance_computations > 0);
    }
}

TEST_CASE("per-field scores decompose the fused score") {
    SmallEngine engine;
    Rng rng(22022);
    QueryProfile profile = engine.make_profile(rng);
    profile.with_per_field_scores = true;

    const QueryResponse response =
        query(profile, engine.window, engine.index, engine.schema);
    REQUIRE(!response.results.empty());
    const TemporalScale scale = engine.window.scale();
    for (const ScoredResult& hit : response.results) {
        const StreamRecord& record = engine.records[static_cast<std::size_t>(hit.id)];
        REQUIRE(hit.per_field_scores.size() == 3);
        CHECK(std::abs(hit.per_field_scores[0] -
                       dot(record.content[0], profile.content_cues[0].values)) <= 1e-12);
        CHECK(std::abs(hit.per_field_scores[1] -
                       time_similarity(record.time, profile.time_cue, scale)) <= 1e-12);
        CHECK(std::abs(hit.per_field_scores[2] -
                       geo_similarity(record.location, profile.location_cue)) <= 1e-12);

        // One fused inner product carries the whole weighted combination.
        const double recombined = 1.0 * hit.per_field_scores[0] +
                                  0.8 * hit.per_field_scores[1] +
                                  0.5 * hit.per_field_scores[2];
        CHECK(std::abs(std::sqrt(3.0) * hit.score - recombined) <= 1e-9);
    }
}

TEST_CASE("query normalization rescales scores without reordering") {
    SmallEngine engine;
    Rng rng(33033);
    QueryProfile profile = engine.make_profile(rng);

    const QueryResponse plain = query(profile, engine.window, engine.index, engine.schema);
    profile.normalize_query = true;
    const QueryResponse normalized =
        query(profile, engine.window, engine.index, engine.schema);

    const double scale = profile.weights.l2_norm();
    REQUIRE(plain.results.size() == normalized.results.size());
    for (std::size_t i = 0; i < plain.results.size(); ++i) {
        CHECK(plain.results[i].id == normalized.results[i].id);
        CHECK(std::abs(normalized.results[i].score * scale - plain.results[i].score) <= 1e-12);
    }
}

TEST_CASE("queries aimed outside the window are flagged but still answered") {
    SmallEngine engine;
    Rng rng(44044);
    QueryProfile profile = engine.make_profile(rng);

    profile.time_cue = 9'500.0;
    CHECK(query(profile, engine.window, engine.index, engine.schema).time_cue_live);

    profile.time_cue = 1'500.0;  // that unit expired four advances ago
    const QueryResponse response =
        query(profile, engine.window, engine.index, engine.schema);
    CHECK_FALSE(response.time_cue_live);
    CHECK(response.results.size() == 10);  // nearest live records still rank
}

TEST_CASE("recall against a truth set counts only the first k hits") {
    const std::vector<RecordId> truth{1, 2, 3};
    CHECK(recall_at_k(std::vector<RecordId>{3, 2, 1}, truth, 3) == 1.0);
    CHECK(recall_at_k(std::vector<RecordId>{1, 9, 2, 3}, truth, 3) ==
          doctest::Approx(2.0 / 3.0));
    CHECK(recall_at_k(std::vector<RecordId>{2}, truth, 3) == doctest::Approx(1.0 / 3.0));
    CHECK(recall_at_k(std::vector<RecordId>{}, truth, 3) == 0.0);

    CHECK_THROWS_AS(recall_at_k(std::vector<RecordId>{1}, truth, 2), std::invalid_argument);
    CHECK_THROWS_AS(recall_at_k(std::vector<RecordId>{1}, std::vector<RecordId>{1, 1, 2}, 3),
                    std::invalid_argument);
    CHECK_THROWS_AS(recall_at_k(std::vector<RecordId>{1}, truth, 0), std::invalid_argument);
}

TEST_CASE("schema mismatches between query, window, and index are rejected") {
    SmallEngine engine;
    Rng rng(55055);
    QueryProfile profile = engine.make_profile(rng);

    QueryProfile extra_cue = profile;
    extra_cue.content_cues.push_back({0, profile.content_cues[0].values});
    CHECK_THROWS_AS(query(extra_cue, engine.window, engine.index, engine.schema), SchemaError);

    const ModalitySchema other_schema({4});
    CHECK_THROWS_AS(query(profile, engine.window, engine.index, other_schema), SchemaError);

    AnnConfig wrong_dim = SmallEngine::make_ann();
    wrong_dim.dim = 9;
    const HnswIndex wrong_index(wrong_dim);
    CHECK_THROWS_AS(query(profile, engine.window, wrong_index, engine.schema), SchemaError);
}

}  // TEST_SUITE("retrieval")
