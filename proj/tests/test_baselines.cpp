#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "spatcode/baselines.hpp"
#include "spatcode/rng.hpp"
#include "spatcode/vecmath.hpp"

namespace {

using namespace spatcode;

std::vector<double> unit_vec(Rng& rng, int dim) {
    std::vector<double> v(static_cast<std::size_t>(dim));
    for (double& x : v) x = rng.normal01();
    normalize_in_place(v);
    return v;
}

AnnConfig baseline_ann(std::uint64_t seed) {
    AnnConfig config;
    config.dim = 1;  // overwritten per index by the baselines
    config.max_neighbors = 8;
    config.ef_construction = 80;
    config.default_ef_search = 60;
    config.fragmentation_threshold = 0.0;
    config.seed = seed;
    return config;
}

std::vector<StreamRecord> scattered_records(std::uint64_t seed, std::size_t n, int content_dim) {
    Rng rng(seed);
    std::vector<StreamRecord> records;
    records.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        StreamRecord record;
        record.id = static_cast<RecordId>(i);
        record.content.push_back(unit_vec(rng, content_dim));
        record.time = rng.uniform(0.0, 1'000.0);
        record.location = {rng.uniform(-0.3, 0.3), rng.uniform(-0.6, 0.6)};
        records.push_back(std::move(record));
    }
    return records;
}

FilterPredicate wide_open() {
    return FilterPredicate{-1e12, 1e12, -2.0, 2.0, -4.0, 4.0};
}

}  // namespace

TEST_SUITE("baselines") {

TEST_CASE("scalar predicates are inclusive boxes") {
    const FilterPredicate p{10.0, 20.0, -0.1, 0.1, 1.0, 2.0};
    CHECK(p.matches(10.0, {-0.1, 1.0}));
    CHECK(p.matches(20.0, {0.1, 2.0}));
    CHECK(p.matches(15.0, {0.0, 1.5}));
    CHECK_FALSE(p.matches(9.999, {0.0, 1.5}));
    CHECK_FALSE(p.matches(20.001, {0.0, 1.5}));
    CHECK_FALSE(p.matches(15.0, {0.2, 1.5}));
    CHECK_FALSE(p.matches(15.0, {0.0, 0.5}));
    CHECK_FALSE(p.matches(15.0, {0.0, 2.5}));
}

TEST_CASE("content-only vectors concatenate the content blocks") {
    const ModalitySchema schema({4, 2});
    ScalarFilterBaseline baseline(schema, baseline_ann(1));
    CHECK(baseline.content_dim() == 6);

    Rng rng(111);
    StreamRecord record;
    record.id = 0;
    record.content = {unit_vec(rng, 4), unit_vec(rng, 2)};
    record.time = 5.0;
    record.location = {0.0, 0.0};

    const auto stored = baseline.content_vector(record);
    REQUIRE(stored.size() == 6);
    CHECK(std::abs(l2_norm(stored) - 1.0) <= 1e-12);
    const double scale = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < 4; ++i) {
        CHECK(stored[static_cast<std::size_t>(i)] ==
              scale * record.content[0][static_cast<std::size_t>(i)]);
    }
    for (int i = 0; i < 2; ++i) {
        CHECK(stored[static_cast<std::size_t>(4 + i)] ==
              scale * record.content[1][static_cast<std::size_t>(i)]);
    }

    const auto q0 = unit_vec(rng, 4);
    const auto q1 = unit_vec(rng, 2);
    const std::vector<ModalityEmbedding> cues{{0, q0}, {1, q1}};
    const std::vector<double> weights{0.7, 0.3};
    const auto query = baseline.content_query(cues, weights);
    REQUIRE(query.size() == 6);
    const double combined = std::sqrt(2.0) * dot(stored, query);
    const double direct = 0.7 * dot(record.content[0], q0) + 0.3 * dot(record.content[1], q1);
    CHECK(std::abs(combined - direct) <= 1e-12);

    CHECK_THROWS_AS(baseline.content_query(cues, std::vector<double>{0.7}), SchemaError);
    CHECK_THROWS_AS(
        baseline.content_query(std::vector<ModalityEmbedding>{{0, q0}, {1, q0}}, weights),
        SchemaError);
}

TEST_CASE("post-filtering widens until it finds k survivors") {
    const ModalitySchema schema({5});
    const auto records = scattered_records(24680, 120, 5);
    ScalarFilterBaseline baseline(schema, baseline_ann(17));
    for (const auto& record : records) baseline.insert(record);

    Rng qrng(13579);
    const auto cue = unit_vec(qrng, 5);
    const auto query =
        baseline.content_query(std::vector<ModalityEmbedding>{{0, cue}},
                               std::vector<double>{1.0});
    // Roughly a quarter of the corpus is early enough to pass.
    const FilterPredicate predicate{0.0, 250.0, -2.0, 2.0, -4.0, 4.0};

    const auto result = baseline.search(query, predicate, 10, 120);
    CHECK(result.widenings >= 1);
    CHECK(result.final_budget > 10);

    // Reference: exact content ranking, then the predicate, then the cut.
    std::vector<ScoredEntry> survivors;
    for (const auto& record : records) {
        if (!predicate.matches(record.time, record.location)) continue;
        survivors.push_back({record.id, dot(query, baseline.content_vector(record))});
    }
    std::sort(survivors.begin(), survivors.end(), [](const auto& a, const auto& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    REQUIRE(survivors.size() >= 10);
    survivors.resize(10);

    REQUIRE(result.entries.size() == 10);
    for (std::size_t i = 0; i < survivors.size(); ++i) {
        CHECK(result.entries[i].id == survivors[i].id);
        CHECK(result.entries[i].score == survivors[i].score);
    }
}

TEST_CASE("an unsatisfiable predicate terminates with nothing") {
    const ModalitySchema schema({5});
    const auto records = scattered_records(86420, 60, 5);
    ScalarFilterBaseline baseline(schema, baseline_ann(19));
    for (const auto& record : records) baseline.insert(record);

    Rng qrng(2468);
    const auto query = baseline.content_query(
        std::vector<ModalityEmbedding>{{0, unit_vec(qrng, 5)}}, std::vector<double>{1.0});
    const FilterPredicate impossible{10.0, 5.0, -2.0, 2.0, -4.0, 4.0};  // empty interval

    const auto result = baseline.search(query, impossible, 10, 60);
    CHECK(result.entries.empty());
    CHECK(result.widenings >= 1);  // it did try harder before giving up

    CHECK_THROWS_AS(baseline.search(query, impossible, 0, 60), std::invalid_argument);
}

TEST_CASE("deactivated records never surface from the filter baseline") {
    const ModalitySchema schema({5});
    const auto records = scattered_records(999, 80, 5);
    ScalarFilterBaseline baseline(schema, baseline_ann(23));
    for (const auto& record : records) baseline.insert(record);

    std::vector<RecordId> kill;
    for (RecordId id = 0; id < 10; ++id) kill.push_back(id);
    CHECK(baseline.deactivate(kill) == 10);
    CHECK(baseline.active_count() == 70);

    Rng qrng(1000);
    const auto query = baseline.content_query(
        std::vector<ModalityEmbedding>{{0, unit_vec(qrng, 5)}}, std::vector<double>{1.0});
    const auto result = baseline.search(query, wide_open(), 70, 80);
    CHECK(result.entries.size() == 70);
    for (const auto& entry : result.entries) {
        CHECK(entry.id >= 10);
    }
}

TEST_CASE("hybrid weighted-sum at full depth reproduces the fused ranking") {
    const ModalitySchema schema({4});
    const TemporalScale scale{0.002};
    const auto records = scattered_records(55555, 100, 4);

    HybridMultiIndexBaseline hybrid(schema, scale, baseline_ann(29));
    for (const auto& record : records) hybrid.insert(record);
    CHECK(hybrid.size() == 100);

    Rng qrng(777);
    for (int trial = 0; trial < 3; ++trial) {
        QueryProfile profile;
        profile.content_cues = {{0, unit_vec(qrng, 4)}};
        profile.time_cue = qrng.uniform(0.0, 1'000.0);
        profile.location_cue = {qrng.uniform(-0.3, 0.3), qrng.uniform(-0.6, 0.6)};
        profile.weights = WeightVector{{1.0, 0.6, 0.4}};
        profile.k = 10;
        profile.ef_search = 100;

        HybridConfig config;
        config.per_modality_k = 100;  // every record in every list
        config.merge_rule = MergeRule::kWeightedSum;

        const auto got = hybrid.search(profile, config);
        const auto want = exact_topk(profile, records, schema, scale);
        REQUIRE(got.entries.size() == want.size());
        for (std::size_t i = 0; i < want.size(); ++i) {
            CHECK(got.entries[i].id == want[i].id);
            // Merged score is the weighted sum, i.e. sqrt(m) x fused score.
            CHECK(std::abs(got.entries[i].score - std::sqrt(3.0) * want[i].score) <= 1e-9);
        }
    }
}

TEST_CASE("reciprocal-rank merging scores by list position") {
    const ModalitySchema schema({2});
    const TemporalScale scale{0.002};
    HybridMultiIndexBaseline hybrid(schema, scale, baseline_ann(31));

    // Hand-built corpus with unambiguous per-modality rankings for the cue
    // below: content order 0,3,1,2; time order 0,1,2,3; geo order 0,1,2,3.
    const double r = std::sqrt(0.5);
    const std::vector<std::vector<double>> content{
        {1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {r, r}};
    for (RecordId id = 0; id < 4; ++id) {
        StreamRecord record;
        record.id = id;
        record.content.push_back(content[static_cast<std::size_t>(id)]);
        record.time = 100.0 * static_cast<double>(id);
        record.location = {0.0, 0.1 * static_cast<double>(id)};
        hybrid.insert(record);
    }

    QueryProfile profile;
    profile.content_cues = {{0, {1.0, 0.0}}};
    profile.time_cue = 0.0;
    profile.location_cue = {0.0, 0.0};
    profile.weights = WeightVector{{1.0, 0.5, 0.25}};
    profile.k = 4;
    profile.ef_search = 10;

    HybridConfig config;
    config.per_modality_k = 2;
    config.merge_rule = MergeRule::kReciprocalRank;
    config.rrf_constant = 60.0;

    const auto result = hybrid.search(profile, config);
    // Per-modality top-2 lists: content [0, 3], time [0, 1], geo [0, 1].
    // Record 2 appears nowhere, so only three candidates come back.
    REQUIRE(result.entries.size() == 3);
    CHECK(result.entries[0].id == 0);
    CHECK(result.entries[1].id == 3);
    CHECK(result.entries[2].id == 1);
    CHECK(std::abs(result.entries[0].score - (1.0 / 61.0 + 0.5 / 61.0 + 0.25 / 61.0)) <= 1e-12);
    CHECK(std::abs(result.entries[1].score - 1.0 / 62.0) <= 1e-12);
    CHECK(std::abs(result.entries[2].score - (0.5 / 62.0 + 0.25 / 62.0)) <= 1e-12);
}

TEST_CASE("hybrid searches reject malformed profiles") {
    const ModalitySchema schema({2});
    const TemporalScale scale{0.002};
    HybridMultiIndexBaseline hybrid(schema, scale, baseline_ann(37));
    StreamRecord record;
    record.id = 0;
    record.content.push_back({1.0, 0.0});
    record.time = 0.0;
    record.location = {0.0, 0.0};
    hybrid.insert(record);

    QueryProfile profile;
    profile.content_cues = {{0, {1.0, 0.0}}};
    profile.weights = WeightVector{{1.0, 1.0, 1.0}};
    profile.k = 2;
    const HybridConfig config;

    QueryProfile bad_weights = profile;
    bad_weights.weights = WeightVector{{1.0, 1.0}};
    CHECK_THROWS_AS(hybrid.search(bad_weights, config), SchemaError);

    QueryProfile bad_slot = profile;
    bad_slot.content_cues = {{5, {1.0, 0.0}}};
    CHECK_THROWS_AS(hybrid.search(bad_slot, config), SchemaError);

    QueryProfile missing_cue = profile;
    missing_cue.content_cues = {{0, {}}};
    CHECK_THROWS_AS(hybrid.search(missing_cue, config), std::invalid_argument);

    QueryProfile bad_k = profile;
    bad_k.k = 0;
    CHECK_THROWS_AS(hybrid.search(bad_k, config), std::invalid_argument);

    CHECK(hybrid.deactivate(std::vector<RecordId>{0, 9}) == 1);
}

}  // TEST_SUITE("baselines")
