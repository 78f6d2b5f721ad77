#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "spatcode/config.hpp"
#include "spatcode/dataset.hpp"
#include "spatcode/experiments.hpp"
#include "spatcode/metrics.hpp"
#include "spatcode/retrieval.hpp"
#include "spatcode/rng.hpp"
#include "spatcode/snapshot.hpp"
#include "spatcode/vecmath.hpp"

namespace {

using namespace spatcode;
namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "spatcode_harness_tests" / name;
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void dump(const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    REQUIRE(out.good());
    out << bytes;
}

void check_config_equal(const ExperimentConfig& a, const ExperimentConfig& b) {
    CHECK(a.experiment_id == b.experiment_id);
    CHECK(a.method == b.method);
    CHECK(a.out_dir == b.out_dir);
    CHECK(a.seed == b.seed);
    CHECK(a.content_dims == b.content_dims);
    CHECK(a.unit_seconds == b.unit_seconds);
    CHECK(a.bucket_count == b.bucket_count);
    CHECK(a.epoch == b.epoch);
    CHECK(a.ann.max_neighbors == b.ann.max_neighbors);
    CHECK(a.ann.ef_construction == b.ann.ef_construction);
    CHECK(a.ann.default_ef_search == b.ann.default_ef_search);
    CHECK(a.ann.fragmentation_threshold == b.ann.fragmentation_threshold);
    CHECK(a.ann.seed == b.ann.seed);
    CHECK(a.record_count == b.record_count);
    CHECK(a.stream_months == b.stream_months);
    CHECK(a.distribution == b.distribution);
    CHECK(a.cluster_count == b.cluster_count);
    CHECK(a.cluster_spread == b.cluster_spread);
    CHECK(a.geo_box.lat_lo == b.geo_box.lat_lo);
    CHECK(a.geo_box.lat_hi == b.geo_box.lat_hi);
    CHECK(a.geo_box.lon_lo == b.geo_box.lon_lo);
    CHECK(a.geo_box.lon_hi == b.geo_box.lon_hi);
    CHECK(a.query_count == b.query_count);
    CHECK(a.k == b.k);
    CHECK(a.recall_ks == b.recall_ks);
    CHECK(a.ef_search == b.ef_search);
    CHECK(a.cue_noise == b.cue_noise);
    CHECK(a.weight_choices == b.weight_choices);
    CHECK(a.ef_sweep == b.ef_sweep);
    CHECK(a.alpha_factors == b.alpha_factors);
    CHECK(a.alpha_span_seconds == b.alpha_span_seconds);
    CHECK(a.alpha_epoch == b.alpha_epoch);
    CHECK(a.alpha_timestamps == b.alpha_timestamps);
    CHECK(a.filter_time_halfwidth == b.filter_time_halfwidth);
    CHECK(a.filter_geo_halfwidth == b.filter_geo_halfwidth);
    CHECK(a.hybrid.per_modality_k == b.hybrid.per_modality_k);
    CHECK(a.hybrid.merge_rule == b.hybrid.merge_rule);
    CHECK(a.hybrid.rrf_constant == b.hybrid.rrf_constant);
    CHECK(a.verify_window_equivalence == b.verify_window_equivalence);
}

// A config small enough for in-test experiment runs.
ExperimentConfig tiny_sweep_config() {
    ExperimentConfig config;
    config.content_dims = {8};
    config.record_count = 1'200;
    config.query_count = 20;
    config.ef_sweep = {10, 40};
    config.ann.ef_construction = 60;
    return config;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("configs survive the JSON round trip") {
    const ExperimentConfig defaults;
    check_config_equal(defaults, parse_config_json(config_to_json(defaults)));

    ExperimentConfig custom;
    custom.experiment_id = "night-run";
    custom.method = "hybrid";
    custom.out_dir = "elsewhere";
    custom.seed = 1234567;
    custom.content_dims = {16, 8, 4};
    custom.unit_seconds = 86'400.0;
    custom.bucket_count = 12;
    custom.epoch = 1.6e9;
    custom.ann.max_neighbors = 24;
    custom.ann.fragmentation_threshold = 0.25;
    custom.record_count = 9'999;
    custom.distribution = ContentDistribution::kUniformSphere;
    custom.cluster_spread = 0.5;
    custom.geo_box = {0.1, 0.2, -0.3, 0.4};
    custom.k = 25;
    custom.recall_ks = {5, 25};
    custom.weight_choices = {0.5, 2.0};
    custom.alpha_factors = {0.5, 2.0};
    custom.hybrid.per_modality_k = 500;
    custom.hybrid.merge_rule = MergeRule::kReciprocalRank;
    custom.hybrid.rrf_constant = 10.0;
    custom.verify_window_equivalence = false;
    check_config_equal(custom, parse_config_json(config_to_json(custom)));
}

TEST_CASE("config files reject typos and bad values") {
    CHECK_THROWS_AS(parse_config_json(R"({"unknown_thing": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_config_json(R"({"window": {"unit": 5}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_json(R"({"seed": "abc"})"), ConfigError);
    CHECK_THROWS_AS(parse_config_json(R"({"data": {"distribution": "zipf"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_json(R"({"baselines": {"hybrid": {"merge_rule": "borda"}}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_json("{"), ConfigError);
    CHECK_THROWS_AS(parse_config_json("[1, 2]"), ConfigError);
    CHECK_THROWS_AS(parse_config_json(R"({"method": "flat"})"), ConfigError);
    CHECK_THROWS_AS(parse_config_json(R"({"queries": {"k": 0}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_json(R"({"schema": {"content_dims": []}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_json(R"({"schema": {"content_dims": [8, 0]}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_json(R"({"data": {"record_count": 0}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_json(R"({"window": {"bucket_count": 0}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_json(R"({"sweeps": {"alpha_span_seconds": -1}})"), ConfigError);
    CHECK_THROWS_AS(load_config("/definitely/not/a/real/config.json"), ConfigError);
}

TEST_CASE("metric rows serialize to a stable CSV layout") {
    CHECK(std::string(kMetricsHeader) ==
          "experiment,method,step,live,insert_ops,insert_ms,maintenance_ops,compaction_ops,"
          "query_ops,query_ms,recall_at_1,recall_at_10,recall_at_50,recall_at_100,"
          "distance_computations");

    MetricRow row;
    row.experiment = "desk";
    row.method = "spatcode";
    row.step = 3.0;
    row.live = 1200;
    row.insert_ops = 34;
    row.insert_ms = 12.3456;
    row.maintenance_ops = 78;
    row.compaction_ops = 9;
    row.query_ops = 456;
    row.query_ms = 0.25;
    row.recall_at_1 = 0.5;
    row.recall_at_10 = 0.912345;
    row.recall_at_100 = 1.0;  // recall_at_50 stays unmeasured
    row.distance_computations = 98765;

    MetricRow fractional = row;
    fractional.method = "naive";
    fractional.step = 0.001;

    const std::vector<MetricRow> rows{row, fractional};
    const std::string timed = metrics_to_csv(rows);
    const std::string expected_timed =
        std::string(kMetricsHeader) + "\n" +
        "desk,spatcode,3,1200,34,12.346,78,9,456,0.2500,0.500000,0.912345,,1.000000,98765\n" +
        "desk,naive,0.001,1200,34,12.346,78,9,456,0.2500,0.500000,0.912345,,1.000000,98765\n";
    CHECK(timed == expected_timed);

    const std::string stable = metrics_to_csv_deterministic(rows);
    const std::string expected_stable =
        std::string(kMetricsHeader) + "\n" +
        "desk,spatcode,3,1200,34,,78,9,456,,0.500000,0.912345,,1.000000,98765\n" +
        "desk,naive,0.001,1200,34,,78,9,456,,0.500000,0.912345,,1.000000,98765\n";
    CHECK(stable == expected_stable);

    const fs::path dir = scratch_dir("metrics");
    const fs::path csv_path = dir / "rows.csv";
    write_metrics_csv(csv_path.string(), rows);
    CHECK(slurp(csv_path) == timed);
    CHECK_THROWS_AS(write_metrics_csv("/no_such_dir_anywhere/rows.csv", rows),
                    std::runtime_error);
}

TEST_CASE("dataset generation is deterministic and in spec") {
    const ModalitySchema schema({8, 4});
    DatasetConfig config;
    config.record_count = 500;
    config.time_start = 1'000.0;
    config.time_span_seconds = 50'000.0;
    config.distribution = ContentDistribution::kGaussianClusters;
    config.cluster_count = 8;
    config.cluster_spread = 0.3;
    config.seed = 77;

    const auto a = generate_dataset(schema, config);
    const auto b = generate_dataset(schema, config);
    REQUIRE(a.size() == 500);
    REQUIRE(b.size() == 500);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].id == static_cast<RecordId>(i));
        CHECK(a[i].id == b[i].id);
        CHECK(a[i].time == b[i].time);
        CHECK(a[i].location.latitude == b[i].location.latitude);
        CHECK(a[i].location.longitude == b[i].location.longitude);
        REQUIRE(a[i].content.size() == 2);
        CHECK(a[i].content == b[i].content);

        CHECK(a[i].time >= config.time_start);
        CHECK(a[i].time < config.time_start + config.time_span_seconds);
        if (i > 0) CHECK(a[i].time >= a[i - 1].time);
        CHECK(a[i].location.latitude >= config.geo_box.lat_lo);
        CHECK(a[i].location.latitude <= config.geo_box.lat_hi);
        CHECK(a[i].location.longitude >= config.geo_box.lon_lo);
        CHECK(a[i].location.longitude <= config.geo_box.lon_hi);
        CHECK(std::abs(l2_norm(a[i].content[0]) - 1.0) <= 1e-12);
        CHECK(std::abs(l2_norm(a[i].content[1]) - 1.0) <= 1e-12);
    }

    DatasetConfig other_seed = config;
    other_seed.seed = 78;
    const auto c = generate_dataset(schema, other_seed);
    bool any_difference = false;
    for (std::size_t i = 0; i < c.size() && !any_difference; ++i) {
        any_difference = c[i].content != a[i].content;
    }
    CHECK(any_difference);

    DatasetConfig uniform = config;
    uniform.distribution = ContentDistribution::kUniformSphere;
    const auto d = generate_dataset(schema, uniform);
    CHECK(d.size() == 500);
    CHECK(std::abs(l2_norm(d[0].content[0]) - 1.0) <= 1e-12);

    DatasetConfig bad = config;
    bad.record_count = 0;
    CHECK_THROWS_AS(generate_dataset(schema, bad), std::invalid_argument);
    bad = config;
    bad.time_span_seconds = 0.0;
    CHECK_THROWS_AS(generate_dataset(schema, bad), std::invalid_argument);
    bad = config;
    bad.geo_box.lat_lo = bad.geo_box.lat_hi + 0.1;
    CHECK_THROWS_AS(generate_dataset(schema, bad), std::invalid_argument);
    bad = config;
    bad.cluster_count = 0;
    CHECK_THROWS_AS(generate_dataset(schema, bad), std::invalid_argument);
}

TEST_CASE("query generation is deterministic and in spec") {
    const ModalitySchema schema({8, 4});
    DatasetConfig data_config;
    data_config.record_count = 200;
    data_config.time_start = 0.0;
    data_config.time_span_seconds = 10'000.0;
    data_config.seed = 5;
    const auto corpus = generate_dataset(schema, data_config);

    QueryGenConfig config;
    config.count = 40;
    config.k = 7;
    config.ef_search = 33;
    config.cue_noise = 0.25;
    config.weight_choices = {0.25, 0.5, 1.0};
    config.time_lo = 0.0;
    config.time_hi = 10'000.0;
    config.seed = 88;

    const auto a = generate_queries(schema, corpus, config);
    const auto b = generate_queries(schema, corpus, config);
    REQUIRE(a.size() == 40);
    for (std::size_t q = 0; q < a.size(); ++q) {
        CHECK(a[q].k == 7);
        CHECK(a[q].ef_search == 33);
        CHECK(a[q].time_cue == b[q].time_cue);
        CHECK(a[q].location_cue.latitude == b[q].location_cue.latitude);
        CHECK(a[q].location_cue.longitude == b[q].location_cue.longitude);
        CHECK(a[q].weights.weights == b[q].weights.weights);
        REQUIRE(a[q].content_cues.size() == 2);
        for (std::size_t slot = 0; slot < 2; ++slot) {
            CHECK(a[q].content_cues[slot].slot == static_cast<int>(slot));
            CHECK(a[q].content_cues[slot].values == b[q].content_cues[slot].values);
            CHECK(std::abs(l2_norm(a[q].content_cues[slot].values) - 1.0) <= 1e-12);
        }

        CHECK(a[q].time_cue >= config.time_lo);
        CHECK(a[q].time_cue < config.time_hi);
        for (double w : a[q].weights.weights) {
            CHECK((w == 0.25 || w == 0.5 || w == 1.0));
        }
    }

    QueryGenConfig bad = config;
    CHECK_THROWS_AS(generate_queries(schema, std::vector<StreamRecord>{}, config),
                    std::invalid_argument);
    bad.time_hi = -1.0;
    CHECK_THROWS_AS(generate_queries(schema, corpus, bad), std::invalid_argument);
    bad = config;
    bad.weight_choices = {};
    CHECK_THROWS_AS(generate_queries(schema, corpus, bad), std::invalid_argument);
    bad = config;
    bad.weight_choices = {0.5, 0.0};
    CHECK_THROWS_AS(generate_queries(schema, corpus, bad), std::invalid_argument);
}

TEST_CASE("the seeded random source is a pure function of its seed") {
    Rng a(1);
    Rng b(1);
    Rng c(2);
    bool differs = false;
    for (int i = 0; i < 1'000; ++i) {
        const std::uint64_t va = a.next_u64();
        CHECK(va == b.next_u64());
        const double ua = a.uniform01();
        CHECK(ua == b.uniform01());
        CHECK(ua >= 0.0);
        CHECK(ua < 1.0);
        differs = differs || (c.next_u64() != va);
    }
    CHECK(differs);
}

TEST_CASE("snapshots round-trip the whole engine") {
    const ModalitySchema schema({4});
    const WindowConfig window_config{1'000.0, 4, 0.0, false};
    AnnConfig ann_config;
    ann_config.dim = 9;
    ann_config.max_neighbors = 8;
    ann_config.ef_construction = 60;
    ann_config.default_ef_search = 50;
    ann_config.fragmentation_threshold = 0.5;
    ann_config.seed = 3;

    SlidingWindow window(window_config, schema);
    HnswIndex index(ann_config);
    Rng rng(0xC0FFEE);
    std::vector<StreamRecord> everything;
    for (std::int64_t unit = 0; unit <= 7; ++unit) {
        window.advance(static_cast<double>(unit) * 1'000.0, index);
        for (int j = 0; j < 10; ++j) {
            StreamRecord record;
            record.id = static_cast<RecordId>(everything.size());
            record.time = static_cast<double>(unit) * 1'000.0 + 10.0 * j;
            std::vector<double> content(4);
            for (double& x : content) x = rng.normal01();
            normalize_in_place(content);
            record.content.push_back(std::move(content));
            record.location = {rng.uniform(-0.5, 0.5), rng.uniform(-1.0, 1.0)};
            everything.push_back(record);
            REQUIRE(window.ingest(record, index).has_value());
        }
    }
    REQUIRE(window.live_count() == 40);

    std::vector<StreamRecord> live;
    for (RecordId id : window.live_ids()) {
        live.push_back(everything[static_cast<std::size_t>(id)]);
    }

    const fs::path dir = scratch_dir("snapshot");
    const fs::path path = dir / "engine.bin";
    write_snapshot(path.string(), window, ann_config, live);

    const RestoredEngine restored = read_snapshot(path.string());
    CHECK(restored.schema == schema);
    CHECK(restored.window_config.unit_seconds == window_config.unit_seconds);
    CHECK(restored.window_config.bucket_count == window_config.bucket_count);
    CHECK(restored.window_config.epoch == window_config.epoch);
    CHECK(restored.ann_config.dim == ann_config.dim);
    CHECK(restored.ann_config.max_neighbors == ann_config.max_neighbors);
    CHECK(restored.ann_config.ef_construction == ann_config.ef_construction);
    CHECK(restored.ann_config.default_ef_search == ann_config.default_ef_search);
    CHECK(restored.ann_config.fragmentation_threshold == ann_config.fragmentation_threshold);
    CHECK(restored.ann_config.seed == ann_config.seed);

    REQUIRE(restored.window != nullptr);
    REQUIRE(restored.index != nullptr);
    CHECK(restored.window->current_unit() == window.current_unit());
    CHECK(restored.window->live_count() == window.live_count());
    CHECK(restored.window->shift_step() == window.shift_step());
    CHECK(restored.index->active_count() == 40);
    for (int slot = 0; slot < 4; ++slot) {
        const auto& got = restored.window->buckets()[static_cast<std::size_t>(slot)];
        const auto& want = window.buckets()[static_cast<std::size_t>(slot)];
        CHECK(got.unit_index == want.unit_index);
        CHECK(got.record_ids == want.record_ids);
    }
    REQUIRE(restored.records.size() == live.size());
    for (std::size_t i = 0; i < live.size(); ++i) {
        CHECK(restored.records[i].id == live[i].id);
        CHECK(restored.records[i].time == live[i].time);
        CHECK(restored.records[i].location.latitude == live[i].location.latitude);
        CHECK(restored.records[i].location.longitude == live[i].location.longitude);
        CHECK(restored.records[i].content == live[i].content);
    }

    // The restored engine must score queries exactly like the original: same
    // ids, bit-identical scores, both equal to the exact scan over the live
    // records.
    QueryProfile profile;
    std::vector<double> cue(4);
    Rng qrng(515151);
    for (double& x : cue) x = qrng.normal01();
    normalize_in_place(cue);
    profile.content_cues = {{0, cue}};
    profile.time_cue = 7'500.0;
    profile.location_cue = {0.1, -0.2};
    profile.weights = WeightVector{{1.0, 0.7, 0.4}};
    profile.k = 10;
    profile.ef_search = 100;

    const auto before = query(profile, window, index, schema);
    const auto after = query(profile, *restored.window, *restored.index, restored.schema);
    const auto exact = exact_topk(profile, live, schema, window.scale());
    REQUIRE(before.results.size() == exact.size());
    REQUIRE(after.results.size() == exact.size());
    for (std::size_t i = 0; i < exact.size(); ++i) {
        CHECK(before.results[i].id == exact[i].id);
        CHECK(after.results[i].id == exact[i].id);
        CHECK(before.results[i].score == exact[i].score);
        CHECK(after.results[i].score == exact[i].score);
    }
}

TEST_CASE("an empty window snapshots and restores cleanly") {
    const ModalitySchema schema({4});
    const WindowConfig window_config{1'000.0, 4, 0.0, false};
    AnnConfig ann_config;
    ann_config.dim = 9;
    SlidingWindow window(window_config, schema);

    const fs::path path = scratch_dir("snapshot_empty") / "empty.bin";
    write_snapshot(path.string(), window, ann_config, std::vector<StreamRecord>{});
    const RestoredEngine restored = read_snapshot(path.string());
    CHECK(restored.window->live_count() == 0);
    CHECK(restored.window->current_unit() == 0);
    CHECK(restored.records.empty());
    CHECK(restored.index->size() == 0);
}

TEST_CASE("corrupted snapshots are rejected, not misread") {
    const ModalitySchema schema({4});
    const WindowConfig window_config{1'000.0, 4, 0.0, false};
    AnnConfig ann_config;
    ann_config.dim = 9;
    SlidingWindow window(window_config, schema);
    HnswIndex index(ann_config);
    Rng rng(909);
    std::vector<StreamRecord> live;
    for (int j = 0; j < 12; ++j) {
        StreamRecord record;
        record.id = static_cast<RecordId>(j);
        record.time = 10.0 * j;
        std::vector<double> content(4);
        for (double& x : content) x = rng.normal01();
        normalize_in_place(content);
        record.content.push_back(std::move(content));
        record.location = {0.0, 0.0};
        live.push_back(record);
        REQUIRE(window.ingest(record, index).has_value());
    }

    const fs::path dir = scratch_dir("snapshot_corrupt");
    const fs::path good_path = dir / "good.bin";
    write_snapshot(good_path.string(), window, ann_config, live);
    const std::string good = slurp(good_path);
    REQUIRE(good.size() > 100);

    std::string flipped = good;
    flipped[flipped.size() / 2] = static_cast<char>(flipped[flipped.size() / 2] ^ 0x5A);
    dump(dir / "flipped.bin", flipped);
    CHECK_THROWS_AS(read_snapshot((dir / "flipped.bin").string()), SnapshotError);

    dump(dir / "truncated.bin", good.substr(0, good.size() - 25));
    CHECK_THROWS_AS(read_snapshot((dir / "truncated.bin").string()), SnapshotError);

    std::string wrong_magic = good;
    wrong_magic.replace(0, 4, "XXXX");
    dump(dir / "magic.bin", wrong_magic);
    CHECK_THROWS_AS(read_snapshot((dir / "magic.bin").string()), SnapshotError);

    CHECK_THROWS_AS(read_snapshot((dir / "missing.bin").string()), SnapshotError);

    // Write-side discipline: the caller must hand over exactly the live set.
    std::vector<StreamRecord> reversed(live.rbegin(), live.rend());
    CHECK_THROWS_AS(write_snapshot((dir / "bad.bin").string(), window, ann_config, reversed),
                    std::invalid_argument);
    std::vector<StreamRecord> short_list(live.begin(), live.end() - 1);
    CHECK_THROWS_AS(write_snapshot((dir / "bad.bin").string(), window, ann_config, short_list),
                    std::invalid_argument);
}

TEST_CASE("experiment sweeps are reproducible run to run") {
    const ExperimentConfig config = tiny_sweep_config();
    RunResult first = run_ef_sweep(config);
    RunResult second = run_ef_sweep(config);

    CHECK(metrics_to_csv_deterministic(first.rows) == metrics_to_csv_deterministic(second.rows));

    auto scrub = [](RunResult& result) {
        for (auto it = result.summary.begin(); it != result.summary.end();) {
            if (it->first.find("_ms") != std::string::npos) {
                it = result.summary.erase(it);
            } else {
                ++it;
            }
        }
    };
    scrub(first);
    scrub(second);
    CHECK(first.summary == second.summary);
    CHECK(first.summary.count("recall_at_10_ef_40") == 1);
}

TEST_CASE("run artifacts land under the output directory") {
    ExperimentConfig config = tiny_sweep_config();
    const fs::path dir = scratch_dir("artifacts");
    config.out_dir = dir.string();

    const RunResult result = run_ef_sweep(config);
    write_run_artifacts(config, result, "ef_sweep");

    const fs::path run_dir = dir / "ef_sweep";
    REQUIRE(fs::exists(run_dir / "metrics.csv"));
    REQUIRE(fs::exists(run_dir / "summary.json"));
    REQUIRE(fs::exists(run_dir / "config.json"));

    const std::string csv = slurp(run_dir / "metrics.csv");
    CHECK(csv.rfind(kMetricsHeader, 0) == 0);

    const std::string summary = slurp(run_dir / "summary.json");
    CHECK(summary.find("\"run\"") != std::string::npos);
    CHECK(summary.find("ef_sweep") != std::string::npos);

    check_config_equal(config, load_config((run_dir / "config.json").string()));
}

}  // TEST_SUITE("harness")
