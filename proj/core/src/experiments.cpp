#include "spatcode/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numbers>
#include <numeric>

#include <nlohmann/json.hpp>

#include "spatcode/baselines.hpp"
#include "spatcode/naive_window.hpp"
#include "spatcode/retrieval.hpp"
#include "spatcode/rng.hpp"
#include "spatcode/snapshot.hpp"
#include "spatcode/vecmath.hpp"

namespace spatcode {

namespace {

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                         start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

double median_of(std::vector<std::uint64_t> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return static_cast<double>(values[n / 2]);
    return 0.5 * (static_cast<double>(values[n / 2 - 1]) + static_cast<double>(values[n / 2]));
}

double mean_of(const std::vector<double>& values) {
    if (values.empty()) return -1.0;
    return std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
}

std::uint64_t sum_of(const std::vector<std::uint64_t>& values) {
    return std::accumulate(values.begin(), values.end(), std::uint64_t{0});
}

std::vector<RecordId> ids_of(const std::vector<ScoredEntry>& entries) {
    std::vector<RecordId> ids;
    ids.reserve(entries.size());
    for (const ScoredEntry& entry : entries) ids.push_back(entry.id);
    return ids;
}

std::vector<RecordId> ids_of(const std::vector<ScoredResult>& results) {
    std::vector<RecordId> ids;
    ids.reserve(results.size());
    for (const ScoredResult& result : results) ids.push_back(result.id);
    return ids;
}

bool same_id_set(std::vector<RecordId> a, std::vector<RecordId> b) {
    if (a.size() != b.size()) return false;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

// Fills the recall fields of `row` from per-query samples; ks without
// samples (live set smaller than k) stay at "not measured".
struct RecallSamples {
    std::vector<double> at_1, at_10, at_50, at_100;

    void add(std::span<const RecordId> retrieved, const std::vector<ScoredEntry>& truth) {
        const struct {
            int k;
            std::vector<double>& sink;
        } targets[] = {{1, at_1}, {10, at_10}, {50, at_50}, {100, at_100}};
        for (const auto& target : targets) {
            if (truth.size() < static_cast<std::size_t>(target.k)) continue;
            std::vector<RecordId> truth_ids;
            truth_ids.reserve(static_cast<std::size_t>(target.k));
            for (int i = 0; i < target.k; ++i) {
                truth_ids.push_back(truth[static_cast<std::size_t>(i)].id);
            }
            target.sink.push_back(recall_at_k(retrieved, truth_ids, target.k));
        }
    }

    void fill(MetricRow& row) const {
        row.recall_at_1 = mean_of(at_1);
        row.recall_at_10 = mean_of(at_10);
        row.recall_at_50 = mean_of(at_50);
        row.recall_at_100 = mean_of(at_100);
    }
};

DatasetConfig dataset_config_of(const ExperimentConfig& config, double span_seconds) {
    DatasetConfig dconfig;
    dconfig.record_count = config.record_count;
    dconfig.time_start = config.epoch;
    dconfig.time_span_seconds = span_seconds;
    dconfig.geo_box = config.geo_box;
    dconfig.distribution = config.distribution;
    dconfig.cluster_count = config.cluster_count;
    dconfig.cluster_spread = config.cluster_spread;
    dconfig.seed = config.seed;
    return dconfig;
}

QueryGenConfig query_config_of(const ExperimentConfig& config, Timestamp time_lo,
                               Timestamp time_hi, std::uint64_t seed_salt) {
    QueryGenConfig qconfig;
    qconfig.count = config.query_count;
    qconfig.k = config.k;
    qconfig.ef_search = config.ef_search;
    qconfig.cue_noise = config.cue_noise;
    qconfig.weight_choices = config.weight_choices;
    qconfig.time_lo = time_lo;
    qconfig.time_hi = time_hi;
    qconfig.geo_box = config.geo_box;
    qconfig.seed = config.seed * 1000003ULL + seed_salt;
    return qconfig;
}

std::int64_t unit_of(Timestamp t, const WindowConfig& wconfig) {
    return static_cast<std::int64_t>(std::floor((t - wconfig.epoch) / wconfig.unit_seconds));
}

// Builds a static in-horizon engine: every record ingested, nothing retired.
struct StaticEngine {
    ModalitySchema schema;
    WindowConfig wconfig;
    AnnConfig ann;
    std::vector<StreamRecord> records;
    std::unique_ptr<SlidingWindow> window;
    std::unique_ptr<HnswIndex> index;
    std::unique_ptr<FlatIndex> mirror;
    double build_ms = 0.0;
};

StaticEngine build_static_engine(const ExperimentConfig& config, bool with_graph = true) {
    StaticEngine engine{config.make_schema(), config.make_window(), config.ann, {}, nullptr,
                        nullptr,              nullptr,              0.0};
    engine.ann.dim = engine.schema.total_dim();
    engine.records =
        generate_dataset(engine.schema, dataset_config_of(config, engine.wconfig.horizon_seconds()));
    engine.window = std::make_unique<SlidingWindow>(engine.wconfig, engine.schema);
    engine.mirror = std::make_unique<FlatIndex>(engine.schema.total_dim());
    if (with_graph) {
        engine.index = std::make_unique<HnswIndex>(engine.ann);
        Stopwatch watch;
        for (const StreamRecord& record : engine.records) {
            engine.window->advance(record.time, *engine.index);
            engine.window->ingest(record, *engine.index);
        }
        engine.build_ms = watch.ms();
    }
    for (const StreamRecord& record : engine.records) {
        engine.mirror->insert(encode_record(engine.schema, record, engine.wconfig.scale()).values,
                              record.id);
    }
    return engine;
}

}  // namespace

RunResult run_streaming_ablation(const ExperimentConfig& config) {
    const ModalitySchema schema = config.make_schema();
    const WindowConfig wconfig = config.make_window();
    AnnConfig ann = config.ann;
    ann.dim = schema.total_dim();

    const std::size_t months = config.stream_months;
    const double tau = config.unit_seconds;
    const double span = static_cast<double>(months) * tau;
    const double horizon = wconfig.horizon_seconds();

    const std::vector<StreamRecord> records =
        generate_dataset(schema, dataset_config_of(config, span));

    RunResult result;
    result.summary["months"] = static_cast<double>(months);
    result.summary["records"] = static_cast<double>(records.size());

    // --- Circular window over the append-once index. ---
    {
        SlidingWindow window(wconfig, schema);
        HnswIndex index(ann);
        FlatIndex mirror(schema.total_dim());
        std::size_t cursor = 0;
        std::uint64_t audit_queries = 0;
        std::uint64_t audit_mismatches = 0;
        std::uint64_t expired_in_results = 0;
        std::uint64_t total_maintenance = 0;

        for (std::size_t m = 0; m < months; ++m) {
            const Timestamp month_start = config.epoch + static_cast<double>(m) * tau;
            const Timestamp month_end = month_start + tau;
            MetricRow row;
            row.experiment = config.experiment_id;
            row.method = "circular";
            row.step = static_cast<double>(m);

            // Boundary maintenance: tombstone the bucket that fell out.
            const MaintenanceCounters before = index.maintenance();
            const AdvanceResult advanced = window.advance(month_start, index);
            const MaintenanceCounters after = index.maintenance();
            mirror.deactivate(advanced.retired_ids);
            row.maintenance_ops = after.tombstones_marked - before.tombstones_marked;
            row.compaction_ops = after.compaction_reinserts - before.compaction_reinserts;
            total_maintenance += row.maintenance_ops;
            result.summary["retired_month_" + std::to_string(m)] =
                static_cast<double>(advanced.retired_ids.size());

            // Ingest the month.
            const std::size_t begin = cursor;
            {
                Stopwatch watch;
                while (cursor < records.size() && records[cursor].time < month_end) {
                    window.ingest(records[cursor], index);
                    ++cursor;
                }
                row.insert_ms = watch.ms();
            }
            row.insert_ops = cursor - begin;
            for (std::size_t i = begin; i < cursor; ++i) {
                mirror.insert(encode_record(schema, records[i], wconfig.scale()).values,
                              records[i].id);
            }
            row.live = window.live_count();

            // Freshly built exact engine over only the live records, for the
            // equivalence audit.
            std::unique_ptr<FlatIndex> fresh;
            if (config.verify_window_equivalence) {
                fresh = std::make_unique<FlatIndex>(schema.total_dim());
                const std::int64_t oldest_live =
                    static_cast<std::int64_t>(m) - wconfig.bucket_count + 1;
                for (std::size_t i = 0; i < cursor; ++i) {
                    if (unit_of(records[i].time, wconfig) >= oldest_live) {
                        fresh->insert(encode_record(schema, records[i], wconfig.scale()).values,
                                      records[i].id);
                    }
                }
            }

            // Month-end retrieval.
            QueryGenConfig qconfig = query_config_of(config, std::max(config.epoch,
                                                                      month_end - horizon),
                                                     month_end, 17 + m);
            qconfig.k = 100;
            qconfig.ef_search = std::max(config.ef_search, 100);
            const auto queries =
                generate_queries(schema, std::span(records.data(), cursor), qconfig);

            std::vector<std::uint64_t> comps;
            RecallSamples recalls;
            double query_ms = 0.0;
            for (const QueryProfile& profile : queries) {
                const auto query_vector = build_query_vector(schema, profile, wconfig.scale());
                Stopwatch watch;
                const QueryResponse response = query(profile, window, index, schema);
                query_ms += watch.ms();
                comps.push_back(response.stats.distance_computations);

                const SearchResult truth = mirror.search(query_vector, 100);
                const auto retrieved = ids_of(response.results);
                recalls.add(retrieved, truth.entries);

                if (fresh) {
                    ++audit_queries;
                    const SearchResult alt = fresh->search(query_vector, 100);
                    if (!same_id_set(ids_of(truth.entries), ids_of(alt.entries))) {
                        ++audit_mismatches;
                    }
                    const std::int64_t oldest_live =
                        static_cast<std::int64_t>(m) - wconfig.bucket_count + 1;
                    for (RecordId id : retrieved) {
                        const std::int64_t unit =
                            unit_of(records[static_cast<std::size_t>(id)].time, wconfig);
                        if (unit < oldest_live || unit > static_cast<std::int64_t>(m)) {
                            ++expired_in_results;
                        }
                    }
                }
            }
            row.query_ops = static_cast<std::uint64_t>(median_of(comps));
            row.query_ms = queries.empty() ? 0.0 : query_ms / static_cast<double>(queries.size());
            row.distance_computations = sum_of(comps);
            recalls.fill(row);
            result.rows.push_back(std::move(row));
        }
        result.summary["circular_total_maintenance_ops"] = static_cast<double>(total_maintenance);
        result.summary["audit_queries"] = static_cast<double>(audit_queries);
        result.summary["audit_mismatches"] = static_cast<double>(audit_mismatches);
        result.summary["expired_in_results"] = static_cast<double>(expired_in_results);
        result.summary["final_live_circular"] = static_cast<double>(window.live_count());
    }

    // --- Re-encode-and-rebuild reference. ---
    {
        NaiveSlidingIndex naive(wconfig, schema, ann);
        std::size_t cursor = 0;
        std::uint64_t total_maintenance = 0;

        for (std::size_t m = 0; m < months; ++m) {
            const Timestamp month_start = config.epoch + static_cast<double>(m) * tau;
            const Timestamp month_end = month_start + tau;
            MetricRow row;
            row.experiment = config.experiment_id;
            row.method = "naive";
            row.step = static_cast<double>(m);

            const NaiveSlidingIndex::AdvanceCost cost = naive.advance(month_start);
            row.maintenance_ops = cost.reencoded + cost.rebuild_distance_computations;
            total_maintenance += row.maintenance_ops;
            result.summary["naive_reencoded_month_" + std::to_string(m)] =
                static_cast<double>(cost.reencoded);
            result.summary["naive_live_at_boundary_month_" + std::to_string(m)] =
                static_cast<double>(naive.live_count());

            const std::size_t begin = cursor;
            {
                Stopwatch watch;
                while (cursor < records.size() && records[cursor].time < month_end) {
                    naive.ingest(records[cursor]);
                    ++cursor;
                }
                row.insert_ms = watch.ms();
            }
            row.insert_ops = cursor - begin;
            row.live = naive.live_count();

            // Exact truth in the naive engine's own moving frame.
            FlatIndex truth_index(schema.total_dim());
            for (const StreamRecord& record : naive.live_records()) {
                truth_index.insert(naive.encode_in_frame(record).values, record.id);
            }

            QueryGenConfig qconfig = query_config_of(config, std::max(config.epoch,
                                                                      month_end - horizon),
                                                     month_end, 17 + m);
            qconfig.k = 100;
            qconfig.ef_search = std::max(config.ef_search, 100);
            const auto queries =
                generate_queries(schema, std::span(records.data(), cursor), qconfig);

            std::vector<std::uint64_t> comps;
            RecallSamples recalls;
            double query_ms = 0.0;
            for (const QueryProfile& profile : queries) {
                const auto query_vector =
                    build_query_vector(schema, profile, wconfig.scale(), naive.time_origin());
                Stopwatch watch;
                const SearchResult response =
                    naive.search(query_vector, 100, qconfig.ef_search);
                query_ms += watch.ms();
                comps.push_back(response.stats.distance_computations);
                const SearchResult truth = truth_index.search(query_vector, 100);
                recalls.add(ids_of(response.entries), truth.entries);
            }
            row.query_ops = static_cast<std::uint64_t>(median_of(comps));
            row.query_ms = queries.empty() ? 0.0 : query_ms / static_cast<double>(queries.size());
            row.distance_computations = sum_of(comps);
            recalls.fill(row);
            result.rows.push_back(std::move(row));
        }
        result.summary["naive_total_maintenance_ops"] = static_cast<double>(total_maintenance);
        result.summary["final_live_naive"] = static_cast<double>(naive.live_count());
    }

    const double circular = result.summary["circular_total_maintenance_ops"];
    const double naive = result.summary["naive_total_maintenance_ops"];
    result.summary["maintenance_ratio"] = circular > 0.0 ? naive / circular : -1.0;
    return result;
}

RunResult run_ef_sweep(const ExperimentConfig& config) {
    StaticEngine engine = build_static_engine(config);
    RunResult result;
    result.summary["build_ms"] = engine.build_ms;
    result.summary["build_distance_computations"] =
        static_cast<double>(engine.index->maintenance().construction_distance_computations);
    result.summary["records"] = static_cast<double>(engine.records.size());

    QueryGenConfig qconfig =
        query_config_of(config, config.epoch, config.epoch + engine.wconfig.horizon_seconds(),
                        777);
    const int k = std::max(config.k, 10);
    qconfig.k = k;
    const auto queries = generate_queries(engine.schema, engine.records, qconfig);

    // Truth is beam-independent; compute it once per query.
    std::vector<std::vector<ScoredEntry>> truths;
    truths.reserve(queries.size());
    for (const QueryProfile& profile : queries) {
        const auto query_vector =
            build_query_vector(engine.schema, profile, engine.wconfig.scale());
        truths.push_back(engine.mirror->search(query_vector, k).entries);
    }

    for (int ef : config.ef_sweep) {
        MetricRow row;
        row.experiment = config.experiment_id;
        row.method = config.method;
        row.step = static_cast<double>(ef);
        row.live = engine.window->live_count();

        std::vector<std::uint64_t> comps;
        RecallSamples recalls;
        double query_ms = 0.0;
        for (std::size_t q = 0; q < queries.size(); ++q) {
            QueryProfile profile = queries[q];
            profile.k = k;
            profile.ef_search = ef;
            Stopwatch watch;
            const QueryResponse response =
                query(profile, *engine.window, *engine.index, engine.schema);
            query_ms += watch.ms();
            comps.push_back(response.stats.distance_computations);
            recalls.add(ids_of(response.results), truths[q]);
        }
        row.query_ops = static_cast<std::uint64_t>(median_of(comps));
        row.query_ms = queries.empty() ? 0.0 : query_ms / static_cast<double>(queries.size());
        row.distance_computations = sum_of(comps);
        recalls.fill(row);
        result.summary["recall_at_10_ef_" + std::to_string(ef)] = row.recall_at_10;
        result.summary["median_comps_ef_" + std::to_string(ef)] = median_of(comps);
        result.rows.push_back(std::move(row));
    }
    return result;
}

namespace {

// The temporal encoder with its phase stored at single precision, the way a
// float-vector index would hold it.  The reduction and the trig run in
// double; only the phase itself is narrowed, which is the quantity whose
// resolution the scale sweep studies.
TimeEncoding encode_time_fp32(Timestamp t, TemporalScale scale) {
    const double phase =
        static_cast<double>(static_cast<float>(reduce_phase(scale.radians_per_second * t)));
    return {std::cos(phase), std::sin(phase)};
}

}  // namespace

RunResult run_alpha_sweep(const ExperimentConfig& config) {
    // Timestamps-only corpus: the content and geo modalities are removed so
    // the sweep isolates the temporal encoder.  Ground truth is the true
    // temporal proximity |t_i - t_q|; the encoded search ranks by the inner
    // product of single-precision-phase encodings.  Too small a scale and
    // the narrowed phases collapse onto each other; too large and the phase
    // gap wraps past the half circle and aliases.  Both ends lose recall.
    const double span = config.alpha_span_seconds;
    const TemporalScale base_scale{std::numbers::pi / span};
    const std::size_t n = config.alpha_timestamps;
    const int k = 10;

    Rng rng(config.seed * 1000003ULL + 4242);
    std::vector<Timestamp> times(n);
    for (Timestamp& t : times) t = config.alpha_epoch + rng.uniform(0.0, span);
    std::vector<Timestamp> query_times(config.query_count);
    for (Timestamp& t : query_times) t = config.alpha_epoch + rng.uniform(0.0, span);

    RunResult result;
    result.summary["alpha_base"] = base_scale.radians_per_second;
    result.summary["records"] = static_cast<double>(n);

    // True top-k by temporal distance, ties to the lower id.
    std::vector<std::vector<RecordId>> truth_ids(query_times.size());
    {
        std::vector<RecordId> order(n);
        for (std::size_t q = 0; q < query_times.size(); ++q) {
            const Timestamp t_q = query_times[q];
            std::iota(order.begin(), order.end(), RecordId{0});
            std::partial_sort(order.begin(), order.begin() + k, order.end(),
                              [&](RecordId a, RecordId b) {
                                  const double da = std::abs(times[a] - t_q);
                                  const double db = std::abs(times[b] - t_q);
                                  if (da != db) return da < db;
                                  return a < b;
                              });
            truth_ids[q].assign(order.begin(), order.begin() + k);
        }
    }

    for (std::size_t f = 0; f < config.alpha_factors.size(); ++f) {
        const double factor = config.alpha_factors[f];
        const TemporalScale swept{base_scale.radians_per_second * factor};

        FlatIndex swept_index(kTimeEncodingDim);
        std::vector<float> narrowed_phases;
        narrowed_phases.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            const TimeEncoding enc = encode_time_fp32(times[i], swept);
            const double values[] = {enc.x, enc.y};
            swept_index.insert(values, static_cast<RecordId>(i));
            narrowed_phases.push_back(
                static_cast<float>(reduce_phase(swept.radians_per_second * times[i])));
        }
        // Fraction of distinct stored phases: 1.0 means full resolution,
        // small values mean the narrowing collapsed the corpus.
        std::sort(narrowed_phases.begin(), narrowed_phases.end());
        const auto distinct =
            std::unique(narrowed_phases.begin(), narrowed_phases.end()) -
            narrowed_phases.begin();

        MetricRow row;
        row.experiment = config.experiment_id;
        row.method = config.method;
        row.step = factor;
        row.live = n;

        std::vector<std::uint64_t> comps;
        std::vector<double> recall_samples;
        for (std::size_t q = 0; q < query_times.size(); ++q) {
            const TimeEncoding cue = encode_time_fp32(query_times[q], swept);
            const double values[] = {cue.x, cue.y};
            const SearchResult got = swept_index.search(values, k);
            comps.push_back(got.stats.distance_computations);
            recall_samples.push_back(recall_at_k(ids_of(got.entries), truth_ids[q], k));
        }
        row.query_ops = static_cast<std::uint64_t>(median_of(comps));
        row.distance_computations = sum_of(comps);
        row.recall_at_10 = mean_of(recall_samples);
        result.summary["alpha_factor_" + std::to_string(f)] = factor;
        result.summary["recall_at_10_alpha_" + std::to_string(f)] = row.recall_at_10;
        result.summary["distinct_phase_fraction_" + std::to_string(f)] =
            static_cast<double>(distinct) / static_cast<double>(n);
        result.rows.push_back(std::move(row));
    }
    return result;
}

RunResult run_weight_ablation(const ExperimentConfig& config) {
    // Ground truth is the exact top-k under each query's own interest
    // weights.  The matched run searches with those weights; the uniform run
    // searches with the same cues but equal weights, scored against the same
    // weighted truth.  The gap is what the per-query weighting buys.
    StaticEngine engine = build_static_engine(config);
    const TemporalScale scale = engine.wconfig.scale();
    const int m = engine.schema.modality_count();
    const int k = 10;
    const int ef = std::max(config.ef_search, 100);

    QueryGenConfig qconfig =
        query_config_of(config, config.epoch, config.epoch + engine.wconfig.horizon_seconds(),
                        31337);
    qconfig.k = k;
    const auto queries = generate_queries(engine.schema, engine.records, qconfig);

    RunResult result;
    result.summary["records"] = static_cast<double>(engine.records.size());

    struct VariantStats {
        std::vector<std::uint64_t> comps;
        std::vector<double> recalls;
        double query_ms = 0.0;
    };
    VariantStats matched, uniform;
    std::size_t matched_not_worse = 0;

    for (const QueryProfile& base : queries) {
        QueryProfile profile = base;
        profile.k = k;
        profile.ef_search = ef;

        const auto truth_vector = build_query_vector(engine.schema, profile, scale);
        const auto truth = ids_of(engine.mirror->search(truth_vector, k).entries);

        Stopwatch matched_watch;
        const QueryResponse matched_response =
            query(profile, *engine.window, *engine.index, engine.schema);
        matched.query_ms += matched_watch.ms();
        matched.comps.push_back(matched_response.stats.distance_computations);
        const double matched_recall = recall_at_k(ids_of(matched_response.results), truth, k);
        matched.recalls.push_back(matched_recall);

        QueryProfile flat = profile;
        flat.weights.weights.assign(static_cast<std::size_t>(m), 1.0);
        Stopwatch uniform_watch;
        const QueryResponse uniform_response =
            query(flat, *engine.window, *engine.index, engine.schema);
        uniform.query_ms += uniform_watch.ms();
        uniform.comps.push_back(uniform_response.stats.distance_computations);
        const double uniform_recall = recall_at_k(ids_of(uniform_response.results), truth, k);
        uniform.recalls.push_back(uniform_recall);

        if (matched_recall >= uniform_recall) ++matched_not_worse;
    }

    const auto emit = [&](const char* method, const VariantStats& stats) {
        MetricRow row;
        row.experiment = config.experiment_id;
        row.method = method;
        row.step = 0.0;
        row.live = engine.records.size();
        row.query_ops = static_cast<std::uint64_t>(median_of(stats.comps));
        row.query_ms =
            queries.empty() ? 0.0 : stats.query_ms / static_cast<double>(queries.size());
        row.distance_computations = sum_of(stats.comps);
        row.recall_at_10 = mean_of(stats.recalls);
        result.summary[std::string("recall_at_10_") + method] = row.recall_at_10;
        result.rows.push_back(std::move(row));
    };
    emit("weighted", matched);
    emit("uniform", uniform);
    result.summary["weighted_minus_uniform"] =
        result.summary["recall_at_10_weighted"] - result.summary["recall_at_10_uniform"];
    result.summary["matched_not_worse_fraction"] =
        queries.empty() ? 0.0
                        : static_cast<double>(matched_not_worse) /
                              static_cast<double>(queries.size());
    return result;
}

RunResult run_method_comparison(const ExperimentConfig& config) {
    StaticEngine engine = build_static_engine(config);
    const TemporalScale scale = engine.wconfig.scale();

    RunResult result;
    result.summary["records"] = static_cast<double>(engine.records.size());
    result.summary["build_ms_spatcode"] = engine.build_ms;

    ScalarFilterBaseline filtered(engine.schema, config.ann);
    {
        Stopwatch watch;
        for (const StreamRecord& record : engine.records) {
            filtered.insert(record);
        }
        result.summary["build_ms_filtered"] = watch.ms();
    }
    HybridMultiIndexBaseline hybrid(engine.schema, scale, config.ann);
    {
        Stopwatch watch;
        for (const StreamRecord& record : engine.records) {
            hybrid.insert(record);
        }
        result.summary["build_ms_hybrid"] = watch.ms();
    }

    QueryGenConfig qconfig =
        query_config_of(config, config.epoch, config.epoch + engine.wconfig.horizon_seconds(),
                        90210);
    const int k = std::max(config.k, 10);
    qconfig.k = k;
    const auto queries = generate_queries(engine.schema, engine.records, qconfig);

    std::vector<std::vector<ScoredEntry>> truths;
    truths.reserve(queries.size());
    for (const QueryProfile& profile : queries) {
        const auto query_vector = build_query_vector(engine.schema, profile, scale);
        truths.push_back(engine.mirror->search(query_vector, k).entries);
    }

    struct MethodStats {
        std::vector<std::uint64_t> comps;
        RecallSamples recalls;
        double query_ms = 0.0;
    };
    MethodStats fused_stats, filtered_stats, hybrid_stats;
    // Filter selectivity per query: fraction of the corpus inside the
    // predicate box.  The post-filter baseline's overdraw is roughly k over
    // this number.
    std::vector<double> survival;

    for (std::size_t q = 0; q < queries.size(); ++q) {
        QueryProfile profile = queries[q];
        profile.k = k;
        profile.ef_search = config.ef_search;

        {
            Stopwatch watch;
            const QueryResponse response =
                query(profile, *engine.window, *engine.index, engine.schema);
            fused_stats.query_ms += watch.ms();
            fused_stats.comps.push_back(response.stats.distance_computations);
            fused_stats.recalls.add(ids_of(response.results), truths[q]);
        }
        {
            std::vector<double> content_weights(
                profile.weights.weights.begin(),
                profile.weights.weights.begin() + engine.schema.content_count());
            const auto content_query =
                filtered.content_query(profile.content_cues, content_weights);
            FilterPredicate predicate;
            predicate.time_lo = profile.time_cue - config.filter_time_halfwidth;
            predicate.time_hi = profile.time_cue + config.filter_time_halfwidth;
            predicate.lat_lo = profile.location_cue.latitude - config.filter_geo_halfwidth;
            predicate.lat_hi = profile.location_cue.latitude + config.filter_geo_halfwidth;
            predicate.lon_lo = profile.location_cue.longitude - config.filter_geo_halfwidth;
            predicate.lon_hi = profile.location_cue.longitude + config.filter_geo_halfwidth;
            std::size_t matching = 0;
            for (const StreamRecord& record : engine.records) {
                if (predicate.matches(record.time, record.location)) ++matching;
            }
            survival.push_back(static_cast<double>(matching) /
                               static_cast<double>(engine.records.size()));
            Stopwatch watch;
            const auto response = filtered.search(content_query, predicate, k, config.ef_search);
            filtered_stats.query_ms += watch.ms();
            filtered_stats.comps.push_back(response.stats.distance_computations);
            filtered_stats.recalls.add(ids_of(response.entries), truths[q]);
        }
        {
            Stopwatch watch;
            const auto response = hybrid.search(profile, config.hybrid);
            hybrid_stats.query_ms += watch.ms();
            hybrid_stats.comps.push_back(response.stats.distance_computations);
            hybrid_stats.recalls.add(ids_of(response.entries), truths[q]);
        }
    }

    const auto emit = [&](const char* method, MethodStats& stats) {
        MetricRow row;
        row.experiment = config.experiment_id;
        row.method = method;
        row.step = 0.0;
        row.live = engine.records.size();
        row.query_ops = static_cast<std::uint64_t>(median_of(stats.comps));
        row.query_ms =
            queries.empty() ? 0.0 : stats.query_ms / static_cast<double>(queries.size());
        row.distance_computations = sum_of(stats.comps);
        stats.recalls.fill(row);
        result.summary[std::string("median_comps_") + method] = median_of(stats.comps);
        result.summary[std::string("recall_at_10_") + method] = row.recall_at_10;
        result.rows.push_back(std::move(row));
    };
    emit("spatcode", fused_stats);
    emit("filtered", filtered_stats);
    emit("hybrid", hybrid_stats);
    result.summary["filter_survival_mean"] = mean_of(survival);
    result.summary["filter_survival_max"] =
        survival.empty() ? 0.0 : *std::max_element(survival.begin(), survival.end());
    return result;
}

void write_run_artifacts(const ExperimentConfig& config, const RunResult& result,
                         const std::string& run_name) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::path(config.out_dir) / run_name;
    fs::create_directories(dir);

    write_metrics_csv((dir / "metrics.csv").string(), result.rows);

    nlohmann::json summary;
    summary["run"] = run_name;
    summary["experiment_id"] = config.experiment_id;
    summary["values"] = result.summary;
    std::ofstream summary_file(dir / "summary.json", std::ios::trunc);
    if (!summary_file) {
        throw std::runtime_error("cannot write summary.json under " + dir.string());
    }
    summary_file << summary.dump(2) << '\n';

    std::ofstream config_file(dir / "config.json", std::ios::trunc);
    if (!config_file) {
        throw std::runtime_error("cannot write config.json under " + dir.string());
    }
    config_file << config_to_json(config);
}

}  // namespace spatcode
