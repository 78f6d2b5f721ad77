// Command-line driver for the spatcode benchmark harness.
//
// Every subcommand loads the experiment config (defaults, then --config,
// then the scalar overrides), runs one experiment and writes
// <out>/<run>/{metrics.csv, summary.json, config.json}.  The snapshot and
// restore commands exercise engine persistence instead.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "spatcode/dataset.hpp"
#include "spatcode/experiments.hpp"
#include "spatcode/snapshot.hpp"

namespace {

using namespace spatcode;

struct Overrides {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir;
    std::string method;
};

ExperimentConfig resolve(const Overrides& overrides) {
    ExperimentConfig config;
    if (!overrides.config_path.empty()) {
        config = load_config(overrides.config_path);
    }
    if (overrides.seed_set) config.seed = overrides.seed;
    if (!overrides.out_dir.empty()) config.out_dir = overrides.out_dir;
    if (!overrides.method.empty()) config.method = overrides.method;
    return config;
}

void report(const RunResult& result, std::initializer_list<const char*> keys) {
    for (const char* key : keys) {
        const auto it = result.summary.find(key);
        if (it != result.summary.end()) {
            std::cout << "  " << key << " = " << it->second << '\n';
        }
    }
}

void run_and_write(const ExperimentConfig& config, const RunResult& result,
                   const std::string& run_name) {
    write_run_artifacts(config, result, run_name);
    std::cout << "wrote " << (std::filesystem::path(config.out_dir) / run_name).string()
              << "/{metrics.csv, summary.json, config.json}\n";
}

// Builds the engine state the snapshot/restore pair operates on: the
// configured dataset streamed through a window + graph index.
struct EngineState {
    ModalitySchema schema;
    WindowConfig wconfig;
    std::unique_ptr<SlidingWindow> window;
    std::unique_ptr<HnswIndex> index;
    std::vector<StreamRecord> records;

    explicit EngineState(const ExperimentConfig& config)
        : schema(config.make_schema()), wconfig(config.make_window()) {
        AnnConfig ann = config.ann;
        ann.dim = schema.total_dim();
        DatasetConfig dconfig;
        dconfig.record_count = config.record_count;
        dconfig.time_start = config.epoch;
        dconfig.time_span_seconds =
            static_cast<double>(config.stream_months) * config.unit_seconds;
        dconfig.geo_box = config.geo_box;
        dconfig.distribution = config.distribution;
        dconfig.cluster_count = config.cluster_count;
        dconfig.cluster_spread = config.cluster_spread;
        dconfig.seed = config.seed;
        records = generate_dataset(schema, dconfig);
        window = std::make_unique<SlidingWindow>(wconfig, schema);
        index = std::make_unique<HnswIndex>(ann);
        for (const StreamRecord& record : records) {
            window->advance(record.time, *index);
            window->ingest(record, *index);
        }
    }

    std::vector<StreamRecord> live_records() const {
        std::vector<StreamRecord> live;
        for (RecordId id : window->live_ids()) {
            live.push_back(records[static_cast<std::size_t>(id)]);
        }
        return live;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spatiotemporal vector retrieval benchmark harness"};
    app.require_subcommand(1);

    Overrides overrides;
    app.add_option("--config", overrides.config_path, "JSON experiment config")
        ->check(CLI::ExistingFile);
    auto* seed_option = app.add_option("--seed", overrides.seed, "override the run seed");
    app.add_option("--out", overrides.out_dir, "override the output directory");
    app.add_option("--method", overrides.method, "method label recorded in the output")
        ->check(CLI::IsMember({"spatcode", "filtered", "hybrid"}));

    std::string snapshot_path = "engine.snapshot";
    std::string dataset_path;

    auto* generate = app.add_subcommand("generate", "write the configured dataset as JSONL");
    generate->add_option("--file", dataset_path, "output path (default <out>/dataset.jsonl)");
    auto* stream = app.add_subcommand("stream-ablation",
                                   "multi-month stream: circular window vs re-encode rebuild");
    auto* ef = app.add_subcommand("ef-sweep", "recall / distance-computation curve over ef");
    auto* alpha = app.add_subcommand("alpha-sweep", "retrieval quality across temporal scales");
    auto* weights = app.add_subcommand("weight-ablation",
                                       "query-matched vs uniform modality weights");
    auto* compare = app.add_subcommand("compare", "fused engine vs filter and hybrid baselines");
    auto* snapshot = app.add_subcommand("snapshot", "build the engine and persist it");
    snapshot->add_option("--file", snapshot_path, "snapshot path");
    auto* restore = app.add_subcommand("restore", "load a snapshot and print its state");
    restore->add_option("--file", snapshot_path, "snapshot path")->check(CLI::ExistingFile);

    for (CLI::App* sub : {generate, stream, ef, alpha, weights, compare, snapshot, restore}) {
        sub->fallthrough();
    }

    CLI11_PARSE(app, argc, argv);
    overrides.seed_set = seed_option->count() > 0;

    try {
        const ExperimentConfig config = resolve(overrides);

        if (app.got_subcommand(generate)) {
            const ModalitySchema schema = config.make_schema();
            DatasetConfig dconfig;
            dconfig.record_count = config.record_count;
            dconfig.time_start = config.epoch;
            dconfig.time_span_seconds =
                static_cast<double>(config.stream_months) * config.unit_seconds;
            dconfig.geo_box = config.geo_box;
            dconfig.distribution = config.distribution;
            dconfig.cluster_count = config.cluster_count;
            dconfig.cluster_spread = config.cluster_spread;
            dconfig.seed = config.seed;
            const auto records = generate_dataset(schema, dconfig);

            std::filesystem::path path = dataset_path.empty()
                                             ? std::filesystem::path(config.out_dir) /
                                                   "dataset.jsonl"
                                             : std::filesystem::path(dataset_path);
            if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
            std::ofstream out(path, std::ios::trunc);
            if (!out) throw std::runtime_error("cannot write " + path.string());
            for (const StreamRecord& record : records) {
                nlohmann::json line;
                line["id"] = record.id;
                line["time"] = record.time;
                line["lat"] = record.location.latitude;
                line["lon"] = record.location.longitude;
                line["content"] = record.content;
                out << line.dump() << '\n';
            }
            std::cout << "wrote " << records.size() << " records to " << path.string() << '\n';
        } else if (app.got_subcommand(stream)) {
            const RunResult result = run_streaming_ablation(config);
            run_and_write(config, result, "stream_ablation");
            report(result, {"months", "records", "circular_total_maintenance_ops",
                            "naive_total_maintenance_ops", "maintenance_ratio",
                            "audit_queries", "audit_mismatches", "expired_in_results"});
        } else if (app.got_subcommand(ef)) {
            const RunResult result = run_ef_sweep(config);
            run_and_write(config, result, "ef_sweep");
            for (const MetricRow& row : result.rows) {
                std::cout << "  ef=" << row.step << "  recall@10=" << row.recall_at_10
                          << "  median comps=" << row.query_ops << '\n';
            }
        } else if (app.got_subcommand(alpha)) {
            const RunResult result = run_alpha_sweep(config);
            run_and_write(config, result, "alpha_sweep");
            for (const MetricRow& row : result.rows) {
                std::cout << "  scale x" << row.step << "  recall@10=" << row.recall_at_10
                          << '\n';
            }
        } else if (app.got_subcommand(weights)) {
            const RunResult result = run_weight_ablation(config);
            run_and_write(config, result, "weight_ablation");
            report(result, {"recall_at_10_weighted", "recall_at_10_uniform",
                            "weighted_minus_uniform", "matched_not_worse_fraction"});
        } else if (app.got_subcommand(compare)) {
            const RunResult result = run_method_comparison(config);
            run_and_write(config, result, "method_comparison");
            for (const MetricRow& row : result.rows) {
                std::cout << "  " << row.method << "  recall@10=" << row.recall_at_10
                          << "  median comps=" << row.query_ops << '\n';
            }
            report(result, {"filter_survival_mean", "filter_survival_max"});
        } else if (app.got_subcommand(snapshot)) {
            const EngineState engine(config);
            write_snapshot(snapshot_path, *engine.window, engine.index->config(),
                           engine.live_records());
            std::cout << "snapshot of " << engine.window->live_count() << " live records ("
                      << engine.records.size() << " streamed) written to " << snapshot_path
                      << '\n';
        } else if (app.got_subcommand(restore)) {
            const RestoredEngine engine = read_snapshot(snapshot_path);
            std::cout << "restored " << engine.window->live_count() << " live records\n"
                      << "  current unit   " << engine.window->current_unit() << '\n'
                      << "  index size     " << engine.index->size() << " ("
                      << engine.index->active_count() << " active)\n"
                      << "  content slots  " << engine.schema.content_count() << '\n'
                      << "  total dim      " << engine.schema.total_dim() << '\n';
        }
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << '\n';
        return 1;
    }
    return 0;
}
