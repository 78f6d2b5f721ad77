#pragma once

#include <string>
#include <vector>

#include "spatcode/ann.hpp"
#include "spatcode/baselines.hpp"
#include "spatcode/dataset.hpp"
#include "spatcode/window.hpp"

namespace spatcode {

// Full description of one experiment run.  Every field has a desk-scale
// default; a config file overrides selectively and the CLI can override
// seed, method and output directory on top.
struct ExperimentConfig {
    std::string experiment_id = "desk";
    std::string method = "spatcode";  // spatcode | filtered | hybrid
    std::string out_dir = "out";
    std::uint64_t seed = 42;

    std::vector<int> content_dims = {32, 32};

    // Window geometry: 30-day unit, 6 buckets, i.e. a ~180-day horizon.
    double unit_seconds = 2'592'000.0;
    int bucket_count = 6;
    Timestamp epoch = 0.0;

    AnnConfig ann{.dim = 0,
                  .max_neighbors = 24,
                  .ef_construction = 200,
                  .default_ef_search = 100,
                  .fragmentation_threshold = 0.5,
                  .seed = 7};

    // Stream shape.
    std::size_t record_count = 50'000;
    std::size_t stream_months = 13;
    ContentDistribution distribution = ContentDistribution::kGaussianClusters;
    int cluster_count = 32;
    double cluster_spread = 0.25;
    GeoBox geo_box;

    // Query workload.
    std::size_t query_count = 100;
    int k = 10;
    std::vector<int> recall_ks = {1, 10, 50, 100};
    int ef_search = 100;
    double cue_noise = 0.25;
    std::vector<double> weight_choices = {0.25, 0.5, 1.0};

    // Sweeps.
    std::vector<int> ef_sweep = {10, 20, 40, 60, 80, 100};
    // Temporal-scale sweep: multipliers applied to the reference scale
    // pi / alpha_span_seconds (max phase gap = factor * pi).  The sweep runs
    // on a timestamps-only corpus of alpha_timestamps points spread over
    // alpha_span_seconds starting at alpha_epoch; a large absolute epoch
    // matters because the single-precision phases lose resolution relative
    // to their magnitude, which is the small-scale collapse under study.
    std::vector<double> alpha_factors = {1e-5, 1e-4, 1e-3, 1e-2, 0.1, 1.0, 10.0, 100.0};
    double alpha_span_seconds = 2'592'000.0;
    Timestamp alpha_epoch = 1.7e9;
    std::size_t alpha_timestamps = 50'000;

    // Scalar-filter baseline predicate half-widths around each query's cues.
    double filter_time_halfwidth = 2'592'000.0;
    double filter_geo_halfwidth = 0.005;

    HybridConfig hybrid;

    // Streaming ablation: audit that the circular window retrieves exactly
    // the same sets as a freshly rebuilt exact engine (costly but thorough).
    bool verify_window_equivalence = true;

    ModalitySchema make_schema() const { return ModalitySchema(content_dims); }
    WindowConfig make_window() const {
        return WindowConfig{unit_seconds, bucket_count, epoch, false};
    }
};

// Reads a JSON config file.  Unknown keys are rejected so typos fail loudly;
// missing keys keep their defaults.  Throws ConfigError on parse or
// validation problems.
ExperimentConfig load_config(const std::string& path);

// The same translation, exposed for tests and for the CLI's --help.
ExperimentConfig parse_config_json(const std::string& json_text);

// Serializes the fully resolved config (defaults + file + CLI overrides).
std::string config_to_json(const ExperimentConfig& config);

}  // namespace spatcode
