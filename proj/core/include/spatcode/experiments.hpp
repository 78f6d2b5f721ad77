#pragma once

#include <map>
#include <string>
#include <vector>

#include "spatcode/config.hpp"
#include "spatcode/metrics.hpp"

namespace spatcode {

// Output of one experiment run: CSV rows plus a flat map of scalar facts
// (medians, totals, audit counters) that summary.json and the assertions in
// the test suite read from.  Everything except the *_ms row fields is a
// deterministic function of the config.
struct RunResult {
    std::vector<MetricRow> rows;
    std::map<std::string, double> summary;
};

// Replays a multi-month stream through the circular window and through the
// re-encode-and-rebuild scheme, measuring ingest cost, maintenance cost and
// monthly retrieval quality for both.  With verify_window_equivalence set it
// additionally audits, each month, that the window's active set ranks
// exactly like a freshly built engine over only-live records, and that no
// expired record ever surfaces.
RunResult run_streaming_ablation(const ExperimentConfig& config);

// Static corpus; sweeps the search beam width and reports recall@10 and
// distance computations per query at each ef.
RunResult run_ef_sweep(const ExperimentConfig& config);

// Timestamps only: encodes a seeded set of times at several multiples of a
// base scale pi / span, with the phase passed through single precision the
// way a float pipeline would, and scores exact nearest-in-time retrieval.
// Too flat a scale collapses distinct times onto one float phase; too steep
// a scale wraps old times onto new.  The recall curve peaks in between.
RunResult run_alpha_sweep(const ExperimentConfig& config);

// Static corpus through the graph index.  Each query runs twice: once with
// its own modality weights and once with all weights forced to one, both
// scored against the exact ranking under the query's own weights.
RunResult run_weight_ablation(const ExperimentConfig& config);

// Same corpus and queries through the fused engine, the scalar-filter
// baseline and the per-modality hybrid baseline; reports per-query distance
// computations and recall against the exact fused ranking.
RunResult run_method_comparison(const ExperimentConfig& config);

// Writes <out_dir>/<run_name>/{metrics.csv, summary.json, config.json},
// creating directories as needed.
void write_run_artifacts(const ExperimentConfig& config, const RunResult& result,
                         const std::string& run_name);

}  // namespace spatcode
