#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace spatcode {

// One CSV row of experiment output.  `step` is the x-axis of whatever run
// produced the row: month index for streaming, ef or alpha factor for
// sweeps, modality slot for the weight ablation.
//
// Counters (ops, distance computations, recall) are deterministic for a
// given config; the *_ms fields are wall-clock and vary between machines.
// Recall fields below zero mean "not measured" and serialize as empty.
struct MetricRow {
    std::string experiment;
    std::string method;
    double step = 0.0;
    std::uint64_t live = 0;
    std::uint64_t insert_ops = 0;
    double insert_ms = 0.0;
    std::uint64_t maintenance_ops = 0;
    std::uint64_t compaction_ops = 0;
    std::uint64_t query_ops = 0;  // median distance computations per query
    double query_ms = 0.0;        // mean wall-clock per query
    double recall_at_1 = -1.0;
    double recall_at_10 = -1.0;
    double recall_at_50 = -1.0;
    double recall_at_100 = -1.0;
    std::uint64_t distance_computations = 0;  // total across the step's queries
};

// Column order of the CSV serialization.
extern const char* const kMetricsHeader;

std::string metrics_to_csv(const std::vector<MetricRow>& rows);

// The same CSV with the wall-clock columns blanked; two runs of the same
// config must produce byte-identical output of this form.
std::string metrics_to_csv_deterministic(const std::vector<MetricRow>& rows);

void write_metrics_csv(const std::string& path, const std::vector<MetricRow>& rows);

}  // namespace spatcode
