#include "spatcode/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace spatcode {

const char* const kMetricsHeader =
    "experiment,method,step,live,insert_ops,insert_ms,maintenance_ops,compaction_ops,"
    "query_ops,query_ms,recall_at_1,recall_at_10,recall_at_50,recall_at_100,"
    "distance_computations";

namespace {

std::string format_double(double value, const char* format) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, format, value);
    return buffer;
}

std::string format_recall(double value) {
    return value < 0.0 ? std::string() : format_double(value, "%.6f");
}

std::string row_to_csv(const MetricRow& row, bool with_timings) {
    std::string line;
    line += row.experiment;
    line += ',';
    line += row.method;
    line += ',';
    line += format_double(row.step, "%.9g");
    line += ',';
    line += std::to_string(row.live);
    line += ',';
    line += std::to_string(row.insert_ops);
    line += ',';
    if (with_timings) line += format_double(row.insert_ms, "%.3f");
    line += ',';
    line += std::to_string(row.maintenance_ops);
    line += ',';
    line += std::to_string(row.compaction_ops);
    line += ',';
    line += std::to_string(row.query_ops);
    line += ',';
    if (with_timings) line += format_double(row.query_ms, "%.4f");
    line += ',';
    line += format_recall(row.recall_at_1);
    line += ',';
    line += format_recall(row.recall_at_10);
    line += ',';
    line += format_recall(row.recall_at_50);
    line += ',';
    line += format_recall(row.recall_at_100);
    line += ',';
    line += std::to_string(row.distance_computations);
    line += '\n';
    return line;
}

std::string to_csv(const std::vector<MetricRow>& rows, bool with_timings) {
    std::string out = kMetricsHeader;
    out += '\n';
    for (const MetricRow& row : rows) {
        out += row_to_csv(row, with_timings);
    }
    return out;
}

}  // namespace

std::string metrics_to_csv(const std::vector<MetricRow>& rows) {
    return to_csv(rows, /*with_timings=*/true);
}

std::string metrics_to_csv_deterministic(const std::vector<MetricRow>& rows) {
    return to_csv(rows, /*with_timings=*/false);
}

void write_metrics_csv(const std::string& path, const std::vector<MetricRow>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    out << metrics_to_csv(rows);
    if (!out) {
        throw std::runtime_error("failed while writing '" + path + "'");
    }
}

}  // namespace spatcode
