#pragma once

#include <cstdint>
#include <vector>

#include "spatcode/record.hpp"
#include "spatcode/retrieval.hpp"

namespace spatcode {

// Sampling box in radians.  Defaults cover the urban region used throughout
// the experiments: latitude 29.18-30.57 N, longitude 118.33-120.62 E.
struct GeoBox {
    double lat_lo = 0.509294;
    double lat_hi = 0.533554;
    double lon_lo = 2.065352;
    double lon_hi = 2.105323;
};

enum class ContentDistribution {
    kUniformSphere,      // independent unit vectors, no cluster structure
    kGaussianClusters,   // unit cluster centers plus spherical noise
};

struct DatasetConfig {
    std::size_t record_count = 0;
    Timestamp time_start = 0.0;
    double time_span_seconds = 0.0;  // timestamps uniform in [start, start + span)
    GeoBox geo_box;
    ContentDistribution distribution = ContentDistribution::kGaussianClusters;
    int cluster_count = 32;
    double cluster_spread = 0.25;  // std-dev of the per-coordinate noise
    std::uint64_t seed = 1;
};

// Synthesizes a stream: ids 0..n-1 in ascending timestamp order, unit
// content embeddings per the configured distribution, coordinates uniform in
// the box.  Fully determined by the config (including the seed).
std::vector<StreamRecord> generate_dataset(const ModalitySchema& schema,
                                           const DatasetConfig& config);

struct QueryGenConfig {
    std::size_t count = 100;
    int k = 10;
    int ef_search = 0;
    // Content cues are corpus embeddings with spherical noise of this
    // std-dev added, then re-normalized.
    double cue_noise = 0.25;
    // Each modality weight is drawn uniformly from these choices.
    std::vector<double> weight_choices = {0.25, 0.5, 1.0};
    // Time cues are drawn uniformly from this interval.
    Timestamp time_lo = 0.0;
    Timestamp time_hi = 0.0;
    GeoBox geo_box;
    std::uint64_t seed = 1;
};

// Queries whose content cues are noisy copies of corpus records, so content
// similarity is informative but never an exact match.
std::vector<QueryProfile> generate_queries(const ModalitySchema& schema,
                                           std::span<const StreamRecord> corpus,
                                           const QueryGenConfig& config);

}  // namespace spatcode
