#include "spatcode/dataset.hpp"

#include <algorithm>
#include <stdexcept>

#include "spatcode/rng.hpp"
#include "spatcode/vecmath.hpp"

namespace spatcode {

namespace {

std::vector<double> random_unit(Rng& rng, int dim) {
    std::vector<double> v(static_cast<std::size_t>(dim));
    double norm_sq = 0.0;
    while (norm_sq == 0.0) {
        for (double& x : v) {
            x = rng.normal01();
        }
        norm_sq = dot(v, v);
    }
    normalize_in_place(v);
    return v;
}

void check_box(const GeoBox& box) {
    if (box.lat_lo > box.lat_hi || box.lon_lo > box.lon_hi) {
        throw std::invalid_argument("geo box bounds are inverted");
    }
}

}  // namespace

std::vector<StreamRecord> generate_dataset(const ModalitySchema& schema,
                                           const DatasetConfig& config) {
    if (config.record_count == 0) {
        throw std::invalid_argument("dataset needs at least one record");
    }
    if (!(config.time_span_seconds > 0.0)) {
        throw std::invalid_argument("time span must be positive");
    }
    check_box(config.geo_box);
    Rng rng(config.seed);

    // Cluster centers per content slot, drawn up front so their count does
    // not depend on the record count.
    std::vector<std::vector<std::vector<double>>> centers(
        static_cast<std::size_t>(schema.content_count()));
    if (config.distribution == ContentDistribution::kGaussianClusters) {
        if (config.cluster_count < 1) {
            throw std::invalid_argument("cluster count must be positive");
        }
        for (int slot = 0; slot < schema.content_count(); ++slot) {
            auto& slot_centers = centers[static_cast<std::size_t>(slot)];
            slot_centers.reserve(static_cast<std::size_t>(config.cluster_count));
            for (int c = 0; c < config.cluster_count; ++c) {
                slot_centers.push_back(random_unit(rng, schema.block_dim(slot)));
            }
        }
    }

    std::vector<Timestamp> times(config.record_count);
    for (Timestamp& t : times) {
        t = config.time_start + rng.uniform01() * config.time_span_seconds;
    }
    std::sort(times.begin(), times.end());

    std::vector<StreamRecord> records;
    records.reserve(config.record_count);
    for (std::size_t i = 0; i < config.record_count; ++i) {
        StreamRecord record;
        record.id = static_cast<RecordId>(i);
        record.time = times[i];
        record.location.latitude = rng.uniform(config.geo_box.lat_lo, config.geo_box.lat_hi);
        record.location.longitude = rng.uniform(config.geo_box.lon_lo, config.geo_box.lon_hi);
        record.content.reserve(static_cast<std::size_t>(schema.content_count()));
        for (int slot = 0; slot < schema.content_count(); ++slot) {
            const int dim = schema.block_dim(slot);
            if (config.distribution == ContentDistribution::kUniformSphere) {
                record.content.push_back(random_unit(rng, dim));
            } else {
                const auto& slot_centers = centers[static_cast<std::size_t>(slot)];
                const auto& center = slot_centers[rng.uniform_index(slot_centers.size())];
                std::vector<double> v(center);
                for (double& x : v) {
                    x += config.cluster_spread * rng.normal01();
                }
                normalize_in_place(v);
                record.content.push_back(std::move(v));
            }
        }
        records.push_back(std::move(record));
    }
    return records;
}

std::vector<QueryProfile> generate_queries(const ModalitySchema& schema,
                                           std::span<const StreamRecord> corpus,
                                           const QueryGenConfig& config) {
    if (corpus.empty()) {
        throw std::invalid_argument("query generation needs a non-empty corpus");
    }
    if (config.time_hi < config.time_lo) {
        throw std::invalid_argument("query time interval is inverted");
    }
    check_box(config.geo_box);
    if (config.weight_choices.empty()) {
        throw std::invalid_argument("weight choices must be non-empty");
    }
    for (double w : config.weight_choices) {
        if (!(w > 0.0)) {
            throw std::invalid_argument("weight choices must be positive");
        }
    }
    Rng rng(config.seed);

    std::vector<QueryProfile> queries;
    queries.reserve(config.count);
    for (std::size_t q = 0; q < config.count; ++q) {
        QueryProfile profile;
        profile.k = config.k;
        profile.ef_search = config.ef_search;

        const StreamRecord& anchor = corpus[rng.uniform_index(corpus.size())];
        for (int slot = 0; slot < schema.content_count(); ++slot) {
            std::vector<double> cue = anchor.content[static_cast<std::size_t>(slot)];
            for (double& x : cue) {
                x += config.cue_noise * rng.normal01();
            }
            normalize_in_place(cue);
            profile.content_cues.push_back({slot, std::move(cue)});
        }
        profile.time_cue = rng.uniform(config.time_lo, config.time_hi);
        profile.location_cue.latitude = rng.uniform(config.geo_box.lat_lo, config.geo_box.lat_hi);
        profile.location_cue.longitude = rng.uniform(config.geo_box.lon_lo, config.geo_box.lon_hi);

        profile.weights.weights.resize(static_cast<std::size_t>(schema.modality_count()));
        for (double& w : profile.weights.weights) {
            w = config.weight_choices[rng.uniform_index(config.weight_choices.size())];
        }
        queries.push_back(std::move(profile));
    }
    return queries;
}

}  // namespace spatcode
