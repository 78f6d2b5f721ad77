#include "spatcode/naive_window.hpp"

#include <cmath>
#include <stdexcept>

namespace spatcode {

NaiveSlidingIndex::NaiveSlidingIndex(const WindowConfig& config, const ModalitySchema& schema,
                                     const AnnConfig& ann_config)
    : config_(config),
      schema_(schema),
      ann_config_(ann_config),
      last_advance_time_(config.epoch) {
    ann_config_.dim = schema_.total_dim();
    index_ = std::make_unique<HnswIndex>(ann_config_);
}

std::int64_t NaiveSlidingIndex::unit_of(Timestamp t) const {
    return static_cast<std::int64_t>(std::floor((t - config_.epoch) / config_.unit_seconds));
}

Timestamp NaiveSlidingIndex::time_origin() const {
    return config_.epoch +
           static_cast<double>(current_unit_ - config_.bucket_count + 1) * config_.unit_seconds;
}

CompositeVector NaiveSlidingIndex::encode_in_frame(const StreamRecord& record) const {
    StreamRecord shifted = record;
    shifted.time = record.time - time_origin();
    return encode_record(schema_, shifted, scale());
}

NaiveSlidingIndex::AdvanceCost NaiveSlidingIndex::advance(Timestamp now) {
    if (now < last_advance_time_) {
        throw std::invalid_argument("window cannot advance backwards");
    }
    AdvanceCost cost;
    const std::int64_t target_unit = unit_of(now);
    while (current_unit_ < target_unit) {
        ++current_unit_;
        ++cost.boundaries_crossed;
        const std::int64_t oldest_live = current_unit_ - config_.bucket_count + 1;
        const std::size_t before = live_.size();
        std::erase_if(live_, [&](const StreamRecord& record) {
            return unit_of(record.time) < oldest_live;
        });
        cost.dropped += before - live_.size();
        rebuild(cost);
    }
    if (now > last_advance_time_) {
        last_advance_time_ = now;
    }
    return cost;
}

void NaiveSlidingIndex::rebuild(AdvanceCost& cost) {
    index_ = std::make_unique<HnswIndex>(ann_config_);
    for (const StreamRecord& record : live_) {
        const CompositeVector composite = encode_in_frame(record);
        index_->insert(composite.values, record.id);
    }
    cost.reencoded += live_.size();
    cost.reinserted += live_.size();
    cost.rebuild_distance_computations +=
        index_->maintenance().construction_distance_computations;
}

void NaiveSlidingIndex::ingest(const StreamRecord& record) {
    const std::int64_t unit = unit_of(record.time);
    if (unit > current_unit_) {
        throw std::invalid_argument("record is ahead of the window; call advance() first");
    }
    if (unit < current_unit_ - config_.bucket_count + 1) {
        return;  // older than the horizon, nothing to store
    }
    const CompositeVector composite = encode_in_frame(record);
    index_->insert(composite.values, record.id);
    live_.push_back(record);
}

SearchResult NaiveSlidingIndex::search(std::span<const double> query, int k, int ef) const {
    return index_->search(query, k, ef);
}

}  // namespace spatcode
