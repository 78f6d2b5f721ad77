#include "spatcode/window.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spatcode {

namespace {

void check_config(const WindowConfig& config) {
    if (!(config.unit_seconds > 0.0) || !std::isfinite(config.unit_seconds)) {
        throw std::invalid_argument("window unit must be finite and positive");
    }
    if (config.bucket_count < 1) {
        throw std::invalid_argument("window needs at least one bucket");
    }
    if (!std::isfinite(config.epoch)) {
        throw std::invalid_argument("window epoch must be finite");
    }
}

}  // namespace

SlidingWindow::SlidingWindow(const WindowConfig& config, const ModalitySchema& schema)
    : config_(config),
      schema_(schema),
      buckets_(static_cast<std::size_t>(config.bucket_count)),
      last_advance_time_(config.epoch),
      last_ingest_time_(config.epoch) {
    check_config(config);
}

std::int64_t SlidingWindow::unit_of(Timestamp t) const {
    return static_cast<std::int64_t>(std::floor((t - config_.epoch) / config_.unit_seconds));
}

double SlidingWindow::phase_of(Timestamp t) const {
    // Measured from the window epoch, so the first unit starts at phase 0
    // regardless of where the epoch sits on the absolute time axis.
    return reduce_phase(scale().radians_per_second * (t - config_.epoch));
}

double SlidingWindow::active_phase(double theta) const {
    return reduce_phase(theta - shift_phase());
}

std::uint64_t SlidingWindow::shift_step() const {
    // One step per unit boundary ever crossed, offset so that a fresh window
    // already holds buckets {current-L+1 .. current}: the shift places the
    // oldest live unit at phase zero.
    return static_cast<std::uint64_t>(current_unit_ + config_.bucket_count + 1);
}

double SlidingWindow::shift_phase() const {
    // phi aligns the oldest live unit with phase 0; like phase_of() it is
    // measured from the window epoch.
    const double start_phase =
        static_cast<double>(oldest_live_unit()) * config_.phase_step();
    return reduce_phase(start_phase);
}

std::optional<int> SlidingWindow::bucket_of(Timestamp t) const {
    const double relative = active_phase(phase_of(t));
    if (relative >= std::numbers::pi) {
        return std::nullopt;
    }
    int k = static_cast<int>(relative / config_.phase_step());
    // Guard the open edge: relative < pi implies k < L mathematically, but
    // the division may round up at the boundary.
    if (k >= config_.bucket_count) {
        k = config_.bucket_count - 1;
    }
    return k;
}

AdvanceResult SlidingWindow::advance(Timestamp now, HnswIndex& index) {
    if (!std::isfinite(now)) {
        throw std::invalid_argument("advance time must be finite");
    }
    if (now < config_.epoch) {
        throw std::invalid_argument("advance time precedes the window epoch");
    }
    if (now < last_advance_time_) {
        throw std::invalid_argument("window cannot advance backwards");
    }

    AdvanceResult result;
    const std::int64_t target_unit = unit_of(now);
    while (current_unit_ < target_unit) {
        ++current_unit_;
        ++result.boundaries_crossed;
        const std::int64_t expired_unit = current_unit_ - config_.bucket_count;
        if (expired_unit < 0) {
            continue;
        }
        const int slot = static_cast<int>(expired_unit % config_.bucket_count);
        BucketManifest& bucket = buckets_[static_cast<std::size_t>(slot)];
        if (bucket.unit_index != expired_unit) {
            continue;  // slot was never filled for that unit
        }
        index.deactivate(bucket.record_ids);
        live_count_ -= bucket.record_ids.size();
        result.retired_slots.push_back(slot);
        result.retired_ids.insert(result.retired_ids.end(), bucket.record_ids.begin(),
                                  bucket.record_ids.end());
        bucket = BucketManifest{};
    }
    if (now > last_advance_time_) {
        last_advance_time_ = now;
    }
    return result;
}

std::optional<int> SlidingWindow::ingest(const StreamRecord& record, HnswIndex& index) {
    if (!std::isfinite(record.time)) {
        throw std::invalid_argument("record timestamp must be finite");
    }
    if (record.time < config_.epoch) {
        throw std::invalid_argument("record timestamp precedes the window epoch");
    }
    if (!config_.allow_unordered && record.time < last_ingest_time_) {
        throw std::invalid_argument("out-of-order ingest: record at " +
                                    std::to_string(record.time) + " after " +
                                    std::to_string(last_ingest_time_));
    }
    const std::int64_t unit = unit_of(record.time);
    if (unit > current_unit_) {
        throw std::invalid_argument("record is ahead of the window; call advance() first");
    }
    if (unit < oldest_live_unit()) {
        ++discarded_count_;
        return std::nullopt;
    }

    const CompositeVector composite = encode_record(schema_, record, scale());
    const NodeId node = index.insert(composite.values, record.id);

    const int slot = static_cast<int>(unit % config_.bucket_count);
    BucketManifest& bucket = buckets_[static_cast<std::size_t>(slot)];
    if (bucket.unit_index != unit) {
        if (bucket.unit_index != -1) {
            // advance() retires a unit before its slot is needed again, so a
            // stale occupant here means the bookkeeping itself broke.
            throw std::logic_error("bucket slot still occupied by unit " +
                                   std::to_string(bucket.unit_index));
        }
        bucket.unit_index = unit;
        bucket.first_node = node;
        bucket.record_ids.clear();
    }
    bucket.record_ids.push_back(record.id);
    bucket.last_node = node;
    ++live_count_;
    if (record.time > last_ingest_time_) {
        last_ingest_time_ = record.time;
    }
    return static_cast<int>(unit - oldest_live_unit());
}

std::vector<RecordId> SlidingWindow::live_ids() const {
    std::vector<RecordId> ids;
    ids.reserve(live_count_);
    for (std::int64_t unit = oldest_live_unit(); unit <= current_unit_; ++unit) {
        if (unit < 0) continue;
        const auto& bucket = buckets_[static_cast<std::size_t>(unit % config_.bucket_count)];
        if (bucket.unit_index != unit) continue;
        ids.insert(ids.end(), bucket.record_ids.begin(), bucket.record_ids.end());
    }
    return ids;
}

}  // namespace spatcode
