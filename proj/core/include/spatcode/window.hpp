#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "spatcode/ann.hpp"
#include "spatcode/record.hpp"

namespace spatcode {

// Geometry of the circular sliding window.
//
// The half circle [0, pi) is divided into `bucket_count` arcs of pi/L each;
// one arc spans one unit interval of `unit_seconds`.  The temporal scale is
// therefore fixed at alpha = pi / (L * tau): a record one horizon old sits
// exactly at phase pi, the edge of the monotone range of the encoder.
struct WindowConfig {
    double unit_seconds = 0.0;  // tau, seconds per bucket
    int bucket_count = 0;       // L
    Timestamp epoch = 0.0;      // stream time that phase zero corresponds to
    // When set, ingest accepts timestamps in any order as long as they are
    // still inside the window; by default the stream must be non-decreasing.
    bool allow_unordered = false;

    double phase_step() const { return std::numbers::pi / bucket_count; }
    TemporalScale scale() const {
        return TemporalScale{std::numbers::pi / (bucket_count * unit_seconds)};
    }
    double horizon_seconds() const { return bucket_count * unit_seconds; }
};

// Bookkeeping for one physical bucket slot.
//
// `unit_index` is the absolute unit interval currently stored in the slot
// (interval u covers [epoch + u*tau, epoch + (u+1)*tau)); -1 marks an empty
// slot.  `first_node` / `last_node` bound the insertion offsets this bucket
// produced; node ids are monotone, so the range identifies the bucket's
// span of the insertion history even after compactions.
struct BucketManifest {
    std::int64_t unit_index = -1;
    std::vector<RecordId> record_ids;
    NodeId first_node = 0;
    NodeId last_node = 0;
};

// What one advance() call did.
struct AdvanceResult {
    int boundaries_crossed = 0;
    std::vector<int> retired_slots;      // physical slots cleared, oldest first
    std::vector<RecordId> retired_ids;   // every record tombstoned by this call
};

// Circular incremental window over an append-only vector index.
//
// Records are encoded once, with the absolute phase alpha * t, and never
// touched again.  Instead of re-encoding as time passes, the window keeps a
// rotating shift phi; a record is live exactly when its shifted phase
// (theta - phi) mod 2pi falls in [0, pi).  advance() moves phi one bucket
// arc per unit boundary and retires the bucket that fell out of the half
// circle by tombstoning its records in the index.
//
// The window owns expiry bookkeeping only; the caller owns the index and
// passes it in, which keeps the pairing explicit and lets the caller mirror
// retirement into side structures (e.g. an exact oracle).
class SlidingWindow {
public:
    SlidingWindow(const WindowConfig& config, const ModalitySchema& schema);

    // Window phase of t: alpha * (t - epoch) reduced to [0, 2pi).
    double phase_of(Timestamp t) const;

    // Phase relative to the window: (theta - phi) mod 2pi.  Values in
    // [0, pi) are live; [pi, 2pi) is expired or not yet covered.
    double active_phase(double theta) const;

    // Bucket position of t within the live aperture: 0 is the oldest live
    // bucket, bucket_count-1 the newest.  Empty when t is not live.
    std::optional<int> bucket_of(Timestamp t) const;

    // Moves the window forward to cover `now`, retiring every bucket that
    // fell out of the horizon and tombstoning its records in `index`.
    // Idempotent for a repeated `now`; throws std::invalid_argument when
    // `now` precedes either the epoch or an earlier advance.
    AdvanceResult advance(Timestamp now, HnswIndex& index);

    // Encodes the record at the window's scale, inserts it into `index`,
    // and files it in its bucket.  Returns the aperture bucket position, or
    // nullopt when the record is older than the horizon (it is then
    // discarded untouched).  Throws std::invalid_argument when the record's
    // unit interval is ahead of the last advance() or, in ordered mode,
    // when its timestamp precedes the previous ingest.
    std::optional<int> ingest(const StreamRecord& record, HnswIndex& index);

    std::size_t live_count() const { return live_count_; }
    std::uint64_t discarded_count() const { return discarded_count_; }

    // Shift state: phi = (shift_step mod 2L) * phase_step.  shift_step only
    // ever grows; it counts unit boundaries plus the fixed L+1 offset that
    // parks phase 0 on the oldest live unit.
    std::uint64_t shift_step() const;
    double shift_phase() const;

    std::int64_t current_unit() const { return current_unit_; }
    Timestamp last_advance_time() const { return last_advance_time_; }
    Timestamp last_ingest_time() const { return last_ingest_time_; }

    const std::vector<BucketManifest>& buckets() const { return buckets_; }

    // Live record ids in ingest order (ascending time for ordered streams).
    std::vector<RecordId> live_ids() const;

    const WindowConfig& config() const { return config_; }
    const ModalitySchema& schema() const { return schema_; }
    TemporalScale scale() const { return config_.scale(); }

private:
    std::int64_t unit_of(Timestamp t) const;
    std::int64_t oldest_live_unit() const { return current_unit_ - config_.bucket_count + 1; }

    WindowConfig config_;
    ModalitySchema schema_;
    std::vector<BucketManifest> buckets_;
    std::int64_t current_unit_ = 0;
    Timestamp last_advance_time_ = 0.0;
    Timestamp last_ingest_time_ = 0.0;
    std::size_t live_count_ = 0;
    std::uint64_t discarded_count_ = 0;
};

}  // namespace spatcode
