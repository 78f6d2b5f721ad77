#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "spatcode/ann.hpp"
#include "spatcode/window.hpp"

namespace spatcode {

// Reference sliding-window maintenance scheme used as the cost baseline.
//
// Phases are encoded relative to the start of the live span, confined to
// [0, pi).  That keeps every live record inside the monotone range, but the
// origin moves at every unit boundary: the whole live set must then be
// re-encoded and the graph rebuilt from scratch.  The circular window exists
// to avoid exactly this; this class implements the scheme faithfully so the
// two costs can be compared on the same stream.
class NaiveSlidingIndex {
public:
    struct AdvanceCost {
        int boundaries_crossed = 0;
        std::uint64_t dropped = 0;        // records expired out of the live set
        std::uint64_t reencoded = 0;      // live records whose phase was recomputed
        std::uint64_t reinserted = 0;     // graph insertions during rebuilds
        // Distance computations spent rebuilding the graph.
        std::uint64_t rebuild_distance_computations = 0;
    };

    NaiveSlidingIndex(const WindowConfig& config, const ModalitySchema& schema,
                      const AnnConfig& ann_config);

    // Crosses unit boundaries up to `now`; every boundary drops expired
    // records, shifts the encoding origin by one unit, re-encodes the
    // survivors and rebuilds the index.
    AdvanceCost advance(Timestamp now);

    // Encodes the record in the current frame and inserts it incrementally.
    void ingest(const StreamRecord& record);

    SearchResult search(std::span<const double> query, int k, int ef = 0) const;

    // Start of the live span: timestamps are encoded as alpha * (t - origin),
    // so queries against this index must be encoded the same way.
    Timestamp time_origin() const;

    const HnswIndex& index() const { return *index_; }
    const std::vector<StreamRecord>& live_records() const { return live_; }
    std::size_t live_count() const { return live_.size(); }
    std::int64_t current_unit() const { return current_unit_; }
    TemporalScale scale() const { return config_.scale(); }
    const WindowConfig& config() const { return config_; }

    // Builds a composite in this index's moving frame.
    CompositeVector encode_in_frame(const StreamRecord& record) const;

private:
    std::int64_t unit_of(Timestamp t) const;
    void rebuild(AdvanceCost& cost);

    WindowConfig config_;
    ModalitySchema schema_;
    AnnConfig ann_config_;
    std::unique_ptr<HnswIndex> index_;
    std::vector<StreamRecord> live_;
    std::int64_t current_unit_ = 0;
    Timestamp last_advance_time_ = 0.0;
};

}  // namespace spatcode
