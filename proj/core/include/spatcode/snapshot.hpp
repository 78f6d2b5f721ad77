#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "spatcode/ann.hpp"
#include "spatcode/window.hpp"

namespace spatcode {

// Engine rebuilt from a snapshot file.
struct RestoredEngine {
    ModalitySchema schema;
    WindowConfig window_config;
    AnnConfig ann_config;
    std::unique_ptr<SlidingWindow> window;
    std::unique_ptr<HnswIndex> index;
    // Live records in the order they were replayed (the window's live order).
    std::vector<StreamRecord> records;
};

// Persists the engine: schema, window and index configuration, window state
// with all bucket manifests, and the raw payload of every live record.
//
// The format is magic "SPSC" + a version word + length-prefixed sections,
// little-endian throughout, with a trailing checksum.  Vectors are stored as
// raw doubles: the snapshot must reproduce exact scores, so no text round-
// trip is allowed anywhere near them.
//
// `live_records` must carry exactly the window's live ids in live order
// (window.live_ids()); anything else throws std::invalid_argument.
void write_snapshot(const std::string& path, const SlidingWindow& window,
                    const AnnConfig& ann_config, std::span<const StreamRecord> live_records);

// Reads a snapshot and rebuilds the engine by replaying the stored records
// through a fresh window and index.  Replay is deterministic, and the
// resulting window state is checked against the stored manifests; any
// disagreement (or a malformed file) throws SnapshotError.
//
// Note node ids restart from zero in the rebuilt index: only live records
// are replayed, so the rebuilt insertion history is the compacted one.
RestoredEngine read_snapshot(const std::string& path);

}  // namespace spatcode
