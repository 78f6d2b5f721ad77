#pragma once

#include <cstdint>
#include <memory>
#include <shared_mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "spatcode/record.hpp"
#include "spatcode/rng.hpp"

namespace spatcode {

// Monotone insertion handle.  Ids are assigned in ascending insertion order
// and are never reused, including across compactions, so a contiguous id
// range always denotes a contiguous span of the insertion history.
using NodeId = std::uint64_t;

struct AnnConfig {
    int dim = 0;
    // Graph degree M; layer 0 keeps up to 2 * M links per node.  Clustered
    // corpora with thin margins between neighbors need a well-connected
    // graph more than a wide construction beam, hence the generous degree.
    int max_neighbors = 24;
    // Beam width while wiring a new node into the graph.
    int ef_construction = 200;
    // Beam width used by search() when the caller passes ef = 0.
    int default_ef_search = 100;
    // deactivated / stored fraction above which deactivate() compacts the
    // graph automatically.  Zero or negative disables auto-compaction.
    double fragmentation_threshold = 0.5;
    // Seed of the level generator; fixes the graph shape for a given
    // insertion sequence.
    std::uint64_t seed = 1;
};

struct SearchStats {
    std::uint64_t distance_computations = 0;
    std::uint64_t nodes_visited = 0;
};

struct ScoredEntry {
    RecordId id = 0;
    double score = 0.0;
};

// Entries sorted by descending score; equal scores break toward the smaller
// record id so repeated runs produce identical output.
struct SearchResult {
    std::vector<ScoredEntry> entries;
    SearchStats stats;
};

struct CompactionSummary {
    std::size_t dropped = 0;    // deactivated vectors left behind
    std::size_t remaining = 0;  // vectors carried into the rebuilt graph
};

namespace detail {

// Beam entry used during graph traversal; the (score, node) pair orders are
// pinned in the implementation so traversal is a pure function of the graph.
struct BeamEntry {
    double score;
    std::uint32_t node;
};

}  // namespace detail

// Cumulative upkeep counters, used to price maintenance work in experiments.
struct MaintenanceCounters {
    std::uint64_t tombstones_marked = 0;
    std::uint64_t compactions = 0;
    std::uint64_t compaction_reinserts = 0;
    // Distance computations spent wiring nodes (initial inserts and
    // compaction reinserts).
    std::uint64_t construction_distance_computations = 0;
};

// Brute-force inner-product scan over the same id / tombstone bookkeeping as
// the graph index.  Serves as the exact oracle for recall and as the
// reference ranking in equivalence checks.
class FlatIndex {
public:
    explicit FlatIndex(int dim);

    NodeId insert(std::span<const double> vector, RecordId id);
    std::size_t deactivate(std::span<const RecordId> ids);

    // Exact top-k among active vectors, ordered by (score desc, id asc).
    SearchResult search(std::span<const double> query, int k) const;

    std::size_t size() const { return records_.size(); }
    std::size_t active_count() const { return active_count_; }
    bool contains(RecordId id) const { return position_.count(id) > 0; }
    bool is_active(RecordId id) const;
    std::span<const double> vector_of(RecordId id) const;
    std::vector<RecordId> active_ids() const;  // ascending insertion order
    int dim() const { return dim_; }

private:
    struct Entry {
        RecordId id;
        bool active;
    };

    int dim_;
    std::vector<double> vectors_;
    std::vector<Entry> records_;
    std::unordered_map<RecordId, std::size_t> position_;
    std::size_t active_count_ = 0;
    NodeId next_node_id_ = 0;
};

// Hierarchical small-world graph over raw inner-product scores.  Stored
// vectors are expected to be unit norm, which makes the score equal to the
// cosine; the index itself never re-normalizes or mutates a stored vector.
//
// Deletion is logical: deactivated nodes keep their links and stay usable as
// routing waypoints, but never appear in results.  compact() rebuilds the
// graph from the active survivors once tombstones pile up.
//
// Thread contract: any number of concurrent search() calls, or one mutating
// call (insert / deactivate / compact), guarded by an internal shared_mutex.
class HnswIndex {
public:
    explicit HnswIndex(const AnnConfig& config);

    // Copies the vector in and wires it into the graph.  Throws
    // std::invalid_argument on a dimension mismatch or a record id that is
    // already present.
    NodeId insert(std::span<const double> vector, RecordId id);

    // Beam search with width max(ef, k); ef = 0 uses the configured default.
    // Deactivated nodes are traversed but filtered from the result heap.
    SearchResult search(std::span<const double> query, int k, int ef = 0) const;

    // Marks ids as deleted; unknown or already-deleted ids are skipped.
    // Returns the number of nodes newly marked.  May trigger an automatic
    // compact() when the deactivated fraction exceeds the configured
    // threshold.
    std::size_t deactivate(std::span<const RecordId> ids);

    // Rebuilds the graph from active nodes only.  Survivors are reinserted
    // in their original insertion order with freshly assigned node ids; the
    // id counter keeps counting, so pre-compaction ids stay retired.
    CompactionSummary compact();

    std::size_t size() const;
    std::size_t active_count() const;
    bool contains(RecordId id) const;
    bool is_active(RecordId id) const;
    std::vector<double> vector_of(RecordId id) const;
    std::vector<RecordId> active_ids() const;  // ascending insertion order

    MaintenanceCounters maintenance() const;
    const AnnConfig& config() const { return config_; }

private:
    struct Node {
        NodeId node_id;
        RecordId record_id;
        int level;
        bool active;
    };

    using Candidate = detail::BeamEntry;

    std::span<const double> vec(std::uint32_t node) const;
    double score_against(std::span<const double> query, std::uint32_t node,
                         SearchStats& stats) const;
    int draw_level();
    std::uint32_t greedy_descend(std::span<const double> query, std::uint32_t entry,
                                 int from_level, int to_level, SearchStats& stats) const;
    std::vector<Candidate> search_layer(std::span<const double> query,
                                        std::uint32_t entry, int level, std::size_t ef,
                                        bool skip_inactive, SearchStats& stats) const;
    std::vector<std::uint32_t> select_neighbors(std::vector<Candidate> candidates,
                                                std::size_t max_links,
                                                SearchStats& stats) const;
    void shrink_links(std::uint32_t node, int level, SearchStats& stats);
    NodeId insert_unlocked(std::span<const double> vector, RecordId id);
    CompactionSummary compact_unlocked();

    AnnConfig config_;
    double level_multiplier_;
    Rng level_rng_;

    std::vector<double> vectors_;            // size() * dim, row-major
    std::vector<Node> nodes_;
    // links_[node][level] -> neighbor positions; level 0 first.
    std::vector<std::vector<std::vector<std::uint32_t>>> links_;
    std::unordered_map<RecordId, std::uint32_t> position_;
    std::int64_t entry_point_ = -1;
    int top_level_ = -1;
    std::size_t active_count_ = 0;
    NodeId next_node_id_ = 0;

    MaintenanceCounters counters_;
    mutable std::shared_mutex mutex_;
};

}  // namespace spatcode
