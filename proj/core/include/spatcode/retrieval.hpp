#pragma once

#include <span>
#include <vector>

#include "spatcode/ann.hpp"
#include "spatcode/composite.hpp"
#include "spatcode/window.hpp"

namespace spatcode {

// A multi-modality retrieval request.
//
// One cue per content slot (an empty cue is allowed when its weight is
// zero), plus a target time and place, plus one weight per modality in slot
// order (content..., time, geo).
struct QueryProfile {
    std::vector<ModalityEmbedding> content_cues;
    Timestamp time_cue = 0.0;
    GeoCoordinate location_cue;
    WeightVector weights;
    int k = 10;
    // Beam width; 0 falls back to the index default.
    int ef_search = 0;
    // Divide the query by |w|; rescales every score identically, so the
    // ranking is unchanged.
    bool normalize_query = false;
    // Also report the per-modality cosines of each hit.
    bool with_per_field_scores = false;
};

struct ScoredResult {
    RecordId id = 0;
    // Inner product of the stored composite with the (possibly normalized)
    // weighted query.  For an unnormalized query,
    // sqrt(m) * score == sum_i w_i * <v_i, q_i>.
    double score = 0.0;
    // Per-modality cosines <v_i, q_i> in slot order; zero for absent cues.
    // Filled only when requested.
    std::vector<double> per_field_scores;
};

struct QueryResponse {
    std::vector<ScoredResult> results;
    SearchStats stats;
    // False when the time cue itself already lies outside the live window;
    // results are still returned (nearest live phases win), callers may
    // want to warn.
    bool time_cue_live = true;
};

// Unit cues for every slot: the profile's content cues plus the encoded
// time and geo cues.  `time_origin` shifts the temporal cue into a moving
// encoding frame (0 for the circular window, which encodes absolute phases).
std::vector<ModalityEmbedding> assemble_cues(const ModalitySchema& schema,
                                             const QueryProfile& profile, TemporalScale scale,
                                             Timestamp time_origin = 0.0);

// Assembles the weighted query vector for a profile.
std::vector<double> build_query_vector(const ModalitySchema& schema, const QueryProfile& profile,
                                       TemporalScale scale, Timestamp time_origin = 0.0);

// Top-k over the live window through the graph index.  Expired records are
// never returned: the window tombstones them at advance() and the index
// filters tombstones from results.  Throws SchemaError when the profile or
// the index does not match the schema.
QueryResponse query(const QueryProfile& profile, const SlidingWindow& window,
                    const HnswIndex& index, const ModalitySchema& schema);

// Exact top-k by full scan over the given records: encodes each record at
// `scale` and scores it against the assembled query.  The comparison oracle
// for everything ANN-side.
std::vector<ScoredResult> exact_topk(const QueryProfile& profile,
                                     std::span<const StreamRecord> records,
                                     const ModalitySchema& schema, TemporalScale scale);

// |retrieved(first k) ∩ truth| / k.  `truth` must contain exactly k ids.
double recall_at_k(std::span<const RecordId> retrieved, std::span<const RecordId> truth, int k);

}  // namespace spatcode
