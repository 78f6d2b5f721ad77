#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "spatcode/ann.hpp"
#include "spatcode/retrieval.hpp"

namespace spatcode {

// Inclusive scalar bounds on the non-content attributes, applied after the
// content search.  Angles in radians.
struct FilterPredicate {
    Timestamp time_lo = 0.0;
    Timestamp time_hi = 0.0;
    double lat_lo = 0.0;
    double lat_hi = 0.0;
    double lon_lo = 0.0;
    double lon_hi = 0.0;

    bool matches(Timestamp t, const GeoCoordinate& location) const {
        return t >= time_lo && t <= time_hi && location.latitude >= lat_lo &&
               location.latitude <= lat_hi && location.longitude >= lon_lo &&
               location.longitude <= lon_hi;
    }
};

// Post-filtering baseline: a content-only vector index plus scalar payloads.
//
// Search retrieves a candidate list by content similarity alone, drops the
// candidates whose time or place fails the predicate, and doubles the
// candidate budget until k survivors are found or the whole index has been
// pulled.  The doubling rounds are what make this scheme expensive under
// selective predicates.
class ScalarFilterBaseline {
public:
    struct Result {
        std::vector<ScoredEntry> entries;  // score = content similarity
        SearchStats stats;                 // summed over all widening rounds
        int widenings = 0;                 // rounds beyond the first
        std::size_t final_budget = 0;      // candidate budget of the last round
    };

    ScalarFilterBaseline(const ModalitySchema& schema, const AnnConfig& ann_template);

    void insert(const StreamRecord& record);
    std::size_t deactivate(std::span<const RecordId> ids);

    Result search(std::span<const double> content_query, const FilterPredicate& predicate,
                  int k, int ef = 0) const;

    // Content-only composite of a record: content blocks scaled by
    // 1/sqrt(#content), unit norm.
    std::vector<double> content_vector(const StreamRecord& record) const;

    // Weighted concatenation of content cues in the same layout.
    std::vector<double> content_query(std::span<const ModalityEmbedding> cues,
                                      std::span<const double> content_weights) const;

    std::size_t size() const { return index_->size(); }
    std::size_t active_count() const { return index_->active_count(); }
    const HnswIndex& index() const { return *index_; }
    int content_dim() const { return content_dim_; }

private:
    struct Payload {
        Timestamp time;
        GeoCoordinate location;
    };

    ModalitySchema schema_;
    int content_dim_;
    std::unique_ptr<HnswIndex> index_;
    std::unordered_map<RecordId, Payload> payloads_;
};

enum class MergeRule {
    kWeightedSum,      // sum of w_i * s_i over lists containing the candidate
    kReciprocalRank,   // sum of w_i / (c + rank_i), ranks 1-based
};

struct HybridConfig {
    // Depth of each per-modality candidate list; 0 means use the final k.
    int per_modality_k = 0;
    MergeRule merge_rule = MergeRule::kWeightedSum;
    double rrf_constant = 60.0;
};

// Multi-field baseline: one vector index per modality, results merged by
// rank or score.  A candidate missing from a modality's list contributes
// zero for that modality, which is the usual union-merge convention and the
// reason this scheme degrades against a fused index.
class HybridMultiIndexBaseline {
public:
    struct Result {
        std::vector<ScoredEntry> entries;  // score = merged score
        SearchStats stats;                 // summed over the per-modality searches
    };

    HybridMultiIndexBaseline(const ModalitySchema& schema, TemporalScale scale,
                             const AnnConfig& ann_template);

    void insert(const StreamRecord& record);
    std::size_t deactivate(std::span<const RecordId> ids);

    // Searches every modality with a positive weight.  Cue requirements
    // mirror the fused path: a zero-weight slot may omit its cue.
    Result search(const QueryProfile& profile, const HybridConfig& hybrid) const;

    std::size_t size() const;
    const HnswIndex& modality_index(int slot) const { return *indexes_.at(slot); }

private:
    ModalitySchema schema_;
    TemporalScale scale_;
    std::vector<std::unique_ptr<HnswIndex>> indexes_;  // one per slot
};

}  // namespace spatcode
