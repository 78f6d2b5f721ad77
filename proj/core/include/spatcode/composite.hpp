#pragma once

#include <span>
#include <vector>

#include "spatcode/encoding.hpp"
#include "spatcode/schema.hpp"

namespace spatcode {

// A unit vector for one modality slot.  An empty `values` vector marks an
// absent cue, which is only legal on the query side with weight zero.
struct ModalityEmbedding {
    int slot = 0;
    std::vector<double> values;
};

// The fused representation of one record: each modality block holds its unit
// sub-embedding scaled by 1/sqrt(m), so the whole vector is unit norm and a
// plain inner product decomposes into per-modality cosines.
struct CompositeVector {
    std::vector<double> values;
};

// One non-negative weight per modality slot (content..., time, geo).
struct WeightVector {
    std::vector<double> weights;

    double l2_norm() const;
};

// Builds the stored vector for a record: content sub-embeddings in slot
// order, then the temporal and geographic encodings, each block scaled by
// 1/sqrt(m).  Content embeddings must be unit norm and match the schema
// dimensions; violations raise SchemaError / std::invalid_argument.
CompositeVector compose_record(const ModalitySchema& schema,
                               std::span<const ModalityEmbedding> content,
                               const TimeEncoding& time_enc,
                               const GeoEncoding& geo_enc);

// Builds the weighted query vector: block i holds w_i * q_i (unscaled by
// sqrt(m)).  With this convention
//
//     sqrt(m) * <composite, query> = sum_i w_i * <v_i, q_i>,
//
// so one fused inner product reproduces the weighted per-modality score.
// When `normalize` is set the result is divided by |w|, which rescales every
// score by the same positive factor and leaves the ranking unchanged.
//
// `cues` must cover every slot exactly once; a slot with weight zero may
// carry an empty cue.  Weights must be non-negative with at least one
// positive entry.
std::vector<double> compose_query(const ModalitySchema& schema,
                                  std::span<const ModalityEmbedding> cues,
                                  const WeightVector& weights,
                                  bool normalize);

// <block `slot` of the fused vector, cue> * sqrt(m): recovers the
// per-modality cosine stored inside a composite vector.
double block_score(const ModalitySchema& schema,
                   std::span<const double> composite,
                   int slot,
                   std::span<const double> cue);

}  // namespace spatcode
