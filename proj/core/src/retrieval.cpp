#include "spatcode/retrieval.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "spatcode/vecmath.hpp"

namespace spatcode {

namespace {

std::vector<double> per_field_of(const ModalitySchema& schema,
                                 std::span<const double> composite,
                                 const std::vector<ModalityEmbedding>& cues) {
    std::vector<double> scores(static_cast<std::size_t>(schema.modality_count()), 0.0);
    for (const ModalityEmbedding& cue : cues) {
        if (cue.values.empty()) continue;
        scores[static_cast<std::size_t>(cue.slot)] =
            block_score(schema, composite, cue.slot, cue.values);
    }
    return scores;
}

}  // namespace

std::vector<ModalityEmbedding> assemble_cues(const ModalitySchema& schema,
                                             const QueryProfile& profile, TemporalScale scale,
                                             Timestamp time_origin) {
    if (static_cast<int>(profile.content_cues.size()) != schema.content_count()) {
        throw SchemaError("profile carries " + std::to_string(profile.content_cues.size()) +
                          " content cues, schema expects " +
                          std::to_string(schema.content_count()));
    }
    std::vector<ModalityEmbedding> cues = profile.content_cues;
    const TimeEncoding te = encode_time(profile.time_cue - time_origin, scale);
    const GeoEncoding ge = encode_geo(profile.location_cue);
    cues.push_back({schema.time_slot(), {te.x, te.y}});
    cues.push_back({schema.geo_slot(), {ge.x, ge.y, ge.z}});
    return cues;
}

std::vector<double> build_query_vector(const ModalitySchema& schema, const QueryProfile& profile,
                                       TemporalScale scale, Timestamp time_origin) {
    const auto cues = assemble_cues(schema, profile, scale, time_origin);
    return compose_query(schema, cues, profile.weights, profile.normalize_query);
}

QueryResponse query(const QueryProfile& profile, const SlidingWindow& window,
                    const HnswIndex& index, const ModalitySchema& schema) {
    if (!(schema == window.schema())) {
        throw SchemaError("window was built over a different schema");
    }
    if (index.config().dim != schema.total_dim()) {
        throw SchemaError("index dimension " + std::to_string(index.config().dim) +
                          " does not match schema dimension " +
                          std::to_string(schema.total_dim()));
    }
    const auto cues = assemble_cues(schema, profile, window.scale(), 0.0);
    const std::vector<double> query_vector =
        compose_query(schema, cues, profile.weights, profile.normalize_query);

    const SearchResult raw = index.search(query_vector, profile.k, profile.ef_search);

    QueryResponse response;
    response.stats = raw.stats;
    response.time_cue_live = window.bucket_of(profile.time_cue).has_value();
    response.results.reserve(raw.entries.size());
    for (const ScoredEntry& entry : raw.entries) {
        ScoredResult result;
        result.id = entry.id;
        result.score = entry.score;
        if (profile.with_per_field_scores) {
            result.per_field_scores = per_field_of(schema, index.vector_of(entry.id), cues);
        }
        response.results.push_back(std::move(result));
    }
    return response;
}

std::vector<ScoredResult> exact_topk(const QueryProfile& profile,
                                     std::span<const StreamRecord> records,
                                     const ModalitySchema& schema, TemporalScale scale) {
    const auto cues = assemble_cues(schema, profile, scale, 0.0);
    const std::vector<double> query_vector =
        compose_query(schema, cues, profile.weights, profile.normalize_query);

    std::vector<ScoredResult> scored;
    scored.reserve(records.size());
    for (const StreamRecord& record : records) {
        const CompositeVector composite = encode_record(schema, record, scale);
        ScoredResult result;
        result.id = record.id;
        result.score = dot(query_vector, composite.values);
        if (profile.with_per_field_scores) {
            result.per_field_scores = per_field_of(schema, composite.values, cues);
        }
        scored.push_back(std::move(result));
    }
    const std::size_t keep =
        std::min<std::size_t>(static_cast<std::size_t>(profile.k), scored.size());
    std::partial_sort(scored.begin(), scored.begin() + keep, scored.end(),
                      [](const ScoredResult& a, const ScoredResult& b) {
                          if (a.score != b.score) return a.score > b.score;
                          return a.id < b.id;
                      });
    scored.resize(keep);
    return scored;
}

double recall_at_k(std::span<const RecordId> retrieved, std::span<const RecordId> truth, int k) {
    if (k < 1) {
        throw std::invalid_argument("k must be positive");
    }
    if (static_cast<int>(truth.size()) != k) {
        throw std::invalid_argument("truth set must contain exactly k = " + std::to_string(k) +
                                    " ids, got " + std::to_string(truth.size()));
    }
    std::unordered_set<RecordId> truth_set(truth.begin(), truth.end());
    if (static_cast<int>(truth_set.size()) != k) {
        throw std::invalid_argument("truth set contains duplicate ids");
    }
    std::size_t hits = 0;
    std::size_t seen = 0;
    for (RecordId id : retrieved) {
        if (seen++ == static_cast<std::size_t>(k)) break;
        if (truth_set.count(id) > 0) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(k);
}

}  // namespace spatcode
