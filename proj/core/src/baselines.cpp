#include "spatcode/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "spatcode/vecmath.hpp"

namespace spatcode {

ScalarFilterBaseline::ScalarFilterBaseline(const ModalitySchema& schema,
                                           const AnnConfig& ann_template)
    : schema_(schema) {
    int dim = 0;
    for (int slot = 0; slot < schema_.content_count(); ++slot) {
        dim += schema_.block_dim(slot);
    }
    content_dim_ = dim;
    AnnConfig config = ann_template;
    config.dim = content_dim_;
    index_ = std::make_unique<HnswIndex>(config);
}

std::vector<double> ScalarFilterBaseline::content_vector(const StreamRecord& record) const {
    if (static_cast<int>(record.content.size()) != schema_.content_count()) {
        throw SchemaError("record carries " + std::to_string(record.content.size()) +
                          " content embeddings, schema expects " +
                          std::to_string(schema_.content_count()));
    }
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(content_dim_));
    const double scale = 1.0 / std::sqrt(static_cast<double>(schema_.content_count()));
    for (int slot = 0; slot < schema_.content_count(); ++slot) {
        const auto& block = record.content[static_cast<std::size_t>(slot)];
        if (static_cast<int>(block.size()) != schema_.block_dim(slot)) {
            throw SchemaError("content slot " + std::to_string(slot) + " expects dimension " +
                              std::to_string(schema_.block_dim(slot)));
        }
        for (double x : block) {
            out.push_back(scale * x);
        }
    }
    return out;
}

std::vector<double> ScalarFilterBaseline::content_query(
    std::span<const ModalityEmbedding> cues, std::span<const double> content_weights) const {
    if (static_cast<int>(cues.size()) != schema_.content_count() ||
        static_cast<int>(content_weights.size()) != schema_.content_count()) {
        throw SchemaError("content query needs one cue and one weight per content slot");
    }
    std::vector<double> out(static_cast<std::size_t>(content_dim_), 0.0);
    int offset = 0;
    for (int slot = 0; slot < schema_.content_count(); ++slot) {
        const int dim = schema_.block_dim(slot);
        const ModalityEmbedding* cue = nullptr;
        for (const ModalityEmbedding& candidate : cues) {
            if (candidate.slot == slot) cue = &candidate;
        }
        if (cue == nullptr) {
            throw SchemaError("missing content cue for slot " + std::to_string(slot));
        }
        const double w = content_weights[static_cast<std::size_t>(slot)];
        if (!cue->values.empty()) {
            if (static_cast<int>(cue->values.size()) != dim) {
                throw SchemaError("cue slot " + std::to_string(slot) + " expects dimension " +
                                  std::to_string(dim));
            }
            for (int i = 0; i < dim; ++i) {
                out[static_cast<std::size_t>(offset + i)] =
                    w * cue->values[static_cast<std::size_t>(i)];
            }
        } else if (w != 0.0) {
            throw std::invalid_argument("slot " + std::to_string(slot) +
                                        " has positive weight but no cue");
        }
        offset += dim;
    }
    return out;
}

void ScalarFilterBaseline::insert(const StreamRecord& record) {
    index_->insert(content_vector(record), record.id);
    payloads_[record.id] = Payload{record.time, record.location};
}

std::size_t ScalarFilterBaseline::deactivate(std::span<const RecordId> ids) {
    return index_->deactivate(ids);
}

ScalarFilterBaseline::Result ScalarFilterBaseline::search(std::span<const double> content_query,
                                                          const FilterPredicate& predicate,
                                                          int k, int ef) const {
    if (k < 1) {
        throw std::invalid_argument("k must be positive");
    }
    Result result;
    const std::size_t active = index_->active_count();
    if (active == 0) {
        result.final_budget = static_cast<std::size_t>(k);
        return result;
    }

    std::size_t budget = static_cast<std::size_t>(k);
    while (true) {
        const int round_k = static_cast<int>(budget);
        const int round_ef = std::max(ef, round_k);
        const SearchResult round = index_->search(content_query, round_k, round_ef);
        result.stats.distance_computations += round.stats.distance_computations;
        result.stats.nodes_visited += round.stats.nodes_visited;
        result.final_budget = budget;

        result.entries.clear();
        for (const ScoredEntry& entry : round.entries) {
            const Payload& payload = payloads_.at(entry.id);
            if (predicate.matches(payload.time, payload.location)) {
                result.entries.push_back(entry);
                if (result.entries.size() == static_cast<std::size_t>(k)) break;
            }
        }
        // Second clause: the whole active set has been pulled (or the budget
        // overshot it), so widening further cannot surface new candidates.
        if (result.entries.size() >= static_cast<std::size_t>(k) ||
            round.entries.size() >= active || budget >= 2 * active) {
            break;
        }
        budget *= 2;
        ++result.widenings;
    }
    return result;
}

HybridMultiIndexBaseline::HybridMultiIndexBaseline(const ModalitySchema& schema,
                                                   TemporalScale scale,
                                                   const AnnConfig& ann_template)
    : schema_(schema), scale_(scale) {
    indexes_.reserve(static_cast<std::size_t>(schema_.modality_count()));
    for (int slot = 0; slot < schema_.modality_count(); ++slot) {
        AnnConfig config = ann_template;
        config.dim = schema_.block_dim(slot);
        // Decorrelate the per-modality graphs while keeping the whole
        // ensemble a function of the template seed.
        config.seed = ann_template.seed + static_cast<std::uint64_t>(slot) + 1;
        indexes_.push_back(std::make_unique<HnswIndex>(config));
    }
}

void HybridMultiIndexBaseline::insert(const StreamRecord& record) {
    if (static_cast<int>(record.content.size()) != schema_.content_count()) {
        throw SchemaError("record carries " + std::to_string(record.content.size()) +
                          " content embeddings, schema expects " +
                          std::to_string(schema_.content_count()));
    }
    for (int slot = 0; slot < schema_.content_count(); ++slot) {
        indexes_[static_cast<std::size_t>(slot)]->insert(
            record.content[static_cast<std::size_t>(slot)], record.id);
    }
    const TimeEncoding te = encode_time(record.time, scale_);
    const GeoEncoding ge = encode_geo(record.location);
    const std::vector<double> time_vec{te.x, te.y};
    const std::vector<double> geo_vec{ge.x, ge.y, ge.z};
    indexes_[static_cast<std::size_t>(schema_.time_slot())]->insert(time_vec, record.id);
    indexes_[static_cast<std::size_t>(schema_.geo_slot())]->insert(geo_vec, record.id);
}

std::size_t HybridMultiIndexBaseline::deactivate(std::span<const RecordId> ids) {
    std::size_t marked = 0;
    for (auto& index : indexes_) {
        marked = index->deactivate(ids);
    }
    return marked;
}

std::size_t HybridMultiIndexBaseline::size() const {
    return indexes_.front()->size();
}

HybridMultiIndexBaseline::Result HybridMultiIndexBaseline::search(
    const QueryProfile& profile, const HybridConfig& hybrid) const {
    if (static_cast<int>(profile.content_cues.size()) != schema_.content_count()) {
        throw SchemaError("profile carries " + std::to_string(profile.content_cues.size()) +
                          " content cues, schema expects " +
                          std::to_string(schema_.content_count()));
    }
    if (static_cast<int>(profile.weights.weights.size()) != schema_.modality_count()) {
        throw SchemaError("profile carries " + std::to_string(profile.weights.weights.size()) +
                          " weights, schema expects " +
                          std::to_string(schema_.modality_count()));
    }
    if (profile.k < 1) {
        throw std::invalid_argument("k must be positive");
    }
    const int per_k = hybrid.per_modality_k > 0 ? hybrid.per_modality_k : profile.k;

    // Cue vector per slot, in slot order; empty = slot not searched.
    std::vector<std::vector<double>> cue_vectors(
        static_cast<std::size_t>(schema_.modality_count()));
    for (const ModalityEmbedding& cue : profile.content_cues) {
        if (cue.slot < 0 || cue.slot >= schema_.content_count()) {
            throw SchemaError("cue slot " + std::to_string(cue.slot) + " out of range");
        }
        cue_vectors[static_cast<std::size_t>(cue.slot)] = cue.values;
    }
    const TimeEncoding te = encode_time(profile.time_cue, scale_);
    const GeoEncoding ge = encode_geo(profile.location_cue);
    cue_vectors[static_cast<std::size_t>(schema_.time_slot())] = {te.x, te.y};
    cue_vectors[static_cast<std::size_t>(schema_.geo_slot())] = {ge.x, ge.y, ge.z};

    Result result;
    std::unordered_map<RecordId, double> merged;
    for (int slot = 0; slot < schema_.modality_count(); ++slot) {
        const double w = profile.weights.weights[static_cast<std::size_t>(slot)];
        if (w == 0.0) continue;
        const auto& cue = cue_vectors[static_cast<std::size_t>(slot)];
        if (cue.empty()) {
            throw std::invalid_argument("slot " + std::to_string(slot) +
                                        " has positive weight but no cue");
        }
        const int round_ef = std::max(profile.ef_search, per_k);
        const SearchResult round =
            indexes_[static_cast<std::size_t>(slot)]->search(cue, per_k, round_ef);
        result.stats.distance_computations += round.stats.distance_computations;
        result.stats.nodes_visited += round.stats.nodes_visited;

        for (std::size_t rank = 0; rank < round.entries.size(); ++rank) {
            const ScoredEntry& entry = round.entries[rank];
            double contribution = 0.0;
            switch (hybrid.merge_rule) {
                case MergeRule::kWeightedSum:
                    contribution = w * entry.score;
                    break;
                case MergeRule::kReciprocalRank:
                    contribution = w / (hybrid.rrf_constant + static_cast<double>(rank + 1));
                    break;
            }
            merged[entry.id] += contribution;
        }
    }

    result.entries.reserve(merged.size());
    for (const auto& [id, score] : merged) {
        result.entries.push_back({id, score});
    }
    std::sort(result.entries.begin(), result.entries.end(),
              [](const ScoredEntry& a, const ScoredEntry& b) {
                  if (a.score != b.score) return a.score > b.score;
                  return a.id < b.id;
              });
    if (result.entries.size() > static_cast<std::size_t>(profile.k)) {
        result.entries.resize(static_cast<std::size_t>(profile.k));
    }
    return result;
}

}  // namespace spatcode
