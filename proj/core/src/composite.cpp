#include "spatcode/composite.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "spatcode/vecmath.hpp"

namespace spatcode {

namespace {

// Unit-norm slack for incoming sub-embeddings.  Callers normalize with the
// same double arithmetic we check with, so anything past round-off is a bug
// on their side.
constexpr double kUnitNormTolerance = 1e-9;

void check_unit(std::span<const double> values, int slot) {
    const double norm = l2_norm(values);
    if (std::abs(norm - 1.0) > kUnitNormTolerance) {
        throw std::invalid_argument("sub-embedding for slot " + std::to_string(slot) +
                                    " must be unit norm, got |v| = " + std::to_string(norm));
    }
}

// Orders cues by slot, checking that each slot appears exactly once.
std::vector<const ModalityEmbedding*> by_slot(std::span<const ModalityEmbedding> cues,
                                              int expected_count) {
    if (static_cast<int>(cues.size()) != expected_count) {
        throw SchemaError("expected " + std::to_string(expected_count) + " cues, got " +
                          std::to_string(cues.size()));
    }
    std::vector<const ModalityEmbedding*> ordered(static_cast<std::size_t>(expected_count),
                                                  nullptr);
    for (const ModalityEmbedding& cue : cues) {
        if (cue.slot < 0 || cue.slot >= expected_count) {
            throw SchemaError("cue slot " + std::to_string(cue.slot) + " out of range [0, " +
                              std::to_string(expected_count) + ")");
        }
        auto& entry = ordered[static_cast<std::size_t>(cue.slot)];
        if (entry != nullptr) {
            throw SchemaError("duplicate cue for slot " + std::to_string(cue.slot));
        }
        entry = &cue;
    }
    return ordered;
}

}  // namespace

double WeightVector::l2_norm() const {
    return spatcode::l2_norm(weights);
}

CompositeVector compose_record(const ModalitySchema& schema,
                               std::span<const ModalityEmbedding> content,
                               const TimeEncoding& time_enc,
                               const GeoEncoding& geo_enc) {
    const auto ordered = by_slot(content, schema.content_count());
    const double scale = 1.0 / std::sqrt(static_cast<double>(schema.modality_count()));

    CompositeVector out;
    out.values.resize(static_cast<std::size_t>(schema.total_dim()));
    for (int slot = 0; slot < schema.content_count(); ++slot) {
        const ModalityEmbedding& cue = *ordered[static_cast<std::size_t>(slot)];
        const int dim = schema.block_dim(slot);
        if (static_cast<int>(cue.values.size()) != dim) {
            throw SchemaError("content slot " + std::to_string(slot) + " expects dimension " +
                              std::to_string(dim) + ", got " + std::to_string(cue.values.size()));
        }
        check_unit(cue.values, slot);
        double* block = out.values.data() + schema.block_offset(slot);
        for (int i = 0; i < dim; ++i) {
            block[i] = scale * cue.values[static_cast<std::size_t>(i)];
        }
    }

    double* time_block = out.values.data() + schema.block_offset(schema.time_slot());
    time_block[0] = scale * time_enc.x;
    time_block[1] = scale * time_enc.y;

    double* geo_block = out.values.data() + schema.block_offset(schema.geo_slot());
    geo_block[0] = scale * geo_enc.x;
    geo_block[1] = scale * geo_enc.y;
    geo_block[2] = scale * geo_enc.z;
    return out;
}

std::vector<double> compose_query(const ModalitySchema& schema,
                                  std::span<const ModalityEmbedding> cues,
                                  const WeightVector& weights,
                                  bool normalize) {
    const int m = schema.modality_count();
    if (static_cast<int>(weights.weights.size()) != m) {
        throw SchemaError("expected " + std::to_string(m) + " weights, got " +
                          std::to_string(weights.weights.size()));
    }
    double weight_norm_sq = 0.0;
    for (double w : weights.weights) {
        if (!(w >= 0.0)) {
            throw std::invalid_argument("modality weights must be non-negative");
        }
        weight_norm_sq += w * w;
    }
    if (weight_norm_sq == 0.0) {
        throw std::invalid_argument("at least one modality weight must be positive");
    }

    const auto ordered = by_slot(cues, m);
    std::vector<double> out(static_cast<std::size_t>(schema.total_dim()), 0.0);
    for (int slot = 0; slot < m; ++slot) {
        const ModalityEmbedding& cue = *ordered[static_cast<std::size_t>(slot)];
        const double w = weights.weights[static_cast<std::size_t>(slot)];
        if (cue.values.empty()) {
            if (w != 0.0) {
                throw std::invalid_argument("slot " + std::to_string(slot) +
                                            " has positive weight but no cue");
            }
            continue;
        }
        const int dim = schema.block_dim(slot);
        if (static_cast<int>(cue.values.size()) != dim) {
            throw SchemaError("cue slot " + std::to_string(slot) + " expects dimension " +
                              std::to_string(dim) + ", got " + std::to_string(cue.values.size()));
        }
        check_unit(cue.values, slot);
        double* block = out.data() + schema.block_offset(slot);
        for (int i = 0; i < dim; ++i) {
            block[i] = w * cue.values[static_cast<std::size_t>(i)];
        }
    }
    if (normalize) {
        const double inv = 1.0 / std::sqrt(weight_norm_sq);
        for (double& x : out) {
            x *= inv;
        }
    }
    return out;
}

double block_score(const ModalitySchema& schema,
                   std::span<const double> composite,
                   int slot,
                   std::span<const double> cue) {
    if (static_cast<int>(composite.size()) != schema.total_dim()) {
        throw SchemaError("composite dimension " + std::to_string(composite.size()) +
                          " does not match schema dimension " +
                          std::to_string(schema.total_dim()));
    }
    const int dim = schema.block_dim(slot);
    if (static_cast<int>(cue.size()) != dim) {
        throw SchemaError("cue for slot " + std::to_string(slot) + " expects dimension " +
                          std::to_string(dim) + ", got " + std::to_string(cue.size()));
    }
    const auto block = composite.subspan(static_cast<std::size_t>(schema.block_offset(slot)),
                                         static_cast<std::size_t>(dim));
    return std::sqrt(static_cast<double>(schema.modality_count())) * dot(block, cue);
}

}  // namespace spatcode
