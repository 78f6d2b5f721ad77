#pragma once

#include <numeric>
#include <string>
#include <vector>

#include "spatcode/errors.hpp"

namespace spatcode {

inline constexpr int kTimeEncodingDim = 2;
inline constexpr int kGeoEncodingDim = 3;

// Fixed block layout of the fused vector space.
//
// Content modalities come first, in ascending slot order, followed by the
// temporal block (2 dims) and the geographic block (3 dims).  Every record
// and every query vector produced against a schema shares this layout, so a
// slot index addresses the same coordinate range in both.
class ModalitySchema {
public:
    explicit ModalitySchema(std::vector<int> content_dims)
        : content_dims_(std::move(content_dims)) {
        if (content_dims_.empty()) {
            throw SchemaError("schema requires at least one content modality");
        }
        for (int d : content_dims_) {
            if (d < 1) {
                throw SchemaError("content modality dimension must be positive, got " +
                                  std::to_string(d));
            }
        }
        offsets_.reserve(content_dims_.size() + 2);
        int offset = 0;
        for (int d : content_dims_) {
            offsets_.push_back(offset);
            offset += d;
        }
        offsets_.push_back(offset);  // temporal block
        offset += kTimeEncodingDim;
        offsets_.push_back(offset);  // geographic block
        offset += kGeoEncodingDim;
        total_dim_ = offset;
    }

    // Number of content modalities (excludes time and geo).
    int content_count() const { return static_cast<int>(content_dims_.size()); }

    // Total modality count m, including the temporal and geographic slots.
    int modality_count() const { return content_count() + 2; }

    int time_slot() const { return content_count(); }
    int geo_slot() const { return content_count() + 1; }

    int block_dim(int slot) const {
        check_slot(slot);
        if (slot < content_count()) return content_dims_[static_cast<std::size_t>(slot)];
        return slot == time_slot() ? kTimeEncodingDim : kGeoEncodingDim;
    }

    int block_offset(int slot) const {
        check_slot(slot);
        return offsets_[static_cast<std::size_t>(slot)];
    }

    // Dimension of the fused vector: sum of content dims + 2 + 3.
    int total_dim() const { return total_dim_; }

    const std::vector<int>& content_dims() const { return content_dims_; }

    bool operator==(const ModalitySchema& other) const {
        return content_dims_ == other.content_dims_;
    }

private:
    void check_slot(int slot) const {
        if (slot < 0 || slot >= modality_count()) {
            throw SchemaError("modality slot " + std::to_string(slot) + " out of range [0, " +
                              std::to_string(modality_count()) + ")");
        }
    }

    std::vector<int> content_dims_;
    std::vector<int> offsets_;
    int total_dim_ = 0;
};

}  // namespace spatcode
