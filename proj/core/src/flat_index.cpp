#include "spatcode/ann.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "spatcode/vecmath.hpp"

namespace spatcode {

FlatIndex::FlatIndex(int dim) : dim_(dim) {
    if (dim < 1) {
        throw std::invalid_argument("flat index dimension must be positive");
    }
}

NodeId FlatIndex::insert(std::span<const double> vector, RecordId id) {
    if (static_cast<int>(vector.size()) != dim_) {
        throw std::invalid_argument("vector dimension " + std::to_string(vector.size()) +
                                    " does not match index dimension " + std::to_string(dim_));
    }
    if (position_.count(id) > 0) {
        throw std::invalid_argument("record " + std::to_string(id) + " already stored");
    }
    position_.emplace(id, records_.size());
    vectors_.insert(vectors_.end(), vector.begin(), vector.end());
    records_.push_back({id, true});
    ++active_count_;
    return next_node_id_++;
}

std::size_t FlatIndex::deactivate(std::span<const RecordId> ids) {
    std::size_t marked = 0;
    for (RecordId id : ids) {
        auto it = position_.find(id);
        if (it == position_.end()) continue;
        Entry& entry = records_[it->second];
        if (!entry.active) continue;
        entry.active = false;
        --active_count_;
        ++marked;
    }
    return marked;
}

SearchResult FlatIndex::search(std::span<const double> query, int k) const {
    if (static_cast<int>(query.size()) != dim_) {
        throw std::invalid_argument("query dimension " + std::to_string(query.size()) +
                                    " does not match index dimension " + std::to_string(dim_));
    }
    if (k < 1) {
        throw std::invalid_argument("k must be positive");
    }
    SearchResult result;
    result.entries.reserve(active_count_);
    const std::size_t dim = static_cast<std::size_t>(dim_);
    for (std::size_t pos = 0; pos < records_.size(); ++pos) {
        const Entry& entry = records_[pos];
        if (!entry.active) continue;
        const double score =
            dot(query, std::span<const double>(vectors_.data() + pos * dim, dim));
        ++result.stats.distance_computations;
        ++result.stats.nodes_visited;
        result.entries.push_back({entry.id, score});
    }
    const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(k),
                                                   result.entries.size());
    std::partial_sort(result.entries.begin(), result.entries.begin() + keep,
                      result.entries.end(), [](const ScoredEntry& a, const ScoredEntry& b) {
                          if (a.score != b.score) return a.score > b.score;
                          return a.id < b.id;
                      });
    result.entries.resize(keep);
    return result;
}

bool FlatIndex::is_active(RecordId id) const {
    auto it = position_.find(id);
    return it != position_.end() && records_[it->second].active;
}

std::span<const double> FlatIndex::vector_of(RecordId id) const {
    auto it = position_.find(id);
    if (it == position_.end()) {
        throw std::invalid_argument("record " + std::to_string(id) + " not stored");
    }
    return {vectors_.data() + it->second * static_cast<std::size_t>(dim_),
            static_cast<std::size_t>(dim_)};
}

std::vector<RecordId> FlatIndex::active_ids() const {
    std::vector<RecordId> ids;
    ids.reserve(active_count_);
    for (const Entry& entry : records_) {
        if (entry.active) ids.push_back(entry.id);
    }
    return ids;
}

}  // namespace spatcode
