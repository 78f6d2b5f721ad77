#include "spatcode/ann.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <queue>
#include <stdexcept>
#include <string>

#include "spatcode/vecmath.hpp"

namespace spatcode {

namespace {

using Candidate = detail::BeamEntry;

// Max-heap: top() is the best candidate (highest score, then lowest node).
struct BestFirst {
    bool operator()(const Candidate& a, const Candidate& b) const {
        if (a.score != b.score) return a.score < b.score;
        return a.node > b.node;
    }
};

// Max-heap on "badness": top() is the worst kept result (lowest score, then
// highest node), so bounding to ef is a single pop.
struct WorstFirst {
    bool operator()(const Candidate& a, const Candidate& b) const {
        if (a.score != b.score) return a.score > b.score;
        return a.node < b.node;
    }
};

}  // namespace

HnswIndex::HnswIndex(const AnnConfig& config)
    : config_(config),
      level_multiplier_(1.0 / std::log(static_cast<double>(config.max_neighbors))),
      level_rng_(config.seed) {
    if (config.dim < 1) {
        throw std::invalid_argument("index dimension must be positive");
    }
    if (config.max_neighbors < 2) {
        throw std::invalid_argument("max_neighbors must be at least 2");
    }
    if (config.ef_construction < 1 || config.default_ef_search < 1) {
        throw std::invalid_argument("beam widths must be positive");
    }
}

std::span<const double> HnswIndex::vec(std::uint32_t node) const {
    const std::size_t dim = static_cast<std::size_t>(config_.dim);
    return {vectors_.data() + static_cast<std::size_t>(node) * dim, dim};
}

double HnswIndex::score_against(std::span<const double> query, std::uint32_t node,
                                SearchStats& stats) const {
    ++stats.distance_computations;
    return dot(query, vec(node));
}

int HnswIndex::draw_level() {
    double u = level_rng_.uniform01();
    if (u <= 0.0) u = 0x1.0p-53;
    return static_cast<int>(-std::log(u) * level_multiplier_);
}

std::uint32_t HnswIndex::greedy_descend(std::span<const double> query, std::uint32_t entry,
                                        int from_level, int to_level,
                                        SearchStats& stats) const {
    std::uint32_t current = entry;
    double best = score_against(query, current, stats);
    for (int level = from_level; level > to_level; --level) {
        bool improved = true;
        while (improved) {
            improved = false;
            ++stats.nodes_visited;
            for (std::uint32_t nb : links_[current][static_cast<std::size_t>(level)]) {
                const double s = score_against(query, nb, stats);
                if (s > best) {  // strict: ties keep the incumbent
                    best = s;
                    current = nb;
                    improved = true;
                }
            }
        }
    }
    return current;
}

std::vector<HnswIndex::Candidate> HnswIndex::search_layer(std::span<const double> query,
                                                          std::uint32_t entry, int level,
                                                          std::size_t ef, bool skip_inactive,
                                                          SearchStats& stats) const {
    std::priority_queue<Candidate, std::vector<Candidate>, BestFirst> frontier;
    std::priority_queue<Candidate, std::vector<Candidate>, WorstFirst> kept;
    std::vector<char> visited(nodes_.size(), 0);

    const double entry_score = score_against(query, entry, stats);
    visited[entry] = 1;
    frontier.push({entry_score, entry});
    if (!skip_inactive || nodes_[entry].active) {
        kept.push({entry_score, entry});
    }

    while (!frontier.empty()) {
        const Candidate current = frontier.top();
        frontier.pop();
        if (kept.size() >= ef && current.score < kept.top().score) {
            break;
        }
        ++stats.nodes_visited;
        for (std::uint32_t nb : links_[current.node][static_cast<std::size_t>(level)]) {
            if (visited[nb]) continue;
            visited[nb] = 1;
            const double s = score_against(query, nb, stats);
            if (kept.size() < ef || s > kept.top().score) {
                frontier.push({s, nb});
                if (!skip_inactive || nodes_[nb].active) {
                    kept.push({s, nb});
                    if (kept.size() > ef) kept.pop();
                }
            }
        }
    }

    std::vector<Candidate> out;
    out.reserve(kept.size());
    while (!kept.empty()) {
        out.push_back(kept.top());
        kept.pop();
    }
    return out;
}

std::vector<std::uint32_t> HnswIndex::select_neighbors(std::vector<Candidate> candidates,
                                                       std::size_t max_links,
                                                       SearchStats& stats) const {
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.node < b.node;
    });
    if (candidates.size() <= max_links) {
        std::vector<std::uint32_t> all;
        all.reserve(candidates.size());
        for (const Candidate& c : candidates) all.push_back(c.node);
        return all;
    }
    // Diversity pruning: keep a candidate only if it is closer to the anchor
    // than to every neighbor already kept.  This spreads links across
    // directions instead of clustering them, which is what keeps long-range
    // routes alive in the graph.
    std::vector<std::uint32_t> selected;
    selected.reserve(max_links);
    for (const Candidate& c : candidates) {
        if (selected.size() >= max_links) break;
        bool diverse = true;
        for (std::uint32_t s : selected) {
            const double between = score_against(vec(c.node), s, stats);
            if (between > c.score) {
                diverse = false;
                break;
            }
        }
        if (diverse) selected.push_back(c.node);
    }
    return selected;
}

void HnswIndex::shrink_links(std::uint32_t node, int level, SearchStats& stats) {
    const std::size_t max_links = level == 0 ? 2 * static_cast<std::size_t>(config_.max_neighbors)
                                             : static_cast<std::size_t>(config_.max_neighbors);
    auto& links = links_[node][static_cast<std::size_t>(level)];
    if (links.size() <= max_links) return;
    std::vector<Candidate> candidates;
    candidates.reserve(links.size());
    for (std::uint32_t nb : links) {
        candidates.push_back({score_against(vec(node), nb, stats), nb});
    }
    links = select_neighbors(std::move(candidates), max_links, stats);
}

NodeId HnswIndex::insert(std::span<const double> vector, RecordId id) {
    std::unique_lock lock(mutex_);
    return insert_unlocked(vector, id);
}

NodeId HnswIndex::insert_unlocked(std::span<const double> vector, RecordId id) {
    if (static_cast<int>(vector.size()) != config_.dim) {
        throw std::invalid_argument("vector dimension " + std::to_string(vector.size()) +
                                    " does not match index dimension " +
                                    std::to_string(config_.dim));
    }
    if (position_.count(id) > 0) {
        throw std::invalid_argument("record " + std::to_string(id) + " already stored");
    }
    if (nodes_.size() >= static_cast<std::size_t>(UINT32_MAX)) {
        throw std::length_error("index is full");
    }

    const std::uint32_t node = static_cast<std::uint32_t>(nodes_.size());
    const int level = draw_level();
    const NodeId node_id = next_node_id_++;

    vectors_.insert(vectors_.end(), vector.begin(), vector.end());
    nodes_.push_back({node_id, id, level, true});
    links_.emplace_back(static_cast<std::size_t>(level) + 1);
    position_.emplace(id, node);
    ++active_count_;

    SearchStats stats;
    if (entry_point_ < 0) {
        entry_point_ = node;
        top_level_ = level;
        return node_id;
    }

    std::uint32_t ep = static_cast<std::uint32_t>(entry_point_);
    if (top_level_ > level) {
        ep = greedy_descend(vector, ep, top_level_, level, stats);
    }
    const std::size_t m = static_cast<std::size_t>(config_.max_neighbors);
    for (int lc = std::min(level, top_level_); lc >= 0; --lc) {
        auto found = search_layer(vector, ep, lc, static_cast<std::size_t>(config_.ef_construction),
                                  /*skip_inactive=*/false, stats);
        const std::size_t max_links = lc == 0 ? 2 * m : m;
        auto selected = select_neighbors(found, m, stats);
        links_[node][static_cast<std::size_t>(lc)] = selected;
        for (std::uint32_t nb : selected) {
            links_[nb][static_cast<std::size_t>(lc)].push_back(node);
            if (links_[nb][static_cast<std::size_t>(lc)].size() > max_links) {
                shrink_links(nb, lc, stats);
            }
        }
        // Continue the descent from the best candidate of this layer.
        std::uint32_t best_node = ep;
        double best_score = -std::numeric_limits<double>::infinity();
        for (const Candidate& c : found) {
            if (c.score > best_score || (c.score == best_score && c.node < best_node)) {
                best_score = c.score;
                best_node = c.node;
            }
        }
        ep = best_node;
    }

    if (level > top_level_) {
        entry_point_ = node;
        top_level_ = level;
    }
    counters_.construction_distance_computations += stats.distance_computations;
    return node_id;
}

SearchResult HnswIndex::search(std::span<const double> query, int k, int ef) const {
    if (static_cast<int>(query.size()) != config_.dim) {
        throw std::invalid_argument("query dimension " + std::to_string(query.size()) +
                                    " does not match index dimension " +
                                    std::to_string(config_.dim));
    }
    if (k < 1) {
        throw std::invalid_argument("k must be positive");
    }
    if (ef < 0) {
        throw std::invalid_argument("ef must be non-negative");
    }
    std::shared_lock lock(mutex_);

    SearchResult result;
    if (entry_point_ < 0) {
        return result;
    }
    const std::size_t beam =
        std::max<std::size_t>(static_cast<std::size_t>(ef == 0 ? config_.default_ef_search : ef),
                              static_cast<std::size_t>(k));

    std::uint32_t ep = static_cast<std::uint32_t>(entry_point_);
    if (top_level_ > 0) {
        ep = greedy_descend(query, ep, top_level_, 0, result.stats);
    }
    auto found = search_layer(query, ep, 0, beam, /*skip_inactive=*/true, result.stats);

    result.entries.reserve(found.size());
    for (const Candidate& c : found) {
        result.entries.push_back({nodes_[c.node].record_id, c.score});
    }
    std::sort(result.entries.begin(), result.entries.end(),
              [](const ScoredEntry& a, const ScoredEntry& b) {
                  if (a.score != b.score) return a.score > b.score;
                  return a.id < b.id;
              });
    if (result.entries.size() > static_cast<std::size_t>(k)) {
        result.entries.resize(static_cast<std::size_t>(k));
    }
    return result;
}

std::size_t HnswIndex::deactivate(std::span<const RecordId> ids) {
    std::unique_lock lock(mutex_);
    std::size_t marked = 0;
    for (RecordId id : ids) {
        auto it = position_.find(id);
        if (it == position_.end()) continue;
        Node& node = nodes_[it->second];
        if (!node.active) continue;
        node.active = false;
        --active_count_;
        ++marked;
    }
    counters_.tombstones_marked += marked;
    if (config_.fragmentation_threshold > 0.0 && !nodes_.empty()) {
        const double fraction =
            static_cast<double>(nodes_.size() - active_count_) / static_cast<double>(nodes_.size());
        if (fraction > config_.fragmentation_threshold) {
            compact_unlocked();
        }
    }
    return marked;
}

CompactionSummary HnswIndex::compact() {
    std::unique_lock lock(mutex_);
    return compact_unlocked();
}

CompactionSummary HnswIndex::compact_unlocked() {
    struct Survivor {
        RecordId id;
        std::vector<double> vector;
    };
    std::vector<Survivor> survivors;
    survivors.reserve(active_count_);
    for (std::uint32_t node = 0; node < nodes_.size(); ++node) {
        if (!nodes_[node].active) continue;
        const auto v = vec(node);
        survivors.push_back({nodes_[node].record_id, {v.begin(), v.end()}});
    }
    CompactionSummary summary;
    summary.dropped = nodes_.size() - survivors.size();
    summary.remaining = survivors.size();

    vectors_.clear();
    nodes_.clear();
    links_.clear();
    position_.clear();
    entry_point_ = -1;
    top_level_ = -1;
    active_count_ = 0;

    // Reinsert in original insertion order; node ids keep counting upward so
    // retired ids are never seen again.
    for (const Survivor& s : survivors) {
        insert_unlocked(s.vector, s.id);
    }
    ++counters_.compactions;
    counters_.compaction_reinserts += survivors.size();
    return summary;
}

std::size_t HnswIndex::size() const {
    std::shared_lock lock(mutex_);
    return nodes_.size();
}

std::size_t HnswIndex::active_count() const {
    std::shared_lock lock(mutex_);
    return active_count_;
}

bool HnswIndex::contains(RecordId id) const {
    std::shared_lock lock(mutex_);
    return position_.count(id) > 0;
}

bool HnswIndex::is_active(RecordId id) const {
    std::shared_lock lock(mutex_);
    auto it = position_.find(id);
    return it != position_.end() && nodes_[it->second].active;
}

std::vector<double> HnswIndex::vector_of(RecordId id) const {
    std::shared_lock lock(mutex_);
    auto it = position_.find(id);
    if (it == position_.end()) {
        throw std::invalid_argument("record " + std::to_string(id) + " not stored");
    }
    const auto v = vec(it->second);
    return {v.begin(), v.end()};
}

std::vector<RecordId> HnswIndex::active_ids() const {
    std::shared_lock lock(mutex_);
    std::vector<RecordId> ids;
    ids.reserve(active_count_);
    for (const Node& node : nodes_) {
        if (node.active) ids.push_back(node.record_id);
    }
    return ids;
}

MaintenanceCounters HnswIndex::maintenance() const {
    std::shared_lock lock(mutex_);
    return counters_;
}

}  // namespace spatcode
