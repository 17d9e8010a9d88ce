#pragma once

#include "dyta/dataset/types.hpp"
#include "dyta/error.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace dyta::fusion {

using data::ItemId;

enum class Source { profile, sequential, clustering };

inline const char* to_string(Source s)
{
    switch (s) {
    case Source::profile: return "profile";
    case Source::sequential: return "sequential";
    case Source::clustering: return "clustering";
    }
    return "?";
}

struct RankList {
    std::vector<ItemId> order; // rank 1 first
    Source source = Source::profile;
    double weight = 1.0;
    bool repaired = false;
};

enum class Method { borda, rrf };

struct Weights {
    double profile = 1.0;
    double sequential = 1.0;
    double clustering = 1.0;

    friend bool operator==(const Weights&, const Weights&) = default;
};

struct FusionConfig {
    Method method = Method::rrf;
    double rrf_k = 60.0;
    bool adaptive = true;
    Weights static_weights{1.0, 1.0, 1.0};
    double sequential_on = 1.0; // W_s when a sequential pattern is detected
    double clustering_on = 1.0; // W_c when a clustering pattern is detected
};

struct PatternFlags {
    bool has_sequential = false;
    bool has_clustering = false;
    std::string cluster_note;
};

/// W_l stays 1; the temporal weights are gated on detected patterns.
inline Weights adaptive_weights(const PatternFlags& flags, const FusionConfig& config)
{
    return {1.0, flags.has_sequential ? config.sequential_on : 0.0,
            flags.has_clustering ? config.clustering_on : 0.0};
}

namespace detail {

/// Rank positions (1-based) per item for each list, validating a shared item set.
inline std::vector<std::unordered_map<ItemId, int>> rank_tables(std::span<const std::vector<ItemId>> lists)
{
    if (lists.empty()) {
        throw Error("fusion needs at least one rank list");
    }
    std::vector<std::unordered_map<ItemId, int>> tables(lists.size());
    for (std::size_t j = 0; j < lists.size(); ++j) {
        if (lists[j].size() != lists[0].size()) {
            throw Error("rank lists cover different item sets");
        }
        for (std::size_t r = 0; r < lists[j].size(); ++r) {
            if (!tables[j].emplace(lists[j][r], static_cast<int>(r) + 1).second) {
                throw Error("rank list contains a duplicate item");
            }
        }
    }
    for (std::size_t j = 1; j < lists.size(); ++j) {
        for (const auto& [id, rank] : tables[0]) {
            if (!tables[j].contains(id)) {
                throw Error("rank lists cover different item sets");
            }
        }
    }
    return tables;
}

/// Sort by descending score, then by position in `tie_order`, then item id.
/// Per-item contributions are summed in a canonical (sorted) order so items
/// with the same multiset of contributions always score bit-identically.
template <typename Points>
std::vector<ItemId> score_and_sort(std::span<const std::vector<ItemId>> lists, std::span<const double> weights,
                                   std::span<const ItemId> tie_order, Points&& points)
{
    if (weights.size() != lists.size()) {
        throw Error("one weight per rank list is required");
    }
    for (double w : weights) {
        if (!(w >= 0.0)) {
            throw Error("fusion weights must be non-negative");
        }
    }
    const auto tables = rank_tables(lists);
    const auto m = static_cast<int>(lists[0].size());

    std::unordered_map<ItemId, std::size_t> tie_index;
    for (std::size_t i = 0; i < tie_order.size(); ++i) {
        tie_index.emplace(tie_order[i], i);
    }

    struct Scored {
        ItemId id;
        double score;
        std::size_t tie;
    };
    std::vector<Scored> scored;
    scored.reserve(lists[0].size());
    std::vector<double> terms(lists.size());
    for (ItemId id : lists[0]) {
        for (std::size_t j = 0; j < lists.size(); ++j) {
            terms[j] = weights[j] == 0.0 ? 0.0 : points(weights[j], tables[j].at(id), m);
        }
        std::sort(terms.begin(), terms.end());
        double score = 0.0;
        for (double t : terms) {
            score += t;
        }
        const auto it = tie_index.find(id);
        scored.push_back({id, score, it == tie_index.end() ? tie_order.size() : it->second});
    }
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        if (a.tie != b.tie) {
            return a.tie < b.tie;
        }
        return a.id < b.id;
    });
    std::vector<ItemId> out;
    out.reserve(scored.size());
    for (const auto& s : scored) {
        out.push_back(s.id);
    }
    return out;
}

} // namespace detail

/// Weighted Borda count: an item at rank r earns weight * (m - r) points.
/// Ties follow `tie_order` (the profile ranking), then ascending id.
inline std::vector<ItemId> borda_fuse(std::span<const std::vector<ItemId>> lists, std::span<const double> weights,
                                      std::span<const ItemId> tie_order)
{
    return detail::score_and_sort(lists, weights, tie_order,
                                  [](double w, int rank, int m) { return w * static_cast<double>(m - rank); });
}

inline std::vector<ItemId> borda_fuse(std::span<const std::vector<ItemId>> lists, std::span<const double> weights)
{
    if (lists.empty()) {
        throw Error("fusion needs at least one rank list");
    }
    return borda_fuse(lists, weights, lists[0]);
}

/// Weighted reciprocal rank fusion: weight / (rrf_k + r).
inline std::vector<ItemId> rrf_fuse(std::span<const std::vector<ItemId>> lists, std::span<const double> weights,
                                    double rrf_k, std::span<const ItemId> tie_order)
{
    if (!(rrf_k > 0.0)) {
        throw Error("rrf_k must be positive");
    }
    return detail::score_and_sort(lists, weights, tie_order,
                                  [rrf_k](double w, int rank, int) { return w / (rrf_k + rank); });
}

inline std::vector<ItemId> rrf_fuse(std::span<const std::vector<ItemId>> lists, std::span<const double> weights,
                                    double rrf_k = 60.0)
{
    if (lists.empty()) {
        throw Error("fusion needs at least one rank list");
    }
    return rrf_fuse(lists, weights, rrf_k, lists[0]);
}

struct AggregateResult {
    std::vector<ItemId> order;
    Weights weights;
    std::vector<Source> fused_sources;
};

/// Self-adaptive aggregation over whichever signals ran. Lists that are absent
/// or carry zero weight are dropped; a single survivor is returned verbatim.
inline AggregateResult aggregate(const std::optional<RankList>& profile, const std::optional<RankList>& sequential,
                                 const std::optional<RankList>& clustering, const PatternFlags& flags,
                                 const FusionConfig& config)
{
    AggregateResult result;
    result.weights = config.adaptive ? adaptive_weights(flags, config) : config.static_weights;

    std::vector<std::vector<ItemId>> lists;
    std::vector<double> weights;
    auto take = [&](const std::optional<RankList>& list, double w) {
        if (list && w > 0.0) {
            lists.push_back(list->order);
            weights.push_back(w * list->weight);
            result.fused_sources.push_back(list->source);
        }
    };
    take(profile, result.weights.profile);
    take(sequential, result.weights.sequential);
    take(clustering, result.weights.clustering);
    if (lists.empty()) {
        throw Error("no rank list carries a positive weight");
    }
    if (lists.size() == 1) {
        result.order = lists.front();
        return result;
    }
    const std::vector<ItemId>& tie = profile ? profile->order : lists.front();
    result.order = config.method == Method::borda ? borda_fuse(lists, weights, tie)
                                                  : rrf_fuse(lists, weights, config.rrf_k, tie);
    return result;
}

} // namespace dyta::fusion
