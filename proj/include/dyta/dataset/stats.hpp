#pragma once

#include "dyta/dataset/types.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace dyta::data {

struct PopularityConfig {
    double popular_fraction = 0.2;   // top share of items by interaction count
    double high_rating_mean = 4.0;
    int high_rating_min_count = 20;
};

/// Item-level popularity and rating standing, built from training interactions only.
struct PopularityIndex {
    std::unordered_set<ItemId> popular;
    std::unordered_set<ItemId> high_rated;
    std::unordered_map<ItemId, int> counts;

    [[nodiscard]] bool is_popular(ItemId id) const { return popular.contains(id); }
    [[nodiscard]] bool is_high_rated(ItemId id) const { return high_rated.contains(id); }
};

/// `training` is every user's history with the held-out targets removed.
template <typename HistoryRange>
PopularityIndex build_popularity_index(const HistoryRange& training, const PopularityConfig& config = {})
{
    struct Acc {
        int count = 0;
        long long rating_sum = 0;
    };
    std::unordered_map<ItemId, Acc> acc;
    for (const auto& history : training) {
        for (const auto& i : history.interactions) {
            auto& a = acc[i.item_id];
            ++a.count;
            a.rating_sum += i.rating;
        }
    }
    PopularityIndex index;
    std::vector<std::pair<ItemId, int>> ranked;
    ranked.reserve(acc.size());
    for (const auto& [id, a] : acc) {
        index.counts.emplace(id, a.count);
        ranked.emplace_back(id, a.count);
        if (a.count >= config.high_rating_min_count
            && static_cast<double>(a.rating_sum) / a.count >= config.high_rating_mean) {
            index.high_rated.insert(id);
        }
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    const auto top = static_cast<std::size_t>(std::ceil(config.popular_fraction * static_cast<double>(ranked.size())));
    for (std::size_t i = 0; i < std::min(top, ranked.size()); ++i) {
        index.popular.insert(ranked[i].first);
    }
    return index;
}

inline StatPatterns compute_stat_patterns(const InteractionHistory& history, const PopularityIndex& popularity)
{
    StatPatterns stats;
    if (history.interactions.empty()) {
        stats.empty = true;
        return stats;
    }
    long long sum = 0;
    int popular = 0;
    int high = 0;
    for (const auto& i : history.interactions) {
        sum += i.rating;
        ++stats.rating_histogram.at(static_cast<std::size_t>(i.rating - 1));
        popular += popularity.is_popular(i.item_id) ? 1 : 0;
        high += popularity.is_high_rated(i.item_id) ? 1 : 0;
    }
    const auto n = static_cast<double>(history.interactions.size());
    stats.mean_rating = static_cast<double>(sum) / n;
    stats.popular_item_fraction = popular / n;
    stats.high_rated_item_fraction = high / n;
    return stats;
}

} // namespace dyta::data
