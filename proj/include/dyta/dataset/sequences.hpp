#pragma once

#include "dyta/dataset/types.hpp"
#include "dyta/error.hpp"
#include "dyta/rng.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <map>
#include <optional>
#include <unordered_set>
#include <variant>
#include <vector>

namespace dyta::data {

/// Group ratings per user, ascending by timestamp; ties keep file order.
inline std::map<UserId, InteractionHistory> build_sequences(const Catalog& catalog)
{
    std::map<UserId, std::vector<const RatingRow*>> grouped;
    for (const auto& row : catalog.ratings) {
        grouped[row.user_id].push_back(&row);
    }
    std::map<UserId, InteractionHistory> out;
    for (auto& [user, rows] : grouped) {
        std::stable_sort(rows.begin(), rows.end(), [](const RatingRow* a, const RatingRow* b) {
            return a->interaction.timestamp < b->interaction.timestamp;
        });
        InteractionHistory history{user, {}};
        history.interactions.reserve(rows.size());
        for (const auto* r : rows) {
            history.interactions.push_back(r->interaction);
        }
        out.emplace(user, std::move(history));
    }
    return out;
}

struct LeaveOneOut {
    InteractionHistory prefix;
    Interaction target;
};

/// Holds out the chronologically last interaction; nullopt when fewer than two exist.
inline std::optional<LeaveOneOut> leave_one_out_split(const InteractionHistory& history)
{
    if (history.interactions.size() < 2) {
        spdlog::warn("user {} has {} interaction(s); skipped for leave-one-out", history.user_id,
                     history.interactions.size());
        return std::nullopt;
    }
    LeaveOneOut split;
    split.prefix.user_id = history.user_id;
    split.prefix.interactions.assign(history.interactions.begin(), history.interactions.end() - 1);
    split.target = history.interactions.back();
    return split;
}

/// Uniform sample of `count` distinct catalog items the user never interacted with.
inline std::vector<ItemId> sample_negatives(const InteractionHistory& user_history, const Catalog& catalog,
                                            std::size_t count, std::uint64_t seed)
{
    if (count == 0) {
        throw ConfigError("negative sample count must be at least 1");
    }
    std::unordered_set<ItemId> seen;
    seen.reserve(user_history.interactions.size() * 2);
    for (const auto& i : user_history.interactions) {
        seen.insert(i.item_id);
    }
    std::vector<ItemId> pool;
    pool.reserve(catalog.items.size());
    for (const auto& [id, item] : catalog.items) {
        if (!seen.contains(id)) {
            pool.push_back(id);
        }
    }
    if (pool.size() < count) {
        throw DataError("user " + std::to_string(user_history.user_id) + " has only " + std::to_string(pool.size())
                        + " unseen items; " + std::to_string(count) + " negatives required");
    }
    // Partial Fisher-Yates: the first `count` slots end up a uniform sample.
    Rng rng(seed);
    for (std::size_t i = 0; i < count; ++i) {
        const auto j = i + static_cast<std::size_t>(uniform_below(rng, pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    return pool;
}

struct RandomPlacement {};
struct FixedPlacement {
    int position = 1;
};
using Placement = std::variant<RandomPlacement, FixedPlacement>;

inline CandidatePage build_candidate_page(ItemId target, const std::vector<ItemId>& negatives, std::uint64_t seed,
                                          const Placement& placement)
{
    const auto m = static_cast<int>(negatives.size()) + 1;
    std::vector<ItemId> order;
    order.reserve(static_cast<std::size_t>(m));
    Rng rng(seed);
    if (const auto* fixed = std::get_if<FixedPlacement>(&placement)) {
        if (fixed->position < 1 || fixed->position > m) {
            throw ConfigError("fixed placement position " + std::to_string(fixed->position) + " outside 1.."
                              + std::to_string(m));
        }
        order = negatives;
        shuffle(std::span<ItemId>(order), rng);
        order.insert(order.begin() + (fixed->position - 1), target);
    } else {
        order = negatives;
        order.push_back(target);
        shuffle(std::span<ItemId>(order), rng);
    }
    CandidatePage page;
    page.ground_truth = target;
    page.seed = seed;
    page.entries.reserve(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        page.entries.push_back({static_cast<int>(i) + 1, order[i]});
    }
    return page;
}

/// Checks the page invariants; returns an empty string when valid.
inline std::string page_violation(const CandidatePage& page, std::size_t expected_size)
{
    if (page.entries.size() != expected_size) {
        return "page has " + std::to_string(page.entries.size()) + " entries";
    }
    std::unordered_set<ItemId> ids;
    int gt_count = 0;
    for (std::size_t i = 0; i < page.entries.size(); ++i) {
        if (page.entries[i].position != static_cast<int>(i) + 1) {
            return "positions are not contiguous";
        }
        if (!ids.insert(page.entries[i].item_id).second) {
            return "duplicate item on page";
        }
        gt_count += page.entries[i].item_id == page.ground_truth ? 1 : 0;
    }
    if (gt_count != 1) {
        return "ground truth appears " + std::to_string(gt_count) + " times";
    }
    return {};
}

} // namespace dyta::data
