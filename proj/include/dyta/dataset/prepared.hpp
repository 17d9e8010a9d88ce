#pragma once

#include "dyta/dataset/ml1m.hpp"
#include "dyta/dataset/sequences.hpp"
#include "dyta/dataset/stats.hpp"

#include <map>
#include <vector>

namespace dyta::data {

/// Catalog plus every index the evaluation needs; immutable once built.
struct PreparedDataset {
    Catalog catalog;
    std::map<UserId, InteractionHistory> sequences;
    std::map<UserId, LeaveOneOut> splits;
    PopularityIndex popularity;
    std::size_t skipped_users = 0;
};

inline PreparedDataset prepare_dataset(Catalog catalog, const PopularityConfig& popularity = {})
{
    PreparedDataset out;
    out.catalog = std::move(catalog);
    out.sequences = build_sequences(out.catalog);
    std::vector<InteractionHistory> training;
    training.reserve(out.sequences.size());
    for (const auto& [user, history] : out.sequences) {
        if (auto split = leave_one_out_split(history)) {
            training.push_back(split->prefix);
            out.splits.emplace(user, std::move(*split));
        } else {
            ++out.skipped_users;
        }
    }
    // Users present in users.dat with no ratings at all are also unusable.
    out.skipped_users += out.catalog.users.size() - out.sequences.size();
    out.popularity = build_popularity_index(training, popularity);
    return out;
}

/// Users whose prefix holds at least `min_prefix` interactions, optionally
/// down-sampled to `count` (0 keeps all), returned in ascending id order.
inline std::vector<UserId> select_users(const PreparedDataset& data, std::size_t min_prefix, std::size_t count,
                                        std::uint64_t seed)
{
    std::vector<UserId> eligible;
    for (const auto& [user, split] : data.splits) {
        if (split.prefix.interactions.size() >= min_prefix) {
            eligible.push_back(user);
        }
    }
    if (count == 0 || count >= eligible.size()) {
        return eligible;
    }
    Rng rng(derive_seed(seed, SeedPurpose::user_sample, 0));
    for (std::size_t i = 0; i < count; ++i) {
        const auto j = i + static_cast<std::size_t>(uniform_below(rng, eligible.size() - i));
        std::swap(eligible[i], eligible[j]);
    }
    eligible.resize(count);
    std::sort(eligible.begin(), eligible.end());
    return eligible;
}

} // namespace dyta::data
