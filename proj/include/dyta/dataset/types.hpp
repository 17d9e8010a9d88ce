#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace dyta::data {

using ItemId = std::int64_t;
using UserId = std::int64_t;

struct ItemRecord {
    ItemId item_id = 0;
    std::string title; // UTF-8, year suffix retained as in the source file
    int year = 0;
    std::vector<std::string> genres;
};

enum class Gender { male, female };

struct UserRecord {
    UserId user_id = 0;
    Gender gender = Gender::male;
    int age_bracket = 0;
    int occupation = 0;
    std::string zip;

    friend bool operator==(const UserRecord&, const UserRecord&) = default;
};

struct Interaction {
    ItemId item_id = 0;
    int rating = 0;
    std::int64_t timestamp = 0;
    std::optional<std::string> feeling;

    friend bool operator==(const Interaction&, const Interaction&) = default;
};

struct InteractionHistory {
    UserId user_id = 0;
    std::vector<Interaction> interactions;
};

/// One line of ratings.dat, with its position in the file.
struct RatingRow {
    UserId user_id = 0;
    Interaction interaction;
    std::size_t file_order = 0;
};

struct Catalog {
    std::map<UserId, UserRecord> users;
    std::map<ItemId, ItemRecord> items;
    std::vector<RatingRow> ratings; // file order
    bool empty_ratings = false;

    [[nodiscard]] const ItemRecord& item(ItemId id) const { return items.at(id); }
    [[nodiscard]] ItemId max_item_id() const { return items.empty() ? 0 : items.rbegin()->first; }
};

struct CandidateEntry {
    int position = 0; // 1-based
    ItemId item_id = 0;

    friend bool operator==(const CandidateEntry&, const CandidateEntry&) = default;
};

struct CandidatePage {
    std::vector<CandidateEntry> entries;
    ItemId ground_truth = 0;
    std::uint64_t seed = 0;

    [[nodiscard]] std::vector<ItemId> item_order() const
    {
        std::vector<ItemId> ids;
        ids.reserve(entries.size());
        for (const auto& e : entries) {
            ids.push_back(e.item_id);
        }
        return ids;
    }
    [[nodiscard]] std::size_t size() const { return entries.size(); }
    [[nodiscard]] int ground_truth_position() const
    {
        for (const auto& e : entries) {
            if (e.item_id == ground_truth) {
                return e.position;
            }
        }
        return 0;
    }

    friend bool operator==(const CandidatePage&, const CandidatePage&) = default;
};

struct StatPatterns {
    double mean_rating = 0.0;
    std::array<int, 5> rating_histogram{}; // index 0 is rating 1
    double popular_item_fraction = 0.0;
    double high_rated_item_fraction = 0.0;
    bool empty = false;

    friend bool operator==(const StatPatterns&, const StatPatterns&) = default;
};

} // namespace dyta::data
