#pragma once

// Writes a synthetic dataset in the exact ML-1M file layout (`::`-separated,
// Latin-1 titles) for tests and demos that cannot ship the real files.

#include "dyta/rng.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace dyta::testing {

struct FixtureSpec {
    int users = 200;
    int items = 600;
    int min_ratings = 20;
    int max_ratings = 60;
    std::uint64_t seed = 42;
};

inline constexpr std::array<const char*, 18> ml_genres{
    "Action", "Adventure", "Animation", "Children's", "Comedy", "Crime", "Documentary", "Drama", "Fantasy",
    "Film-Noir", "Horror", "Musical", "Mystery", "Romance", "Sci-Fi", "Thriller", "War", "Western"};

/// Item ids actually written; every 25th id is left unused, like the gaps in ML-1M.
inline std::vector<std::int64_t> fixture_item_ids(const FixtureSpec& spec)
{
    std::vector<std::int64_t> ids;
    for (std::int64_t id = 1; static_cast<int>(ids.size()) < spec.items; ++id) {
        if (id % 25 != 0) {
            ids.push_back(id);
        }
    }
    return ids;
}

inline void write_ml1m_fixture(const std::filesystem::path& dir, const FixtureSpec& spec = {})
{
    std::filesystem::create_directories(dir);
    Rng rng(spec.seed);
    const auto ids = fixture_item_ids(spec);

    {
        std::ofstream movies(dir / "movies.dat", std::ios::binary);
        for (auto id : ids) {
            std::string title = (id % 37 == 0) ? "Caf\xe9 Soci\xe9t\xe9 " : "Film ";
            title += std::to_string(id);
            const int year = 1920 + static_cast<int>(uniform_below(rng, 81));
            const auto n_genres = 1 + uniform_below(rng, 3);
            std::string genres;
            const auto first = uniform_below(rng, ml_genres.size());
            for (std::uint64_t g = 0; g < n_genres; ++g) {
                genres += (g ? "|" : "");
                genres += ml_genres[(first + g * 5) % ml_genres.size()];
            }
            movies << id << "::" << title << " (" << year << ")::" << genres << "\n";
        }
    }
    {
        std::ofstream users(dir / "users.dat", std::ios::binary);
        static constexpr std::array<int, 7> ages{1, 18, 25, 35, 45, 50, 56};
        for (int u = 1; u <= spec.users; ++u) {
            char zip[8];
            std::snprintf(zip, sizeof zip, "%05d", static_cast<int>(uniform_below(rng, 100000)));
            users << u << "::" << (u % 2 ? "M" : "F") << "::" << ages[uniform_below(rng, ages.size())]
                  << "::" << uniform_below(rng, 21) << "::" << zip << "\n";
        }
    }
    {
        std::ofstream ratings(dir / "ratings.dat", std::ios::binary);
        for (int u = 1; u <= spec.users; ++u) {
            const auto n = static_cast<std::size_t>(
                spec.min_ratings + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(
                                                                           spec.max_ratings - spec.min_ratings + 1))));
            std::vector<std::int64_t> pool = ids;
            for (std::size_t i = 0; i < n; ++i) {
                const auto j = i + static_cast<std::size_t>(uniform_below(rng, pool.size() - i));
                std::swap(pool[i], pool[j]);
            }
            struct Row {
                std::int64_t item;
                int rating;
                std::int64_t ts;
            };
            std::vector<Row> rows;
            std::int64_t ts = 956703932 + static_cast<std::int64_t>(uniform_below(rng, 10000000));
            for (std::size_t i = 0; i < n; ++i) {
                // Roughly one in six consecutive ratings share a timestamp.
                if (uniform_below(rng, 6) != 0) {
                    ts += 1 + static_cast<std::int64_t>(uniform_below(rng, 90000));
                }
                static constexpr std::array<int, 10> rating_mix{1, 2, 3, 3, 4, 4, 4, 5, 5, 3};
                rows.push_back({pool[i], rating_mix[uniform_below(rng, rating_mix.size())], ts});
            }
            // Files are grouped by user but not chronologically sorted.
            shuffle(std::span<Row>(rows), rng);
            for (const auto& r : rows) {
                ratings << u << "::" << r.item << "::" << r.rating << "::" << r.ts << "\n";
            }
        }
    }
}

} // namespace dyta::testing
