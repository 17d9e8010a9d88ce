#pragma once

#include "dyta/dataset/types.hpp"
#include "dyta/error.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace dyta::data {

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find("::", start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 2;
    }
    return out;
}

template <typename Int>
Int parse_int(std::string_view text, const std::string& file, std::size_t line_no)
{
    Int value{};
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw DataError(file + ":" + std::to_string(line_no) + ": expected integer, got '" + std::string(text) + "'");
    }
    return value;
}

inline std::string latin1_to_utf8(std::string_view in)
{
    std::string out;
    out.reserve(in.size());
    for (unsigned char c : in) {
        if (c < 0x80) {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back(static_cast<char>(0xC0 | (c >> 6)));
            out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
        }
    }
    return out;
}

inline std::ifstream open_required(const std::filesystem::path& path)
{
    if (!std::filesystem::is_regular_file(path)) {
        throw ConfigError("missing dataset file: " + path.string());
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open dataset file: " + path.string());
    }
    return in;
}

inline void strip_cr(std::string& line)
{
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
}

} // namespace detail

/// Parse "Title (YYYY)" into its year; returns 0 when no trailing year exists.
inline int title_year(std::string_view title)
{
    while (!title.empty() && title.back() == ' ') {
        title.remove_suffix(1);
    }
    if (title.size() < 6 || title.back() != ')' || title[title.size() - 6] != '(') {
        return 0;
    }
    const auto digits = title.substr(title.size() - 5, 4);
    int year = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), year);
    if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
        return 0;
    }
    return year;
}

inline UserRecord parse_user_line(std::string_view line, const std::string& file, std::size_t line_no)
{
    const auto f = detail::split_fields(line);
    if (f.size() != 5) {
        throw DataError(file + ":" + std::to_string(line_no) + ": expected 5 fields, got " + std::to_string(f.size()));
    }
    UserRecord u;
    u.user_id = detail::parse_int<UserId>(f[0], file, line_no);
    if (f[1] == "M") {
        u.gender = Gender::male;
    } else if (f[1] == "F") {
        u.gender = Gender::female;
    } else {
        throw DataError(file + ":" + std::to_string(line_no) + ": gender must be M or F");
    }
    u.age_bracket = detail::parse_int<int>(f[2], file, line_no);
    u.occupation = detail::parse_int<int>(f[3], file, line_no);
    u.zip = std::string(f[4]);
    if (u.user_id <= 0) {
        throw DataError(file + ":" + std::to_string(line_no) + ": user id must be positive");
    }
    return u;
}

inline ItemRecord parse_movie_line(std::string_view line, const std::string& file, std::size_t line_no)
{
    // Titles may themselves contain "::" only in theory; ML-1M never does, so
    // the first and last separators delimit the title.
    const auto first = line.find("::");
    const auto last = line.rfind("::");
    if (first == std::string_view::npos || first == last) {
        throw DataError(file + ":" + std::to_string(line_no) + ": expected 3 fields");
    }
    ItemRecord item;
    item.item_id = detail::parse_int<ItemId>(line.substr(0, first), file, line_no);
    item.title = detail::latin1_to_utf8(line.substr(first + 2, last - first - 2));
    item.year = title_year(item.title);
    if (item.year < 1900 || item.year > 2010) {
        throw DataError(file + ":" + std::to_string(line_no) + ": title lacks a (YYYY) year in [1900, 2010]");
    }
    auto genres = line.substr(last + 2);
    std::size_t start = 0;
    while (start <= genres.size()) {
        const auto bar = genres.find('|', start);
        const auto g = genres.substr(start, bar == std::string_view::npos ? std::string_view::npos : bar - start);
        if (!g.empty()) {
            item.genres.emplace_back(g);
        }
        if (bar == std::string_view::npos) {
            break;
        }
        start = bar + 1;
    }
    if (item.genres.empty()) {
        throw DataError(file + ":" + std::to_string(line_no) + ": item has no genres");
    }
    if (item.item_id <= 0) {
        throw DataError(file + ":" + std::to_string(line_no) + ": item id must be positive");
    }
    return item;
}

inline RatingRow parse_rating_line(std::string_view line, const std::string& file, std::size_t line_no)
{
    const auto f = detail::split_fields(line);
    if (f.size() != 4) {
        throw DataError(file + ":" + std::to_string(line_no) + ": expected 4 fields, got " + std::to_string(f.size()));
    }
    RatingRow row;
    row.user_id = detail::parse_int<UserId>(f[0], file, line_no);
    row.interaction.item_id = detail::parse_int<ItemId>(f[1], file, line_no);
    row.interaction.rating = detail::parse_int<int>(f[2], file, line_no);
    row.interaction.timestamp = detail::parse_int<std::int64_t>(f[3], file, line_no);
    if (row.interaction.rating < 1 || row.interaction.rating > 5) {
        throw DataError(file + ":" + std::to_string(line_no) + ": rating outside 1..5");
    }
    if (row.interaction.timestamp <= 0) {
        throw DataError(file + ":" + std::to_string(line_no) + ": timestamp must be positive");
    }
    return row;
}

/// Loader seam so datasets other than ML-1M can be added later.
class DatasetLoader {
public:
    virtual ~DatasetLoader() = default;
    [[nodiscard]] virtual Catalog load(const std::filesystem::path& directory) const = 0;
};

class Ml1mLoader final : public DatasetLoader {
public:
    [[nodiscard]] Catalog load(const std::filesystem::path& directory) const override
    {
        Catalog catalog;
        read_lines(directory / "users.dat", [&](std::string_view line, const std::string& file, std::size_t n) {
            auto u = parse_user_line(line, file, n);
            if (!catalog.users.emplace(u.user_id, u).second) {
                throw DataError(file + ":" + std::to_string(n) + ": duplicate user id " + std::to_string(u.user_id));
            }
        });
        read_lines(directory / "movies.dat", [&](std::string_view line, const std::string& file, std::size_t n) {
            auto item = parse_movie_line(line, file, n);
            const auto id = item.item_id;
            if (!catalog.items.emplace(id, std::move(item)).second) {
                throw DataError(file + ":" + std::to_string(n) + ": duplicate item id " + std::to_string(id));
            }
        });
        read_lines(directory / "ratings.dat", [&](std::string_view line, const std::string& file, std::size_t n) {
            auto row = parse_rating_line(line, file, n);
            if (!catalog.users.contains(row.user_id)) {
                throw DataError(file + ":" + std::to_string(n) + ": rating references unknown user " + std::to_string(row.user_id));
            }
            if (!catalog.items.contains(row.interaction.item_id)) {
                throw DataError(file + ":" + std::to_string(n) + ": rating references unknown item "
                                + std::to_string(row.interaction.item_id));
            }
            row.file_order = catalog.ratings.size();
            catalog.ratings.push_back(std::move(row));
        });
        catalog.empty_ratings = catalog.ratings.empty();
        return catalog;
    }

private:
    template <typename Fn>
    static void read_lines(const std::filesystem::path& path, Fn&& fn)
    {
        auto in = detail::open_required(path);
        const auto name = path.filename().string();
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            detail::strip_cr(line);
            if (line.empty()) {
                continue;
            }
            fn(std::string_view(line), name, line_no);
        }
    }
};

inline Catalog load_ml1m(const std::filesystem::path& directory)
{
    return Ml1mLoader{}.load(directory);
}

} // namespace dyta::data
