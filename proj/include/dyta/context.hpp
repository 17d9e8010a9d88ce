#pragma once

#include "dyta/dataset/types.hpp"
#include "dyta/llm/gateway.hpp"
#include "dyta/prompts.hpp"

#include <atomic>
#include <cstdint>
#include <ctime>
#include <sstream>
#include <string>
#include <vector>

namespace dyta {

/// Sampling parameters applied to every request a pipeline stage issues.
struct RequestDefaults {
    double temperature = 0.1;
    double top_p = 0.9;
    std::string model_name = "gpt-4o-mini";
    int max_tokens = 512;
};

struct TextBudget {
    std::size_t history_chars = 12000; // rendered history, truncated oldest-first
    std::size_t memory_chars = 2000;
};

/// Shared, read-mostly collaborators of every LLM-backed stage.
struct SimContext {
    llm::Gateway& gateway;
    const data::Catalog& catalog;
    const PromptSet& prompts;
    RequestDefaults request{};
    TextBudget budget{};
    /// Incremented whenever history text had to be truncated.
    std::atomic<std::uint64_t>* truncations = nullptr;

    [[nodiscard]] llm::ChatRequest make_request(std::string tag, std::string prompt) const
    {
        llm::ChatRequest r;
        r.messages.push_back({llm::Role::system,
                              "You simulate a real person using a movie recommendation service. Stay in character "
                              "and answer in the requested format."});
        r.messages.push_back({llm::Role::user, std::move(prompt)});
        r.temperature = request.temperature;
        r.top_p = request.top_p;
        r.model_name = request.model_name;
        r.max_tokens = request.max_tokens;
        r.tag = std::move(tag);
        return r;
    }

    void note_truncation() const
    {
        if (truncations) {
            truncations->fetch_add(1, std::memory_order_relaxed);
        }
    }
};

namespace render {

inline std::string utc_date(std::int64_t unix_seconds)
{
    const auto t = static_cast<std::time_t>(unix_seconds);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[16];
    std::strftime(buf, sizeof buf, "%Y-%m-%d", &tm);
    return buf;
}

inline std::string genres(const data::ItemRecord& item)
{
    std::string out;
    for (std::size_t i = 0; i < item.genres.size(); ++i) {
        out += (i ? ", " : "") + item.genres[i];
    }
    return out;
}

inline std::string item_text(const data::Catalog& catalog, data::ItemId id)
{
    const auto it = catalog.items.find(id);
    if (it == catalog.items.end()) {
        return "item " + std::to_string(id);
    }
    return it->second.title + " [" + genres(it->second) + "]";
}

inline std::string interaction_line(const data::Catalog& catalog, const data::Interaction& i)
{
    std::string line = utc_date(i.timestamp) + " | " + item_text(catalog, i.item_id) + " | rated "
                       + std::to_string(i.rating) + "/5";
    if (i.feeling && !i.feeling->empty()) {
        line += " | felt: " + *i.feeling;
    }
    return line;
}

struct Rendered {
    std::string text;
    bool truncated = false;
};

/// One line per interaction, oldest first; drops the oldest lines until the
/// text fits `budget` characters.
template <typename Range>
Rendered history(const data::Catalog& catalog, const Range& interactions, std::size_t budget)
{
    std::vector<std::string> lines;
    for (const auto& i : interactions) {
        lines.push_back("- " + interaction_line(catalog, i));
    }
    std::size_t total = 0;
    std::size_t first = lines.size();
    while (first > 0 && total + lines[first - 1].size() + 1 <= budget) {
        total += lines[first - 1].size() + 1;
        --first;
    }
    Rendered out;
    out.truncated = first > 0;
    for (std::size_t i = first; i < lines.size(); ++i) {
        out.text += lines[i];
        out.text += '\n';
    }
    if (out.text.empty()) {
        out.text = "(none)\n";
    }
    return out;
}

inline std::string candidates(const data::Catalog& catalog, const data::CandidatePage& page)
{
    std::ostringstream out;
    for (const auto& e : page.entries) {
        out << e.position << ". id " << e.item_id << ": " << item_text(catalog, e.item_id) << '\n';
    }
    return out.str();
}

} // namespace render
} // namespace dyta
