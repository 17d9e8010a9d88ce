#pragma once

#include "dyta/llm/gateway.hpp"

#include <cctype>
#include <charconv>
#include <optional>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace dyta::llm {

struct ParsedRanking {
    std::vector<ItemId> order;
    bool repaired = false;
};

namespace detail {

inline std::vector<ItemId> integer_tokens(std::string_view text)
{
    std::vector<ItemId> out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (std::isdigit(static_cast<unsigned char>(text[i])) == 0) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])) != 0) {
            ++j;
        }
        ItemId value = 0;
        auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + j, value);
        // Out-of-range digit runs cannot be candidate ids; emit a sentinel that
        // breaks any current run.
        out.push_back(ec == std::errc{} ? value : -1);
        i = j;
    }
    return out;
}

} // namespace detail

/// Turns model output into a full ranking of the page. Takes the first maximal
/// run of recognized candidate ids, drops repeats, then appends unmentioned
/// candidates in page order. nullopt when no candidate id is recognized.
inline std::optional<ParsedRanking> parse_ranking(std::string_view raw, const std::vector<ItemId>& page_order)
{
    const std::unordered_set<ItemId> candidates(page_order.begin(), page_order.end());
    const auto tokens = detail::integer_tokens(raw);

    std::size_t begin = 0;
    while (begin < tokens.size() && !candidates.contains(tokens[begin])) {
        ++begin;
    }
    if (begin == tokens.size()) {
        return std::nullopt;
    }
    ParsedRanking out;
    std::unordered_set<ItemId> placed;
    for (std::size_t i = begin; i < tokens.size() && candidates.contains(tokens[i]); ++i) {
        if (placed.insert(tokens[i]).second) {
            out.order.push_back(tokens[i]);
        } else {
            out.repaired = true;
        }
    }
    for (ItemId id : page_order) {
        if (!placed.contains(id)) {
            out.order.push_back(id);
            out.repaired = true;
        }
    }
    return out;
}

inline ParsedRanking fallback_ranking(const std::vector<ItemId>& page_order)
{
    return {page_order, true};
}

inline constexpr std::string_view reformat_instruction =
    "Your previous reply could not be read. Reply with only the candidate ids, separated by commas, "
    "most likely first. Do not add any other text.";

struct RankingOutcome {
    ParsedRanking ranking;
    bool fell_back = false;
};

/// Issue a ranking request; one reformat retry on an unreadable reply, then
/// page order. Backend errors propagate.
inline RankingOutcome request_ranking(Gateway& gateway, const ChatRequest& request)
{
    const auto& page_order = request.hints.page_order;
    const auto first = gateway.complete(request);
    if (auto parsed = parse_ranking(first.content, page_order)) {
        return {std::move(*parsed), false};
    }
    ChatRequest retry = request;
    retry.tag = request.tag + ".reformat";
    retry.messages.push_back({Role::assistant, first.content});
    retry.messages.push_back({Role::user, std::string(reformat_instruction)});
    const auto second = gateway.complete(retry);
    if (auto parsed = parse_ranking(second.content, page_order)) {
        parsed->repaired = true;
        return {std::move(*parsed), false};
    }
    spdlog::warn("{}: unreadable ranking after reformat; falling back to page order", request.tag);
    return {fallback_ranking(page_order), true};
}

} // namespace dyta::llm
